// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ttoi/quantize.hpp"
#include "ttoi/snapshot_io.hpp"
#include "ttoi/tt_tensor.hpp"

namespace ttoi {

enum class OpRep { dense, tt };

/// Least-squares solution tensor before operator extraction: modes
/// [state-out (d), state-in (d), augmented-in (d, sizes n_k + 1)].
struct OperatorTensor {
  OpRep representation = OpRep::dense;
  Index state_modes = 0;  // d
  DenseTensor dense;      // valid when representation == dense
  TtTensor tt;            // valid when representation == tt
};

/// Learned full-order operators of dx/dt = A.x + F.(x (x) x).
///
/// Dense representation: `a` is the N x N matricization; the quadratic
/// operator acts as `f_left * f_right` on Kronecker squares when `f_right`
/// is nonempty, otherwise `f_left` holds the explicit N x N^2 matrix.
/// TT representation: `a_tt` has d output + d input modes, `f_tt` has
/// d output + 2d input modes.
struct FullOperators {
  OpRep representation = OpRep::dense;
  std::vector<Index> state_dims;
  Eigen::MatrixXd a;
  Eigen::MatrixXd f_left;
  Eigen::MatrixXd f_right;
  TtTensor a_tt;
  TtTensor f_tt;

  [[nodiscard]] Index state_size() const {
    return DenseTensor::checked_size(state_dims);
  }
  /// Explicit N x N^2 quadratic matrix (dense representation, small N).
  [[nodiscard]] Eigen::MatrixXd f_dense() const;
};

/// Data tensor over [state modes, augmented modes (sizes + 1), time]: the
/// all-zero augmented slice carries the snapshots, augmented indices >= 1
/// carry the Kronecker square shifted by one, and mixed slices vanish.
DenseTensor assemble_data_tensor(const SnapshotSet& x);
/// Tensor-train variant built by padding the snapshot train and an exact
/// train of its Kronecker square, adding, and rounding at `tol`.
TtTensor assemble_data_tensor(const TtTensor& x_tt, TruncationTol tol);

/// Time-derivative tensor over [state modes, time].
DenseTensor derivative_tensor(const SnapshotSet& x, int stencil_order = 4);

/// Dense full-order fit on the matricized system. Guarded to small states;
/// larger problems belong to the tensor-train path.
FullOperators ft_learn(const SnapshotSet& x, double gamma,
                       int stencil_order = 4);

/// Tensor-train full-order fit: compress snapshots at `tol`, assemble the
/// data and derivative trains, solve by the regularized train pseudoinverse,
/// and extract the operators.
FullOperators tt_learn(const SnapshotSet& x, TruncationTol tol, double gamma,
                       int stencil_order = 4);
/// Same fit from an already-compressed snapshot train (time mode last).
FullOperators tt_learn_from(const TtTensor& x_tt, double dt,
                            TruncationTol tol, double gamma,
                            int stencil_order = 4);

/// Quantized variant: flattens the state, reshapes by the factor policy,
/// and runs the tensor-train fit over the quantized modes.
FullOperators qtt_learn(const SnapshotSet& x, TruncationTol tol, double gamma,
                        FactorPolicy policy = FactorPolicy::ascending_primes,
                        int stencil_order = 4, Index merge_cap = 6);

/// Quantized mode sizes that `qtt_learn` derives from a snapshot layout.
std::vector<Index> qtt_modes(const SnapshotSet& x, FactorPolicy policy,
                             Index merge_cap = 6);

/// Splits the solution tensor into the linear part (augmented indices all
/// zero, singleton modes folded away) and the quadratic part (augmented
/// index zero dropped, remaining slices shifted down by one).
FullOperators extract_operators(const OperatorTensor& o);

/// Right-hand side of the learned full-order system.
Eigen::VectorXd full_rhs(const FullOperators& ops, const Eigen::VectorXd& x);
TtTensor full_rhs(const FullOperators& ops, const TtTensor& x,
                  TruncationTol tol);

/// State at time index k, sliced out of a snapshot train (time mode last).
TtTensor snapshot_state(const TtTensor& x_tt, Index k);

}  // namespace ttoi
