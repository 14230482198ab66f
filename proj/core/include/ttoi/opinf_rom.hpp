// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ttoi/snapshot_io.hpp"
#include "ttoi/tt_tensor.hpp"

namespace ttoi {

/// Dominant right-singular-vector basis of a (time x state) snapshot matrix.
struct PodBasis {
  Eigen::MatrixXd basis;            // state_size x n, orthonormal columns
  Eigen::VectorXd singular_values;  // length n, descending
  double energy_captured = 0.0;     // retained share of the squared spectrum
};

/// Per-block Tikhonov factors for the linear / quadratic / input operators.
struct Lambda {
  double a = 0.0;
  double f = 0.0;
  double b = 0.0;
};

/// Learned reduced operators of dx/dt = A x + F (x (x) x) + B u.
struct ReducedOperators {
  Eigen::MatrixXd a_hat;  // n x n
  Eigen::MatrixXd f_hat;  // n x n^2
  Eigen::MatrixXd b_hat;  // n x p, 0x0 when the model has no inputs
  Lambda regularization;
};

/// Reduced model extracted from a snapshot tensor train: the left-orthogonal
/// spatial chain plays the role of the basis and the final core holds the
/// reduced trajectory.
struct TtRomModel {
  std::vector<TtCore> spatial_cores;
  Eigen::MatrixXd reduced_snapshots;  // K x n
  ReducedOperators operators;
};

/// POD of a K x N snapshot matrix (rows are time samples) keeping `n_modes`
/// right singular vectors, or as many as capture an `energy_tol` share of
/// the squared spectrum.
PodBasis pod(const Eigen::MatrixXd& snapshots, Index n_modes);
PodBasis pod_energy(const Eigen::MatrixXd& snapshots, double energy_tol);

/// Design matrix [linear | input | quadratic]; the quadratic block of row k
/// is the full Kronecker square of the reduced state (all n^2 entries).
Eigen::MatrixXd build_design(const Eigen::MatrixXd& xhat);
Eigen::MatrixXd build_design(const Eigen::MatrixXd& xhat,
                             const Eigen::MatrixXd& u);

/// Least-squares operator fit with per-block Tikhonov regularization.
/// Blocks with factor l contribute l*I augmentation rows, so a uniform
/// factor reproduces the classical filtered-SVD solution s/(s^2 + l^2).
/// Warns on badly conditioned designs when no regularization is applied.
ReducedOperators solve_opinf(const Eigen::MatrixXd& design,
                             const Eigen::MatrixXd& targets, Lambda lambda);

/// Right-hand side of the learned reduced system.
Eigen::VectorXd reduced_rhs(const ReducedOperators& ops,
                            const Eigen::VectorXd& xhat);
Eigen::VectorXd reduced_rhs(const ReducedOperators& ops,
                            const Eigen::VectorXd& xhat,
                            const Eigen::VectorXd& u);

/// Dense K x K time-differentiation stencil matrix: central differences of
/// the given order (2 or 4) inside, one-sided stencils of the same order at
/// the ends. Requires a uniform step.
Eigen::MatrixXd time_derivative_matrix(Index count, double dt, int order);

/// Time derivatives of a uniformly sampled series. The matrix variant treats
/// rows as time samples; the tensor-train variant differentiates the final
/// core only (time must be the last mode).
Eigen::MatrixXd derivative_targets(const Eigen::MatrixXd& series, double dt,
                                   int order);
TtTensor derivative_targets(const TtTensor& series, double dt, int order);

/// Fits a reduced model from snapshots: compresses the snapshot tensor
/// (time last) into a tensor train at `tol`, left-orthogonalizes the spatial
/// chain, and learns the reduced operators on the final core's trajectory.
/// `use_cross` switches the compression from sequential SVD to
/// cross interpolation.
TtRomModel ttrom_fit(const SnapshotSet& snapshots, TruncationTol tol,
                     Lambda lambda, bool use_cross = false,
                     int stencil_order = 4);
/// Same fit from an already-compressed snapshot train (time mode last).
TtRomModel ttrom_fit(const TtTensor& x_tt, double dt, Lambda lambda,
                     int stencil_order = 4);

/// Maps reduced states back to the full space by appending them as the
/// final core of the stored spatial chain.
TtTensor ttrom_reconstruct(const TtRomModel& model,
                           const Eigen::MatrixXd& xhat);
TtTensor ttrom_reconstruct(const TtRomModel& model,
                           const Eigen::VectorXd& xhat);

}  // namespace ttoi
