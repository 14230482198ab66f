// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>

#include "ttoi/tt_tensor.hpp"

namespace ttoi::detail {

// Relative floor applied on top of every truncation threshold; collapses
// numerically exact rank deficiency without disturbing results beyond 1e-14.
inline constexpr double kSigmaFloorRel = 1e-15;

// Floor for retained singular values inside pseudoinverse computations.
inline constexpr double kPinvFloorRel = 1e-14;

// Dense materialization budget (element count).
inline constexpr Index kFullCapacity = Index{1} << 27;

struct SvdEcon {
  Eigen::MatrixXd u;
  Eigen::VectorXd s;
  Eigen::MatrixXd v;
};

// Thin SVD with a deterministic sign convention: the largest-magnitude entry
// of every left singular vector is made positive.
SvdEcon svd_econ(const Eigen::MatrixXd& m);

// Number of singular values strictly above max(delta, s_max * floor_rel),
// at least `min_rank` (clipped to s.size()).
Index truncation_rank(const Eigen::VectorXd& s, double delta, double floor_rel,
                      Index min_rank = 1);

// m (rows x r0) times core over the left rank: result (rows, n, r1).
TtCore absorb_left(const Eigen::MatrixXd& m, const TtCore& core);

// core times m (r1 x cols) over the right rank: result (r0, n, cols).
TtCore absorb_right(const TtCore& core, const Eigen::MatrixXd& m);

// Fuses two adjacent cores into one with mode a.n * b.n (left index slower).
TtCore merge_pair(const TtCore& a, const TtCore& b);

// Splits a fused core back into modes (na, nb) by SVD with absolute
// threshold delta_abs on top of the relative floor. The singular values are
// absorbed into the left or right factor.
enum class AbsorbSide { left, right };
std::pair<TtCore, TtCore> split_pair(const TtCore& fused, Index na, Index nb,
                                     double delta_abs, AbsorbSide side);

// Swaps the modes of two adjacent cores exactly (floor-thresholded split).
std::pair<TtCore, TtCore> swap_pair(const TtCore& a, const TtCore& b,
                                    AbsorbSide side);

// In-place orthogonalization sweeps over a whole chain. Left: returns R with
// old = new * R. Right: returns L with old = L * new.
Eigen::MatrixXd orthogonalize_left_inplace(std::vector<TtCore>& cores);
Eigen::MatrixXd orthogonalize_right_inplace(std::vector<TtCore>& cores);

// Relocates an open interface index across a chain, keeping mode order.
//
// interface_to_front: input cores form a chain whose LAST core has right
// rank q (the open interface); the result chain has the interface as the
// FIRST core's left rank and represents the transposed interface matrix:
//   new_chain(q; i_1..i_m) == old_chain(i_1..i_m; q).
std::vector<TtCore> interface_to_front(std::vector<TtCore> cores);

// Mirror image: input chain's FIRST core has left rank q; result chain
// carries q as the LAST core's right rank, modes kept in order.
std::vector<TtCore> interface_to_back(std::vector<TtCore> cores);

}  // namespace ttoi::detail
