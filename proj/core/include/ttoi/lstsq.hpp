// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>

#include "ttoi/tt_tensor.hpp"

namespace ttoi {

/// Filtered pseudoinverse of the matricization that groups the first `split`
/// modes of `t` as rows. The result is a tensor train over the permuted mode
/// list [n_split..n_{d-1}, n_0..n_{split-1}] whose leading (d - split) modes
/// index rows of the pseudoinverse. gamma = 0 gives the Moore-Penrose
/// inverse; gamma > 0 applies the ridge filter s / (s^2 + gamma). Singular
/// values below 1e-14 times the largest are discarded in either case.
TtTensor tt_pinv(const TtTensor& t, Index split, double gamma);

/// Learns O from the overdetermined system O * unfold(design) ~ targets,
/// where the trailing mode of both tensors enumerates observations. The
/// result concatenates the leading modes of `targets` (operator rows) with
/// the leading modes of `design` (operator columns), ready for tt_contract.
TtTensor tt_ls_solve(const TtTensor& design, const TtTensor& targets,
                     double gamma);

/// Dense counterpart: columns of `design` (n_in x K) and `targets`
/// (n_out x K) are paired observations; returns the (n_out x n_in) filtered
/// minimum-norm solution of O * design = targets.
Eigen::MatrixXd solve_operator(const Eigen::MatrixXd& design,
                               const Eigen::MatrixXd& targets, double gamma);

}  // namespace ttoi
