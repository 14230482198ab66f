// SPDX-License-Identifier: MIT

#include "ttoi/lstsq.hpp"

#include <cmath>

#include "tt_internal.hpp"

namespace ttoi {
namespace {

Eigen::VectorXd ridge_filter(const Eigen::VectorXd& s, double gamma,
                             Index rank) {
  Eigen::VectorXd w(rank);
  for (Index i = 0; i < rank; ++i) {
    w(i) = gamma > 0.0 ? s(i) / (s(i) * s(i) + gamma) : 1.0 / s(i);
  }
  return w;
}

}  // namespace

TtTensor tt_pinv(const TtTensor& t, Index split, double gamma) {
  const Index d = t.ndims();
  if (split < 1 || split >= d) {
    throw InvalidInputError("tt_pinv: split must leave modes on both sides");
  }
  if (gamma < 0.0) throw InvalidInputError("tt_pinv: negative gamma");

  std::vector<TtCore> lchain(t.cores().begin(), t.cores().begin() + split);
  std::vector<TtCore> rchain(t.cores().begin() + split, t.cores().end());
  Eigen::MatrixXd rl = detail::orthogonalize_left_inplace(lchain);
  Eigen::MatrixXd lr = detail::orthogonalize_right_inplace(rchain);

  Eigen::MatrixXd b = rl * lr;
  detail::SvdEcon svd = detail::svd_econ(b);
  const Index rank =
      detail::truncation_rank(svd.s, 0.0, detail::kPinvFloorRel);
  if (svd.s(0) == 0.0) {
    // zero matrix: pseudoinverse is zero
    std::vector<Index> modes;
    for (Index k = split; k < d; ++k) modes.push_back(t.core(k).n);
    for (Index k = 0; k < split; ++k) modes.push_back(t.core(k).n);
    return TtTensor::zero(modes);
  }
  const Eigen::VectorXd w = ridge_filter(svd.s, gamma, rank);

  // row part: transpose of the right chain, then V * diag(w) on its open end
  std::vector<TtCore> rows = detail::interface_to_back(std::move(rchain));
  Eigen::MatrixXd vw = svd.v.leftCols(rank) * w.asDiagonal();
  rows.back() = detail::absorb_right(rows.back(), vw);

  // column part: transpose of the left chain, U^T on its open end
  std::vector<TtCore> cols = detail::interface_to_front(std::move(lchain));
  Eigen::MatrixXd ut = svd.u.leftCols(rank).transpose();
  cols.front() = detail::absorb_left(ut, cols.front());

  rows.insert(rows.end(), std::make_move_iterator(cols.begin()),
              std::make_move_iterator(cols.end()));
  return TtTensor(std::move(rows));
}

TtTensor tt_ls_solve(const TtTensor& design, const TtTensor& targets,
                     double gamma) {
  const Index dd = design.ndims();
  const Index dt = targets.ndims();
  if (dd < 2 || dt < 2) {
    throw InvalidInputError("tt_ls_solve: need at least two modes");
  }
  if (design.core(dd - 1).n != targets.core(dt - 1).n) {
    throw ShapeError("tt_ls_solve: observation counts differ");
  }

  TtTensor pinv = tt_pinv(design, dd - 1, gamma);

  // contract the shared observation mode: the trailing core of `targets`
  // against the leading core of the pseudoinverse
  const TtCore& tc = targets.core(dt - 1);           // (rho_t, K, 1)
  const TtCore& pc = pinv.core(0);                   // (1, K, rho_p)
  Eigen::MatrixXd tmat = ConstRowMatrixMap(tc.a.data(), tc.r0, tc.n);
  Eigen::MatrixXd pmat = ConstRowMatrixMap(pc.a.data(), pc.n, pc.r1);
  Eigen::MatrixXd bond = tmat * pmat;                // rho_t x rho_p

  std::vector<TtCore> cores(targets.cores().begin(),
                            targets.cores().end() - 1);
  cores.push_back(detail::absorb_left(bond, pinv.core(1)));
  for (Index k = 2; k < pinv.ndims(); ++k) cores.push_back(pinv.core(k));
  return TtTensor(std::move(cores));
}

Eigen::MatrixXd solve_operator(const Eigen::MatrixXd& design,
                               const Eigen::MatrixXd& targets, double gamma) {
  if (design.cols() != targets.cols()) {
    throw ShapeError("solve_operator: observation counts differ");
  }
  if (gamma < 0.0) throw InvalidInputError("solve_operator: negative gamma");
  detail::SvdEcon svd = detail::svd_econ(design);
  const Index rank =
      detail::truncation_rank(svd.s, 0.0, detail::kPinvFloorRel);
  if (svd.s(0) == 0.0) {
    return Eigen::MatrixXd::Zero(targets.rows(), design.rows());
  }
  const Eigen::VectorXd w = ridge_filter(svd.s, gamma, rank);
  return targets * svd.v.leftCols(rank) * w.asDiagonal() *
         svd.u.leftCols(rank).transpose();
}

}  // namespace ttoi
