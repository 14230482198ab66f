// SPDX-License-Identifier: MIT

#include "ttoi/opinf_rom.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <utility>

#include "tt_internal.hpp"
#include "ttoi/cross.hpp"
#include "ttoi/errors.hpp"

namespace ttoi {

namespace {

constexpr double kCondWarn = 1e12;

Eigen::MatrixXd kron_square_rows(const Eigen::MatrixXd& xhat) {
  const Index k = xhat.rows();
  const Index n = xhat.cols();
  Eigen::MatrixXd q(k, n * n);
  for (Index row = 0; row < k; ++row) {
    for (Index i = 0; i < n; ++i) {
      q.row(row).segment(i * n, n) = xhat(row, i) * xhat.row(row);
    }
  }
  return q;
}

Eigen::MatrixXd assemble_design(const Eigen::MatrixXd& xhat,
                                const Eigen::MatrixXd* u) {
  const Index k = xhat.rows();
  const Index n = xhat.cols();
  if (k < 1 || n < 1) throw ShapeError("build_design: empty reduced states");
  const Index p = u != nullptr ? u->cols() : 0;
  if (u != nullptr && u->rows() != k) {
    throw ShapeError("build_design: input row count mismatch");
  }
  Eigen::MatrixXd d(k, n + p + n * n);
  d.leftCols(n) = xhat;
  if (p > 0) d.middleCols(n, p) = *u;
  d.rightCols(n * n) = kron_square_rows(xhat);
  return d;
}

}  // namespace

PodBasis pod(const Eigen::MatrixXd& snapshots, Index n_modes) {
  const Index k = snapshots.rows();
  const Index nstate = snapshots.cols();
  if (k < 1 || nstate < 1) throw ShapeError("pod: empty snapshot matrix");
  if (n_modes < 1 || n_modes > std::min(k, nstate)) {
    throw InvalidInputError("pod: mode count out of range");
  }
  if (!(snapshots.squaredNorm() > 0.0)) {
    throw InvalidInputError("pod: zero snapshot matrix has no basis");
  }
  detail::SvdEcon svd = detail::svd_econ(snapshots);
  PodBasis out;
  out.basis = svd.v.leftCols(n_modes);
  out.singular_values = svd.s.head(n_modes);
  out.energy_captured =
      svd.s.head(n_modes).squaredNorm() / svd.s.squaredNorm();
  return out;
}

PodBasis pod_energy(const Eigen::MatrixXd& snapshots, double energy_tol) {
  if (!(energy_tol > 0.0) || energy_tol > 1.0) {
    throw InvalidInputError("pod: energy tolerance outside (0, 1]");
  }
  if (!(snapshots.squaredNorm() > 0.0)) {
    throw InvalidInputError("pod: zero snapshot matrix has no basis");
  }
  detail::SvdEcon svd = detail::svd_econ(snapshots);
  const double total = svd.s.squaredNorm();
  double acc = 0.0;
  Index n = svd.s.size();
  for (Index i = 0; i < svd.s.size(); ++i) {
    acc += svd.s(i) * svd.s(i);
    if (acc >= energy_tol * total * (1.0 - 1e-15)) {
      n = i + 1;
      break;
    }
  }
  return pod(snapshots, n);
}

Eigen::MatrixXd build_design(const Eigen::MatrixXd& xhat) {
  return assemble_design(xhat, nullptr);
}

Eigen::MatrixXd build_design(const Eigen::MatrixXd& xhat,
                             const Eigen::MatrixXd& u) {
  return assemble_design(xhat, &u);
}

ReducedOperators solve_opinf(const Eigen::MatrixXd& design,
                             const Eigen::MatrixXd& targets, Lambda lambda) {
  const Index k = design.rows();
  const Index m = design.cols();
  const Index n = targets.cols();
  if (targets.rows() != k) {
    throw ShapeError("solve_opinf: design/target row mismatch");
  }
  const Index p = m - n - n * n;
  if (n < 1 || p < 0) {
    throw ShapeError("solve_opinf: design width does not fit n + p + n^2");
  }
  if (!design.allFinite() || !targets.allFinite()) {
    throw InvalidInputError("solve_opinf: non-finite entries");
  }
  if (lambda.a < 0.0 || lambda.f < 0.0 || lambda.b < 0.0) {
    throw InvalidInputError("solve_opinf: negative regularization");
  }

  // One augmentation row per penalized column; a uniform factor turns the
  // min-norm solution into the filtered-SVD form s/(s^2 + lambda^2).
  const double scale[3] = {lambda.a, lambda.b, lambda.f};
  const Index width[3] = {n, p, n * n};
  Index extra = 0;
  for (int blk = 0; blk < 3; ++blk) {
    if (scale[blk] > 0.0) extra += width[blk];
  }
  Eigen::MatrixXd a(k + extra, m);
  a.topRows(k) = design;
  a.bottomRows(extra).setZero();
  Index row = k;
  Index col = 0;
  for (int blk = 0; blk < 3; ++blk) {
    if (scale[blk] > 0.0) {
      for (Index i = 0; i < width[blk]; ++i) {
        a(row + i, col + i) = scale[blk];
      }
      row += width[blk];
    }
    col += width[blk];
  }
  Eigen::MatrixXd rhs(k + extra, n);
  rhs.topRows(k) = targets;
  rhs.bottomRows(extra).setZero();

  detail::SvdEcon svd = detail::svd_econ(a);
  const double smax = svd.s.size() > 0 ? svd.s(0) : 0.0;
  if (extra == 0 && smax > 0.0) {
    const double smin = svd.s(svd.s.size() - 1);
    if (!(smin > 0.0) || smax / smin > kCondWarn) {
      std::fprintf(stderr,
                   "solve_opinf: condition number %.3e exceeds %.0e with no "
                   "regularization\n",
                   smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity(),
                   kCondWarn);
    }
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(svd.s.size());
  for (Index i = 0; i < svd.s.size(); ++i) {
    if (svd.s(i) > smax * detail::kPinvFloorRel) w(i) = 1.0 / svd.s(i);
  }
  Eigen::MatrixXd ot =
      svd.v * (w.asDiagonal() * (svd.u.transpose() * rhs));  // m x n

  ReducedOperators ops;
  ops.a_hat = ot.topRows(n).transpose();
  ops.b_hat = ot.middleRows(n, p).transpose();
  ops.f_hat = ot.bottomRows(n * n).transpose();
  ops.regularization = lambda;
  return ops;
}

Eigen::VectorXd reduced_rhs(const ReducedOperators& ops,
                            const Eigen::VectorXd& xhat) {
  const Index n = ops.a_hat.rows();
  if (xhat.size() != n) throw ShapeError("reduced_rhs: state size mismatch");
  if (ops.b_hat.cols() > 0) {
    throw ShapeError("reduced_rhs: model expects an input signal");
  }
  Eigen::VectorXd xx(n * n);
  for (Index i = 0; i < n; ++i) xx.segment(i * n, n) = xhat(i) * xhat;
  return ops.a_hat * xhat + ops.f_hat * xx;
}

Eigen::VectorXd reduced_rhs(const ReducedOperators& ops,
                            const Eigen::VectorXd& xhat,
                            const Eigen::VectorXd& u) {
  const Index n = ops.a_hat.rows();
  if (xhat.size() != n) throw ShapeError("reduced_rhs: state size mismatch");
  if (u.size() != ops.b_hat.cols()) {
    throw ShapeError("reduced_rhs: input size mismatch");
  }
  Eigen::VectorXd xx(n * n);
  for (Index i = 0; i < n; ++i) xx.segment(i * n, n) = xhat(i) * xhat;
  return ops.a_hat * xhat + ops.f_hat * xx + ops.b_hat * u;
}

Eigen::MatrixXd time_derivative_matrix(Index count, double dt, int order) {
  if (!(dt > 0.0)) throw InvalidInputError("derivative: nonpositive step");
  if (order != 2 && order != 4) {
    throw InvalidInputError("derivative: stencil order must be 2 or 4");
  }
  const Index need = order == 2 ? 3 : 5;
  if (count < need) {
    throw InvalidInputError("derivative: too few samples for the stencil");
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(count, count);
  if (order == 2) {
    const double h2 = 2.0 * dt;
    d(0, 0) = -3.0 / h2;
    d(0, 1) = 4.0 / h2;
    d(0, 2) = -1.0 / h2;
    for (Index k = 1; k + 1 < count; ++k) {
      d(k, k - 1) = -1.0 / h2;
      d(k, k + 1) = 1.0 / h2;
    }
    d(count - 1, count - 3) = 1.0 / h2;
    d(count - 1, count - 2) = -4.0 / h2;
    d(count - 1, count - 1) = 3.0 / h2;
    return d;
  }
  const double h12 = 12.0 * dt;
  const double head[2][5] = {{-25.0, 48.0, -36.0, 16.0, -3.0},
                             {-3.0, -10.0, 18.0, -6.0, 1.0}};
  for (int r = 0; r < 2; ++r) {
    for (Index j = 0; j < 5; ++j) {
      d(r, j) = head[r][j] / h12;
      d(count - 1 - r, count - 1 - j) = -head[r][j] / h12;
    }
  }
  for (Index k = 2; k + 2 < count; ++k) {
    d(k, k - 2) = 1.0 / h12;
    d(k, k - 1) = -8.0 / h12;
    d(k, k + 1) = 8.0 / h12;
    d(k, k + 2) = -1.0 / h12;
  }
  return d;
}

Eigen::MatrixXd derivative_targets(const Eigen::MatrixXd& series, double dt,
                                   int order) {
  return time_derivative_matrix(series.rows(), dt, order) * series;
}

TtTensor derivative_targets(const TtTensor& series, double dt, int order) {
  if (series.ndims() < 1) throw ShapeError("derivative: empty tensor");
  std::vector<TtCore> cores = series.cores();
  TtCore& last = cores.back();
  if (last.r1 != 1) {
    throw ShapeError("derivative: time mode must close the chain");
  }
  Eigen::MatrixXd stencil = time_derivative_matrix(last.n, dt, order);
  RowMatrix differentiated = last.right() * stencil.transpose();
  std::copy(differentiated.data(), differentiated.data() + last.size(),
            last.a.begin());
  return TtTensor(std::move(cores));
}

TtRomModel ttrom_fit(const SnapshotSet& snapshots, TruncationTol tol,
                     Lambda lambda, bool use_cross, int stencil_order) {
  if (snapshots.count < 2) {
    throw InvalidInputError("ttrom_fit: need at least two snapshots");
  }
  TtTensor tt;
  if (use_cross) {
    std::vector<Index> modes = snapshots.state_dims;
    modes.push_back(snapshots.count);
    const Index count = snapshots.count;
    const double* data = snapshots.data.data();
    const std::vector<Index> dims = snapshots.state_dims;
    CrossOptions opts;
    opts.epsilon = tol.epsilon;
    CrossResult res = tt_cross(
        modes,
        [data, count, dims](std::span<const Index> idx) {
          Index state = 0;
          for (std::size_t m = 0; m < dims.size(); ++m) {
            state = state * dims[m] + idx[m];
          }
          return data[state * count + idx[dims.size()]];
        },
        opts);
    tt = std::move(res.tensor);
  } else {
    tt = tt_svd(snapshots.tensor(), tol);
  }
  return ttrom_fit(tt, snapshots.dt, lambda, stencil_order);
}

TtRomModel ttrom_fit(const TtTensor& x_tt, double dt, Lambda lambda,
                     int stencil_order) {
  const Index d = x_tt.ndims();
  if (d < 2) throw ShapeError("ttrom_fit: need a state and a time mode");

  const std::vector<TtCore>& cores = x_tt.cores();
  auto [spatial, r] = orthogonalize_left(
      std::span<const TtCore>(cores.data(), static_cast<std::size_t>(d - 1)));
  TtCore reduced_core = detail::absorb_left(r, cores.back());

  TtRomModel model;
  model.spatial_cores = std::move(spatial);
  model.reduced_snapshots = reduced_core.right().transpose();  // K x n
  Eigen::MatrixXd targets =
      derivative_targets(model.reduced_snapshots, dt, stencil_order);
  model.operators =
      solve_opinf(build_design(model.reduced_snapshots), targets, lambda);
  return model;
}

TtTensor ttrom_reconstruct(const TtRomModel& model,
                           const Eigen::MatrixXd& xhat) {
  if (model.spatial_cores.empty()) {
    throw ShapeError("ttrom_reconstruct: empty model");
  }
  const Index n = model.spatial_cores.back().r1;
  if (xhat.cols() != n) {
    throw ShapeError("ttrom_reconstruct: reduced dimension mismatch");
  }
  if (xhat.rows() < 1) {
    throw ShapeError("ttrom_reconstruct: empty trajectory");
  }
  std::vector<TtCore> cores = model.spatial_cores;
  TtCore last(n, xhat.rows(), 1);
  RowMatrixMap(last.a.data(), n, xhat.rows()) = xhat.transpose();
  cores.push_back(std::move(last));
  return TtTensor(std::move(cores));
}

TtTensor ttrom_reconstruct(const TtRomModel& model,
                           const Eigen::VectorXd& xhat) {
  return ttrom_reconstruct(model, Eigen::MatrixXd(xhat.transpose()));
}

}  // namespace ttoi
