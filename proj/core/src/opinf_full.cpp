// SPDX-License-Identifier: MIT

#include "ttoi/opinf_full.hpp"

#include <limits>
#include <utility>

#include "tt_internal.hpp"
#include "ttoi/lstsq.hpp"
#include "ttoi/opinf_rom.hpp"

namespace ttoi {

namespace {

std::vector<Index> augmented_sizes(const std::vector<Index>& dims) {
  std::vector<Index> aug(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) aug[k] = dims[k] + 1;
  return aug;
}

// Chains the cores of two trains into their outer product (boundary ranks 1).
TtTensor tt_outer(const TtTensor& a, const TtTensor& b) {
  std::vector<TtCore> cores = a.cores();
  cores.insert(cores.end(), b.cores().begin(), b.cores().end());
  return TtTensor(std::move(cores));
}

}  // namespace

Eigen::MatrixXd FullOperators::f_dense() const {
  if (representation != OpRep::dense) {
    throw InvalidInputError("f_dense: dense representation only");
  }
  const Index n = state_size();
  if (n * n > detail::kFullCapacity / n) {
    throw CapacityError("f_dense: explicit quadratic matrix over budget");
  }
  if (f_right.size() == 0) return f_left;
  return f_left * f_right;
}

DenseTensor assemble_data_tensor(const SnapshotSet& x) {
  const std::vector<Index>& dims = x.state_dims;
  const std::vector<Index> aug = augmented_sizes(dims);
  std::vector<Index> shape = dims;
  shape.insert(shape.end(), aug.begin(), aug.end());
  shape.push_back(x.count);

  const Index total = DenseTensor::checked_size(shape);
  if (total > detail::kFullCapacity) {
    throw CapacityError(
        "assemble_data_tensor: dense layout over budget, use the "
        "tensor-train mode");
  }

  const Index nstate = x.state_size();
  const Index naug = total / (nstate * x.count);
  const auto m = x.matrix();  // nstate x count

  DenseTensor d(shape);
  std::vector<Index> ai(dims.size());
  for (Index a = 0; a < naug; ++a) {
    Index rem = a;
    bool all_zero = true, all_pos = true;
    for (Index k = static_cast<Index>(dims.size()) - 1; k >= 0; --k) {
      ai[static_cast<std::size_t>(k)] = rem % aug[static_cast<std::size_t>(k)];
      rem /= aug[static_cast<std::size_t>(k)];
      if (ai[static_cast<std::size_t>(k)] != 0) all_zero = false;
      if (ai[static_cast<std::size_t>(k)] == 0) all_pos = false;
    }
    if (!all_zero && !all_pos) continue;
    Index shifted = 0;
    if (all_pos) {
      for (std::size_t k = 0; k < dims.size(); ++k) {
        shifted = shifted * dims[k] + (ai[k] - 1);
      }
    }
    for (Index s = 0; s < nstate; ++s) {
      double* row = d.data() + (s * naug + a) * x.count;
      for (Index t = 0; t < x.count; ++t) {
        row[t] = all_zero ? m(s, t) : m(s, t) * m(shifted, t);
      }
    }
  }
  return d;
}

TtTensor assemble_data_tensor(const TtTensor& x_tt, TruncationTol tol) {
  const Index d = x_tt.ndims() - 1;
  if (d < 1) throw ShapeError("assemble_data_tensor: need state + time modes");
  const auto& xc = x_tt.cores();
  const TtCore& gt = xc[static_cast<std::size_t>(d)];
  const Index rd = gt.r0;
  const Index count = gt.n;

  // Snapshots at augmented index zero: identity-carry cores elsewhere zero.
  std::vector<TtCore> lin(xc.begin(), xc.begin() + d);
  for (Index k = 0; k < d; ++k) {
    TtCore e(rd, xc[static_cast<std::size_t>(k)].n + 1, rd);
    for (Index a = 0; a < rd; ++a) e.at(a, 0, a) = 1.0;
    lin.push_back(std::move(e));
  }
  lin.push_back(gt);

  // Kronecker square at augmented indices >= 1: the second chain carries the
  // first chain's closing rank passively, and one time core takes the
  // product of the two copies.
  std::vector<TtCore> quad(xc.begin(), xc.begin() + d);
  for (Index k = 0; k < d; ++k) {
    const TtCore& g = xc[static_cast<std::size_t>(k)];
    TtCore h(rd * g.r0, g.n + 1, rd * g.r1);
    for (Index a = 0; a < rd; ++a) {
      for (Index b0 = 0; b0 < g.r0; ++b0) {
        for (Index j = 0; j < g.n; ++j) {
          for (Index b1 = 0; b1 < g.r1; ++b1) {
            h.at(a * g.r0 + b0, j + 1, a * g.r1 + b1) = g.at(b0, j, b1);
          }
        }
      }
    }
    quad.push_back(std::move(h));
  }
  TtCore t2(rd * rd, count, 1);
  for (Index a = 0; a < rd; ++a) {
    for (Index b = 0; b < rd; ++b) {
      for (Index t = 0; t < count; ++t) {
        t2.at(a * rd + b, t, 0) = gt.at(a, t, 0) * gt.at(b, t, 0);
      }
    }
  }
  quad.push_back(std::move(t2));

  TtTensor sum = tt_add(TtTensor(std::move(lin)), TtTensor(std::move(quad)));
  return round(sum, tol);
}

DenseTensor derivative_tensor(const SnapshotSet& x, int stencil_order) {
  const Eigen::MatrixXd series = x.matrix().transpose();  // count x nstate
  const Eigen::MatrixXd ddt = derivative_targets(series, x.dt, stencil_order);
  std::vector<Index> shape = x.state_dims;
  shape.push_back(x.count);
  DenseTensor out(shape);
  RowMatrixMap(out.data(), x.state_size(), x.count) = ddt.transpose();
  return out;
}

FullOperators ft_learn(const SnapshotSet& x, double gamma, int stencil_order) {
  const Index n = x.state_size();
  if (n > 4096) {
    throw CapacityError("ft_learn: state too large for the dense path");
  }
  if (x.count * (n + n * n) > detail::kFullCapacity) {
    throw CapacityError("ft_learn: design matrix over budget");
  }

  const Eigen::MatrixXd series = x.matrix().transpose();  // count x n
  const Eigen::MatrixXd design = build_design(series);    // count x (n + n^2)
  const Eigen::MatrixXd targets =
      derivative_targets(series, x.dt, stencil_order);

  const auto svd = detail::svd_econ(design);
  // Dimension-aware noise cutoff: computed singular values of a K x M
  // matricization carry roundoff at the max(K, M) * eps scale.
  const double floor_rel =
      std::max(detail::kPinvFloorRel,
               static_cast<double>(std::max(design.rows(), design.cols())) *
                   std::numeric_limits<double>::epsilon());
  const Index rank = detail::truncation_rank(svd.s, 0.0, floor_rel);
  Eigen::VectorXd w(rank);
  for (Index i = 0; i < rank; ++i) {
    const double s = svd.s(i);
    w(i) = gamma > 0.0 ? s / (s * s + gamma) : 1.0 / s;
  }

  // O = targets^T U diag(w) V^T, kept factored so the quadratic block never
  // materializes at full size.
  const Eigen::MatrixXd coeff =
      targets.transpose() * svd.u.leftCols(rank) * w.asDiagonal();  // n x rank

  FullOperators ops;
  ops.representation = OpRep::dense;
  ops.state_dims = x.state_dims;
  ops.a = coeff * svd.v.topRows(n).leftCols(rank).transpose();
  ops.f_left = coeff;
  ops.f_right = svd.v.bottomRows(n * n).leftCols(rank).transpose();
  return ops;
}

FullOperators tt_learn_from(const TtTensor& x_tt, double dt, TruncationTol tol,
                            double gamma, int stencil_order) {
  const Index d = x_tt.ndims() - 1;
  if (d < 1) throw ShapeError("tt_learn_from: need state + time modes");

  const TtTensor data = assemble_data_tensor(x_tt, tol);
  const TtTensor targets = derivative_targets(x_tt, dt, stencil_order);
  OperatorTensor o;
  o.representation = OpRep::tt;
  o.state_modes = d;
  o.tt = tt_ls_solve(data, targets, gamma);
  return extract_operators(o);
}

FullOperators tt_learn(const SnapshotSet& x, TruncationTol tol, double gamma,
                       int stencil_order) {
  const TtTensor x_tt = tt_svd(x.tensor(), tol);
  return tt_learn_from(x_tt, x.dt, tol, gamma, stencil_order);
}

std::vector<Index> qtt_modes(const SnapshotSet& x, FactorPolicy policy,
                             Index merge_cap) {
  std::vector<Index> modes;
  if (x.layout == SnapshotSet::Layout::unstructured &&
      x.state_dims.size() == 2 && x.state_dims[1] > 1) {
    modes = quantized_factors(x.state_dims[0], policy, merge_cap);
    modes.push_back(x.state_dims[1]);
  } else {
    modes = quantized_factors(x.state_size(), policy, merge_cap);
  }
  return modes;
}

FullOperators qtt_learn(const SnapshotSet& x, TruncationTol tol, double gamma,
                        FactorPolicy policy, int stencil_order,
                        Index merge_cap) {
  std::vector<Index> shape = qtt_modes(x, policy, merge_cap);
  shape.push_back(x.count);
  const DenseTensor reshaped = x.tensor().reshaped(std::move(shape));
  const TtTensor x_tt = tt_svd(reshaped, tol);
  return tt_learn_from(x_tt, x.dt, tol, gamma, stencil_order);
}

FullOperators extract_operators(const OperatorTensor& o) {
  FullOperators ops;
  ops.representation = o.representation;

  if (o.representation == OpRep::dense) {
    const std::vector<Index>& shape = o.dense.shape();
    const Index d =
        o.state_modes > 0 ? o.state_modes : o.dense.ndims() / 3;
    if (o.dense.ndims() != 3 * d) {
      throw ShapeError("extract_operators: expected out/in/augmented groups");
    }
    std::vector<Index> dims(shape.begin(), shape.begin() + d);
    for (Index k = 0; k < d; ++k) {
      if (shape[static_cast<std::size_t>(d + k)] != dims[static_cast<std::size_t>(k)] ||
          shape[static_cast<std::size_t>(2 * d + k)] !=
              dims[static_cast<std::size_t>(k)] + 1) {
        throw ShapeError("extract_operators: group sizes disagree");
      }
    }
    const Index n = DenseTensor::checked_size(dims);
    Index naug = 1;
    for (Index k = 0; k < d; ++k) naug *= dims[static_cast<std::size_t>(k)] + 1;

    ops.state_dims = dims;
    ops.a.resize(n, n);
    Eigen::MatrixXd f(n, n * n);
    std::vector<Index> qi(static_cast<std::size_t>(d));
    for (Index out = 0; out < n; ++out) {
      for (Index in = 0; in < n; ++in) {
        const double* block = o.dense.data() + (out * n + in) * naug;
        ops.a(out, in) = block[0];
        for (Index q = 0; q < n; ++q) {
          Index rem = q;
          for (Index k = d - 1; k >= 0; --k) {
            qi[static_cast<std::size_t>(k)] =
                rem % dims[static_cast<std::size_t>(k)];
            rem /= dims[static_cast<std::size_t>(k)];
          }
          Index aug_flat = 0;
          for (Index k = 0; k < d; ++k) {
            aug_flat = aug_flat * (dims[static_cast<std::size_t>(k)] + 1) +
                       qi[static_cast<std::size_t>(k)] + 1;
          }
          f(out, in * n + q) = block[aug_flat];
        }
      }
    }
    ops.f_left = std::move(f);
    return ops;
  }

  const Index d = o.state_modes > 0 ? o.state_modes : o.tt.ndims() / 3;
  if (o.tt.ndims() != 3 * d) {
    throw ShapeError("extract_operators: expected out/in/augmented groups");
  }
  const auto& cores = o.tt.cores();
  const std::vector<Index> sizes = o.tt.mode_sizes();
  for (Index k = 0; k < d; ++k) {
    if (sizes[static_cast<std::size_t>(d + k)] !=
            sizes[static_cast<std::size_t>(k)] ||
        sizes[static_cast<std::size_t>(2 * d + k)] !=
            sizes[static_cast<std::size_t>(k)] + 1) {
      throw ShapeError("extract_operators: group sizes disagree");
    }
  }
  ops.state_dims.assign(sizes.begin(), sizes.begin() + d);

  // Linear part: freeze every augmented core at index zero and fold the
  // resulting rank matrices into the last input core.
  Eigen::MatrixXd m = Eigen::MatrixXd(
      cores[static_cast<std::size_t>(2 * d)].slice(0));
  for (Index k = 2 * d + 1; k < 3 * d; ++k) {
    m = m * cores[static_cast<std::size_t>(k)].slice(0);
  }
  std::vector<TtCore> ac(cores.begin(), cores.begin() + 2 * d);
  ac.back() = detail::absorb_right(ac.back(), m);
  ops.a_tt = TtTensor(std::move(ac));

  // Quadratic part: drop augmented index zero, shifting the rest down.
  std::vector<TtCore> fc(cores.begin(), cores.end());
  for (Index k = 2 * d; k < 3 * d; ++k) {
    const TtCore& g = cores[static_cast<std::size_t>(k)];
    TtCore trimmed(g.r0, g.n - 1, g.r1);
    for (Index i = 0; i < g.r0; ++i) {
      for (Index j = 1; j < g.n; ++j) {
        for (Index l = 0; l < g.r1; ++l) {
          trimmed.at(i, j - 1, l) = g.at(i, j, l);
        }
      }
    }
    fc[static_cast<std::size_t>(k)] = std::move(trimmed);
  }
  ops.f_tt = TtTensor(std::move(fc));
  return ops;
}

Eigen::VectorXd full_rhs(const FullOperators& ops, const Eigen::VectorXd& x) {
  if (ops.representation != OpRep::dense) {
    throw InvalidInputError("full_rhs: dense state needs dense operators");
  }
  const Index n = x.size();
  Eigen::VectorXd xx(n * n);
  RowMatrixMap(xx.data(), n, n) = x * x.transpose();
  if (ops.f_right.size() == 0) return ops.a * x + ops.f_left * xx;
  return ops.a * x + ops.f_left * (ops.f_right * xx);
}

TtTensor full_rhs(const FullOperators& ops, const TtTensor& x,
                  TruncationTol tol) {
  if (ops.representation != OpRep::tt) {
    throw InvalidInputError("full_rhs: tensor-train state needs tt operators");
  }
  const Index d = x.ndims();
  TtTensor lin = tt_contract(ops.a_tt, x, d, d);
  TtTensor quad = tt_contract(ops.f_tt, tt_outer(x, x), d, 2 * d);
  return round(tt_add(lin, quad), tol);
}

TtTensor snapshot_state(const TtTensor& x_tt, Index k) {
  const Index d = x_tt.ndims() - 1;
  if (d < 1) throw ShapeError("snapshot_state: need state + time modes");
  const TtCore& gt = x_tt.cores().back();
  if (k < 0 || k >= gt.n) {
    throw InvalidInputError("snapshot_state: time index out of range");
  }
  std::vector<TtCore> cores(x_tt.cores().begin(), x_tt.cores().begin() + d);
  cores.back() =
      detail::absorb_right(cores.back(), Eigen::MatrixXd(gt.slice(k)));
  return TtTensor(std::move(cores));
}

}  // namespace ttoi
