// SPDX-License-Identifier: MIT

#include "ttoi/tt_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "tt_internal.hpp"

namespace ttoi {
namespace detail {

SvdEcon svd_econ(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdEcon out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  for (Index c = 0; c < out.u.cols(); ++c) {
    Index imax = 0;
    out.u.col(c).cwiseAbs().maxCoeff(&imax);
    if (out.u(imax, c) < 0.0) {
      out.u.col(c) *= -1.0;
      out.v.col(c) *= -1.0;
    }
  }
  return out;
}

Index truncation_rank(const Eigen::VectorXd& s, double delta, double floor_rel,
                      Index min_rank) {
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double threshold = std::max(delta, smax * floor_rel);
  Index rank = 0;
  while (rank < s.size() && s(rank) > threshold) ++rank;
  rank = std::max(rank, std::min<Index>(min_rank, s.size()));
  return rank;
}

TtCore absorb_left(const Eigen::MatrixXd& m, const TtCore& core) {
  if (m.cols() != core.r0) throw ShapeError("absorb_left: rank mismatch");
  TtCore out(m.rows(), core.n, core.r1);
  out.right() = m * core.right();
  return out;
}

TtCore absorb_right(const TtCore& core, const Eigen::MatrixXd& m) {
  if (m.rows() != core.r1) throw ShapeError("absorb_right: rank mismatch");
  TtCore out(core.r0, core.n, m.cols());
  out.left() = core.left() * m;
  return out;
}

TtCore merge_pair(const TtCore& a, const TtCore& b) {
  if (a.r1 != b.r0) throw ShapeError("merge_pair: rank mismatch");
  TtCore fused(a.r0, a.n * b.n, b.r1);
  // fused viewed as (a.r0*a.n) x (b.n*b.r1) equals left(a) * right(b)
  RowMatrixMap view(fused.a.data(), a.r0 * a.n, b.n * b.r1);
  view = a.left() * b.right();
  return fused;
}

std::pair<TtCore, TtCore> split_pair(const TtCore& fused, Index na, Index nb,
                                     double delta_abs, AbsorbSide side) {
  if (fused.n != na * nb) throw ShapeError("split_pair: mode size mismatch");
  ConstRowMatrixMap m(fused.a.data(), fused.r0 * na, nb * fused.r1);
  SvdEcon svd = svd_econ(m);
  const Index rank = truncation_rank(svd.s, delta_abs, kSigmaFloorRel);
  TtCore left(fused.r0, na, rank);
  TtCore right(rank, nb, fused.r1);
  RowMatrix vt;  // rank x (nb*r1), flat row-major == (rank, nb, r1) core
  if (side == AbsorbSide::left) {
    left.left() = svd.u.leftCols(rank) * svd.s.head(rank).asDiagonal();
    vt = svd.v.leftCols(rank).transpose();
  } else {
    left.left() = svd.u.leftCols(rank);
    vt = svd.s.head(rank).asDiagonal() * svd.v.leftCols(rank).transpose();
  }
  std::copy(vt.data(), vt.data() + vt.size(), right.a.begin());
  return {std::move(left), std::move(right)};
}

std::pair<TtCore, TtCore> swap_pair(const TtCore& a, const TtCore& b,
                                    AbsorbSide side) {
  TtCore fused = merge_pair(a, b);
  TtCore permuted(a.r0, b.n * a.n, b.r1);
  for (Index al = 0; al < a.r0; ++al) {
    for (Index i = 0; i < a.n; ++i) {
      for (Index j = 0; j < b.n; ++j) {
        const Index src = (al * fused.n + i * b.n + j) * b.r1;
        const Index dst = (al * fused.n + j * a.n + i) * b.r1;
        std::memcpy(permuted.a.data() + dst, fused.a.data() + src,
                    sizeof(double) * static_cast<std::size_t>(b.r1));
      }
    }
  }
  return split_pair(permuted, b.n, a.n, 0.0, side);
}

Eigen::MatrixXd orthogonalize_left_inplace(std::vector<TtCore>& cores) {
  Eigen::MatrixXd r;
  for (std::size_t k = 0; k < cores.size(); ++k) {
    TtCore& c = cores[k];
    Eigen::MatrixXd m = c.left();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    const Index q = std::min(m.rows(), m.cols());
    Eigen::MatrixXd qmat =
        qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), q);
    r = Eigen::MatrixXd(qr.matrixQR()
                            .topRows(q)
                            .triangularView<Eigen::Upper>());
    TtCore replaced(c.r0, c.n, q);
    replaced.left() = qmat;
    cores[k] = std::move(replaced);
    if (k + 1 < cores.size()) {
      cores[k + 1] = absorb_left(r, cores[k + 1]);
    }
  }
  return r;
}

Eigen::MatrixXd orthogonalize_right_inplace(std::vector<TtCore>& cores) {
  Eigen::MatrixXd l;
  for (std::size_t k = cores.size(); k-- > 0;) {
    TtCore& c = cores[k];
    Eigen::MatrixXd mt = c.right().transpose();  // (n*r1) x r0
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(mt);
    const Index q = std::min(mt.rows(), mt.cols());
    Eigen::MatrixXd qmat =
        qr.householderQ() * Eigen::MatrixXd::Identity(mt.rows(), q);
    Eigen::MatrixXd rmat = qr.matrixQR()
                               .topRows(q)
                               .triangularView<Eigen::Upper>();
    l = rmat.transpose();  // r0 x q
    TtCore replaced(q, c.n, c.r1);
    replaced.right() = qmat.transpose();
    cores[k] = std::move(replaced);
    if (k > 0) {
      cores[k - 1] = absorb_right(cores[k - 1], l);
    }
  }
  return l;
}

std::vector<TtCore> interface_to_front(std::vector<TtCore> cores) {
  if (cores.empty()) throw InvalidInputError("interface_to_front: empty chain");
  const Index q = cores.back().r1;
  TtCore eye(q, q, 1);
  for (Index s = 0; s < q; ++s) eye.at(s, s, 0) = 1.0;
  cores.push_back(std::move(eye));
  // bubble the appended interface mode to the front
  for (std::size_t pos = cores.size() - 1; pos > 0; --pos) {
    auto [lft, rgt] =
        swap_pair(cores[pos - 1], cores[pos], AbsorbSide::left);
    cores[pos - 1] = std::move(lft);
    cores[pos] = std::move(rgt);
  }
  // fold the leading (1, q, t) core into its neighbour as a left rank
  Eigen::MatrixXd mq =
      ConstRowMatrixMap(cores[0].a.data(), cores[0].n, cores[0].r1);
  std::vector<TtCore> out;
  out.reserve(cores.size() - 1);
  out.push_back(absorb_left(mq, cores[1]));
  for (std::size_t k = 2; k < cores.size(); ++k) {
    out.push_back(std::move(cores[k]));
  }
  return out;
}

std::vector<TtCore> interface_to_back(std::vector<TtCore> cores) {
  if (cores.empty()) throw InvalidInputError("interface_to_back: empty chain");
  const Index q = cores.front().r0;
  TtCore eye(1, q, q);
  for (Index s = 0; s < q; ++s) eye.at(0, s, s) = 1.0;
  cores.insert(cores.begin(), std::move(eye));
  for (std::size_t pos = 0; pos + 1 < cores.size(); ++pos) {
    auto [lft, rgt] =
        swap_pair(cores[pos], cores[pos + 1], AbsorbSide::right);
    cores[pos] = std::move(lft);
    cores[pos + 1] = std::move(rgt);
  }
  // fold the trailing (t, q, 1) core into its neighbour as a right rank
  const TtCore& tail = cores.back();
  Eigen::MatrixXd mq = ConstRowMatrixMap(tail.a.data(), tail.r0, tail.n);
  std::vector<TtCore> out;
  out.reserve(cores.size() - 1);
  for (std::size_t k = 0; k + 2 < cores.size(); ++k) {
    out.push_back(std::move(cores[k]));
  }
  out.push_back(absorb_right(cores[cores.size() - 2], mq));
  return out;
}

}  // namespace detail

TtTensor TtTensor::constant(const std::vector<Index>& modes, double value) {
  if (modes.empty()) throw InvalidInputError("TtTensor: no modes");
  std::vector<TtCore> cores;
  cores.reserve(modes.size());
  for (std::size_t k = 0; k < modes.size(); ++k) {
    TtCore c(1, modes[k], 1);
    std::fill(c.a.begin(), c.a.end(), k == 0 ? value : 1.0);
    cores.push_back(std::move(c));
  }
  return TtTensor(std::move(cores));
}

std::vector<Index> TtTensor::mode_sizes() const {
  std::vector<Index> out(cores_.size());
  for (std::size_t k = 0; k < cores_.size(); ++k) out[k] = cores_[k].n;
  return out;
}

std::vector<Index> TtTensor::ranks() const {
  std::vector<Index> out;
  for (std::size_t k = 0; k + 1 < cores_.size(); ++k) {
    out.push_back(cores_[k].r1);
  }
  return out;
}

Index TtTensor::max_rank() const {
  Index m = 1;
  for (const auto& c : cores_) m = std::max({m, c.r0, c.r1});
  return m;
}

Index TtTensor::element_count() const {
  Index total = 1;
  for (const auto& c : cores_) {
    if (total > (Index{1} << 62) / c.n) {
      throw CapacityError("TtTensor: element count overflow");
    }
    total *= c.n;
  }
  return total;
}

double TtTensor::entry(std::span<const Index> idx) const {
  if (static_cast<Index>(idx.size()) != ndims()) {
    throw ShapeError("TtTensor::entry: index arity mismatch");
  }
  Eigen::RowVectorXd v = cores_[0].slice(idx[0]);
  for (std::size_t k = 1; k < cores_.size(); ++k) {
    v = v * cores_[k].slice(idx[k]);
  }
  return v(0);
}

void TtTensor::validate() const {
  if (cores_.empty()) throw ShapeError("TtTensor: no cores");
  if (cores_.front().r0 != 1 || cores_.back().r1 != 1) {
    throw ShapeError("TtTensor: boundary ranks must be 1");
  }
  for (std::size_t k = 0; k + 1 < cores_.size(); ++k) {
    if (cores_[k].r1 != cores_[k + 1].r0) {
      throw ShapeError("TtTensor: adjacent rank mismatch");
    }
  }
}

TtTensor tt_svd(const DenseTensor& x, TruncationTol tol) {
  const Index d = x.ndims();
  if (d == 0) throw InvalidInputError("tt_svd: zero-dimensional input");
  const auto& shape = x.shape();
  const double delta =
      tol.epsilon * x.frobenius_norm() / std::sqrt(std::max<Index>(d - 1, 1));

  std::vector<TtCore> cores;
  cores.reserve(static_cast<std::size_t>(d));
  std::vector<double> w = x.values();
  Index r = 1;
  Index rest = x.size();
  for (Index k = 0; k + 1 < d; ++k) {
    const Index nk = shape[static_cast<std::size_t>(k)];
    rest /= nk;
    ConstRowMatrixMap m(w.data(), r * nk, rest);
    detail::SvdEcon svd = detail::svd_econ(m);
    const Index rank =
        detail::truncation_rank(svd.s, delta, detail::kSigmaFloorRel);
    TtCore core(r, nk, rank);
    core.left() = svd.u.leftCols(rank);
    cores.push_back(std::move(core));
    RowMatrix carry =
        svd.s.head(rank).asDiagonal() * svd.v.leftCols(rank).transpose();
    w.assign(carry.data(), carry.data() + carry.size());
    r = rank;
  }
  TtCore last(r, shape[static_cast<std::size_t>(d - 1)], 1);
  std::copy(w.begin(), w.end(), last.a.begin());
  cores.push_back(std::move(last));
  return TtTensor(std::move(cores));
}

DenseTensor full(const TtTensor& t) {
  const Index total = t.element_count();
  if (total > detail::kFullCapacity) {
    throw CapacityError("full: element count exceeds budget");
  }
  RowMatrix b = t.core(0).left();  // (n0) x r1 since r0 == 1
  for (Index k = 1; k < t.ndims(); ++k) {
    const TtCore& c = t.core(k);
    RowMatrix next(b.rows(), c.n * c.r1);
    next = b * c.right();
    b = RowMatrixMap(next.data(), b.rows() * c.n, c.r1);
  }
  std::vector<double> data(b.data(), b.data() + total);
  return DenseTensor(t.mode_sizes(), std::move(data));
}

TtTensor round(const TtTensor& t, TruncationTol tol) {
  std::vector<TtCore> cores = t.cores();
  Eigen::MatrixXd lead = detail::orthogonalize_right_inplace(cores);
  cores[0] = detail::absorb_left(lead, cores[0]);
  const double norm = lead.norm();
  const double delta = tol.epsilon * norm /
                       std::sqrt(std::max<Index>(t.ndims() - 1, 1));
  for (std::size_t k = 0; k + 1 < cores.size(); ++k) {
    detail::SvdEcon svd = detail::svd_econ(cores[k].left());
    const Index rank =
        detail::truncation_rank(svd.s, delta, detail::kSigmaFloorRel);
    TtCore replaced(cores[k].r0, cores[k].n, rank);
    replaced.left() = svd.u.leftCols(rank);
    Eigen::MatrixXd carry =
        svd.s.head(rank).asDiagonal() * svd.v.leftCols(rank).transpose();
    cores[k] = std::move(replaced);
    cores[k + 1] = detail::absorb_left(carry, cores[k + 1]);
  }
  return TtTensor(std::move(cores));
}

std::pair<std::vector<TtCore>, Eigen::MatrixXd> orthogonalize_left(
    std::span<const TtCore> cores) {
  std::vector<TtCore> chain(cores.begin(), cores.end());
  Eigen::MatrixXd r = detail::orthogonalize_left_inplace(chain);
  return {std::move(chain), std::move(r)};
}

std::pair<std::vector<TtCore>, Eigen::MatrixXd> orthogonalize_right(
    std::span<const TtCore> cores) {
  std::vector<TtCore> chain(cores.begin(), cores.end());
  Eigen::MatrixXd l = detail::orthogonalize_right_inplace(chain);
  return {std::move(chain), std::move(l)};
}

TtTensor tt_add(const TtTensor& a, const TtTensor& b) {
  if (a.mode_sizes() != b.mode_sizes()) {
    throw ShapeError("tt_add: mode sizes differ");
  }
  const Index d = a.ndims();
  if (d == 1) {
    TtCore c = a.core(0);
    for (std::size_t i = 0; i < c.a.size(); ++i) c.a[i] += b.core(0).a[i];
    return TtTensor({std::move(c)});
  }
  std::vector<TtCore> cores;
  cores.reserve(static_cast<std::size_t>(d));
  for (Index k = 0; k < d; ++k) {
    const TtCore& ca = a.core(k);
    const TtCore& cb = b.core(k);
    const Index r0 = (k == 0) ? 1 : ca.r0 + cb.r0;
    const Index r1 = (k == d - 1) ? 1 : ca.r1 + cb.r1;
    TtCore c(r0, ca.n, r1);
    for (Index j = 0; j < ca.n; ++j) {
      for (Index i = 0; i < ca.r0; ++i) {
        for (Index l = 0; l < ca.r1; ++l) {
          c.at(i, j, l) = ca.at(i, j, l);
        }
      }
      const Index ioff = (k == 0) ? 0 : ca.r0;
      const Index loff = (k == d - 1) ? 0 : ca.r1;
      for (Index i = 0; i < cb.r0; ++i) {
        for (Index l = 0; l < cb.r1; ++l) {
          c.at(ioff + i, j, loff + l) = cb.at(i, j, l);
        }
      }
    }
    cores.push_back(std::move(c));
  }
  return TtTensor(std::move(cores));
}

TtTensor tt_scale(const TtTensor& a, double c) {
  std::vector<TtCore> cores = a.cores();
  for (double& v : cores[0].a) v *= c;
  return TtTensor(std::move(cores));
}

TtTensor tt_hadamard(const TtTensor& a, const TtTensor& b) {
  if (a.mode_sizes() != b.mode_sizes()) {
    throw ShapeError("tt_hadamard: mode sizes differ");
  }
  std::vector<TtCore> cores;
  cores.reserve(static_cast<std::size_t>(a.ndims()));
  for (Index k = 0; k < a.ndims(); ++k) {
    const TtCore& ca = a.core(k);
    const TtCore& cb = b.core(k);
    TtCore c(ca.r0 * cb.r0, ca.n, ca.r1 * cb.r1);
    for (Index j = 0; j < ca.n; ++j) {
      for (Index ia = 0; ia < ca.r0; ++ia) {
        for (Index ib = 0; ib < cb.r0; ++ib) {
          for (Index la = 0; la < ca.r1; ++la) {
            const double va = ca.at(ia, j, la);
            if (va == 0.0) continue;
            for (Index lb = 0; lb < cb.r1; ++lb) {
              c.at(ia * cb.r0 + ib, j, la * cb.r1 + lb) =
                  va * cb.at(ib, j, lb);
            }
          }
        }
      }
    }
    cores.push_back(std::move(c));
  }
  return TtTensor(std::move(cores));
}

TtTensor tt_contract(const TtTensor& op, const TtTensor& x, Index out_modes,
                     Index in_modes) {
  if (out_modes < 1 || in_modes < 1 ||
      op.ndims() != out_modes + in_modes || x.ndims() != in_modes) {
    throw ShapeError("tt_contract: mode count mismatch");
  }
  for (Index j = 0; j < in_modes; ++j) {
    if (op.core(out_modes + j).n != x.core(j).n) {
      throw ShapeError("tt_contract: contracted mode sizes differ");
    }
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(1, 1);
  for (Index j = in_modes; j-- > 0;) {
    const TtCore& oc = op.core(out_modes + j);
    const TtCore& xc = x.core(j);
    // z((bx0, i), g1) = sum_bx1 xc((bx0, i), bx1) * w(g1, bx1)
    RowMatrix z = xc.left() * w.transpose();
    ConstRowMatrixMap zv(z.data(), xc.r0, xc.n * oc.r1);
    w = oc.right() * zv.transpose();  // (g0 x bx0)
  }
  std::vector<TtCore> cores(op.cores().begin(),
                            op.cores().begin() + out_modes);
  cores[static_cast<std::size_t>(out_modes - 1)] =
      detail::absorb_right(cores[static_cast<std::size_t>(out_modes - 1)], w);
  return TtTensor(std::move(cores));
}

double tt_norm(const TtTensor& t) {
  std::vector<TtCore> cores = t.cores();
  Eigen::MatrixXd lead = detail::orthogonalize_right_inplace(cores);
  return lead.norm();
}

}  // namespace ttoi
