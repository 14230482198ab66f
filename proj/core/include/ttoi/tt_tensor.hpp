// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "ttoi/dense_tensor.hpp"

namespace ttoi {

/// Relative Frobenius truncation tolerance; 0 keeps everything exact.
struct TruncationTol {
  double epsilon = 0.0;
};

/// One 3-way tensor-train core, stored row-major as (r0, n, r1) with the
/// right rank index fastest. Both standard unfoldings are plain views.
struct TtCore {
  Index r0 = 1;
  Index n = 0;
  Index r1 = 1;
  std::vector<double> a;

  TtCore() = default;
  TtCore(Index left_rank, Index mode, Index right_rank)
      : r0(left_rank),
        n(mode),
        r1(right_rank),
        a(static_cast<std::size_t>(left_rank * mode * right_rank), 0.0) {
    if (r0 <= 0 || n <= 0 || r1 <= 0) {
      throw ShapeError("TtCore: nonpositive dimension");
    }
  }

  [[nodiscard]] Index size() const { return r0 * n * r1; }

  [[nodiscard]] double at(Index i, Index j, Index k) const {
    return a[static_cast<std::size_t>((i * n + j) * r1 + k)];
  }
  double& at(Index i, Index j, Index k) {
    return a[static_cast<std::size_t>((i * n + j) * r1 + k)];
  }

  /// (r0*n) x r1 view.
  [[nodiscard]] RowMatrixMap left() {
    return RowMatrixMap(a.data(), r0 * n, r1);
  }
  [[nodiscard]] ConstRowMatrixMap left() const {
    return ConstRowMatrixMap(a.data(), r0 * n, r1);
  }

  /// r0 x (n*r1) view.
  [[nodiscard]] RowMatrixMap right() {
    return RowMatrixMap(a.data(), r0, n * r1);
  }
  [[nodiscard]] ConstRowMatrixMap right() const {
    return ConstRowMatrixMap(a.data(), r0, n * r1);
  }

  /// r0 x r1 slice at mode index j (strided view).
  [[nodiscard]] Eigen::Map<const RowMatrix, 0, Eigen::OuterStride<>> slice(
      Index j) const {
    return {a.data() + j * r1, r0, r1, Eigen::OuterStride<>(n * r1)};
  }
};

/// Tensor-train decomposition: a chain of 3-way cores with boundary ranks 1.
class TtTensor {
 public:
  TtTensor() = default;
  explicit TtTensor(std::vector<TtCore> cores) : cores_(std::move(cores)) {
    validate();
  }

  /// Rank-one representation of the all-`value` tensor.
  static TtTensor constant(const std::vector<Index>& modes, double value);
  static TtTensor zero(const std::vector<Index>& modes) {
    return constant(modes, 0.0);
  }

  [[nodiscard]] Index ndims() const {
    return static_cast<Index>(cores_.size());
  }
  [[nodiscard]] std::vector<Index> mode_sizes() const;
  /// Internal ranks r_1..r_{d-1}.
  [[nodiscard]] std::vector<Index> ranks() const;
  [[nodiscard]] Index max_rank() const;
  [[nodiscard]] Index element_count() const;

  [[nodiscard]] const TtCore& core(Index k) const {
    return cores_[static_cast<std::size_t>(k)];
  }
  TtCore& core(Index k) { return cores_[static_cast<std::size_t>(k)]; }
  [[nodiscard]] const std::vector<TtCore>& cores() const { return cores_; }
  std::vector<TtCore>& cores() { return cores_; }

  /// Single-entry evaluation by chain multiplication.
  [[nodiscard]] double entry(std::span<const Index> idx) const;

  void validate() const;

 private:
  std::vector<TtCore> cores_;
};

/// Sequential SVD compression of a dense tensor. Per-unfolding threshold is
/// delta = epsilon * ||x||_F / sqrt(d - 1); singular values strictly above
/// delta are kept (at least one per split).
TtTensor tt_svd(const DenseTensor& x, TruncationTol tol);

/// Dense materialization. Throws CapacityError above the element budget.
DenseTensor full(const TtTensor& t);

/// Rank re-truncation: right-to-left orthogonalization sweep followed by a
/// left-to-right truncated-SVD sweep at the tt_svd threshold rule.
TtTensor round(const TtTensor& t, TruncationTol tol);

/// Left-orthogonalizes a chain: old chain = new chain * R. The returned
/// cores have orthonormal columns in their (r0*n) x r1 unfoldings.
std::pair<std::vector<TtCore>, Eigen::MatrixXd> orthogonalize_left(
    std::span<const TtCore> cores);

/// Right-orthogonalizes a chain: old chain = L * new chain. The returned
/// cores have orthonormal rows in their r0 x (n*r1) unfoldings.
std::pair<std::vector<TtCore>, Eigen::MatrixXd> orthogonalize_right(
    std::span<const TtCore> cores);

/// Elementwise sum; ranks add blockwise.
TtTensor tt_add(const TtTensor& a, const TtTensor& b);

/// Scalar multiple.
TtTensor tt_scale(const TtTensor& a, double c);

/// Elementwise (Hadamard) product; ranks multiply.
TtTensor tt_hadamard(const TtTensor& a, const TtTensor& b);

/// Contracts the trailing `in_modes` modes of `op` against all modes of `x`;
/// the leading `out_modes` modes survive. Requires out_modes >= 1 and
/// op.ndims() == out_modes + in_modes.
TtTensor tt_contract(const TtTensor& op, const TtTensor& x, Index out_modes,
                     Index in_modes);

/// Frobenius norm via an orthogonalization sweep (no materialization).
double tt_norm(const TtTensor& t);

}  // namespace ttoi
