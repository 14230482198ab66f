// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "ttoi/errors.hpp"

namespace ttoi {

using Index = std::int64_t;
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixMap = Eigen::Map<RowMatrix>;
using ConstRowMatrixMap = Eigen::Map<const RowMatrix>;

/// Dense multiway array stored row-major: the last index varies fastest.
class DenseTensor {
 public:
  DenseTensor() = default;

  explicit DenseTensor(std::vector<Index> shape)
      : shape_(std::move(shape)), data_(checked_size(shape_), 0.0) {}

  DenseTensor(std::vector<Index> shape, std::vector<double> values)
      : shape_(std::move(shape)), data_(std::move(values)) {
    if (static_cast<Index>(data_.size()) != checked_size(shape_)) {
      throw ShapeError("DenseTensor: value count does not match shape");
    }
  }

  [[nodiscard]] const std::vector<Index>& shape() const { return shape_; }
  [[nodiscard]] Index ndims() const {
    return static_cast<Index>(shape_.size());
  }
  [[nodiscard]] Index size() const { return static_cast<Index>(data_.size()); }
  [[nodiscard]] const double* data() const { return data_.data(); }
  [[nodiscard]] double* data() { return data_.data(); }
  [[nodiscard]] const std::vector<double>& values() const { return data_; }

  [[nodiscard]] Index flat_index(std::span<const Index> idx) const {
    if (idx.size() != shape_.size()) {
      throw ShapeError("DenseTensor: index arity mismatch");
    }
    Index flat = 0;
    for (std::size_t k = 0; k < shape_.size(); ++k) {
      if (idx[k] < 0 || idx[k] >= shape_[k]) {
        throw InvalidInputError("DenseTensor: index out of range");
      }
      flat = flat * shape_[k] + idx[k];
    }
    return flat;
  }

  [[nodiscard]] double at(std::span<const Index> idx) const {
    return data_[static_cast<std::size_t>(flat_index(idx))];
  }
  double& at(std::span<const Index> idx) {
    return data_[static_cast<std::size_t>(flat_index(idx))];
  }
  [[nodiscard]] double operator[](Index flat) const {
    return data_[static_cast<std::size_t>(flat)];
  }
  double& operator[](Index flat) {
    return data_[static_cast<std::size_t>(flat)];
  }

  /// Reinterprets the flat buffer under a new shape with the same size.
  [[nodiscard]] DenseTensor reshaped(std::vector<Index> new_shape) const {
    DenseTensor out;
    out.shape_ = std::move(new_shape);
    if (checked_size(out.shape_) != size()) {
      throw ShapeError("DenseTensor: reshape changes element count");
    }
    out.data_ = data_;
    return out;
  }

  /// Matrix view grouping the first `split` modes as rows, the rest as
  /// columns. Row-major storage makes this a plain reinterpretation.
  [[nodiscard]] ConstRowMatrixMap unfold(Index split) const {
    auto [rows, cols] = unfold_dims(split);
    return ConstRowMatrixMap(data_.data(), rows, cols);
  }
  [[nodiscard]] RowMatrixMap unfold(Index split) {
    auto [rows, cols] = unfold_dims(split);
    return RowMatrixMap(data_.data(), rows, cols);
  }

  [[nodiscard]] double frobenius_norm() const {
    return Eigen::Map<const Eigen::VectorXd>(data_.data(),
                                             static_cast<Index>(data_.size()))
        .norm();
  }

  static Index checked_size(const std::vector<Index>& shape) {
    Index total = 1;
    for (Index n : shape) {
      if (n <= 0) throw ShapeError("DenseTensor: nonpositive mode size");
      if (total > (Index{1} << 62) / n) {
        throw CapacityError("DenseTensor: element count overflow");
      }
      total *= n;
    }
    return total;
  }

 private:
  std::pair<Index, Index> unfold_dims(Index split) const {
    if (split < 0 || split > ndims()) {
      throw InvalidInputError("DenseTensor: unfold split out of range");
    }
    Index rows = 1, cols = 1;
    for (Index k = 0; k < split; ++k) rows *= shape_[k];
    for (Index k = split; k < ndims(); ++k) cols *= shape_[k];
    return {rows, cols};
  }

  std::vector<Index> shape_;
  std::vector<double> data_;
};

}  // namespace ttoi
