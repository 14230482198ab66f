// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ttoi/dense_tensor.hpp"

namespace ttoi {

/// A uniformly sampled trajectory of state snapshots. In memory the values
/// form a (state_size x count) row-major matrix: the time index is fastest.
struct SnapshotSet {
  enum class Layout : std::uint8_t { structured = 1, unstructured = 2 };

  Layout layout = Layout::structured;
  std::vector<Index> state_dims;  // structured: grid modes; else {N} or {N,Nq}
  Index count = 0;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> data;

  SnapshotSet() = default;
  SnapshotSet(Layout l, std::vector<Index> dims, Index k, double start,
              double step)
      : layout(l),
        state_dims(std::move(dims)),
        count(k),
        t0(start),
        dt(step),
        data(static_cast<std::size_t>(DenseTensor::checked_size(state_dims) *
                                      k),
             0.0) {
    if (k <= 0) throw InvalidInputError("SnapshotSet: nonpositive count");
  }

  [[nodiscard]] Index state_size() const {
    return DenseTensor::checked_size(state_dims);
  }
  [[nodiscard]] double time_at(Index k) const { return t0 + dt * k; }

  [[nodiscard]] ConstRowMatrixMap matrix() const {
    return ConstRowMatrixMap(data.data(), state_size(), count);
  }
  [[nodiscard]] RowMatrixMap matrix() {
    return RowMatrixMap(data.data(), state_size(), count);
  }

  [[nodiscard]] Eigen::VectorXd snapshot(Index k) const {
    return matrix().col(k);
  }
  void set_snapshot(Index k, const Eigen::VectorXd& v) {
    if (v.size() != state_size()) {
      throw ShapeError("SnapshotSet: snapshot size mismatch");
    }
    matrix().col(k) = v;
  }

  /// Copy of snapshots [k0, k1).
  [[nodiscard]] SnapshotSet window(Index k0, Index k1) const {
    if (k0 < 0 || k1 > count || k0 >= k1) {
      throw InvalidInputError("SnapshotSet: bad window");
    }
    SnapshotSet out(layout, state_dims, k1 - k0, time_at(k0), dt);
    out.matrix() = matrix().middleCols(k0, k1 - k0);
    return out;
  }

  /// The snapshots as a dense tensor over (state_dims..., count).
  [[nodiscard]] DenseTensor tensor() const {
    std::vector<Index> shape = state_dims;
    shape.push_back(count);
    return DenseTensor(shape, data);
  }
};

/// Binary snapshot file, little-endian: magic "TTOI", version u32, dtype u8
/// (1 = f64), layout u8, ndims u32, dims u64[] with the time dimension
/// first, dt f64, t0 f64, payload row-major over the stored dims (each
/// snapshot contiguous and seekable). Writes go through a temp file and
/// rename.
void write_snapshots(const std::filesystem::path& path, const SnapshotSet& s);
SnapshotSet read_snapshots(const std::filesystem::path& path);

/// FNV-1a 64-bit digests (file contents / raw bytes).
std::uint64_t fnv1a(std::span<const unsigned char> bytes);
std::uint64_t fnv1a_file(const std::filesystem::path& path);

}  // namespace ttoi
