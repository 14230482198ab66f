// SPDX-License-Identifier: MIT

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ttoi/dense_tensor.hpp"
#include "ttoi/tt_tensor.hpp"

namespace ttoi::testing {

/// TT with the given mode sizes and internal ranks, standard-normal entries.
inline TtTensor random_tt(const std::vector<Index>& modes,
                          const std::vector<Index>& ranks, std::mt19937& rng) {
  std::normal_distribution<double> normal;
  std::vector<TtCore> cores;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const Index r0 = k == 0 ? 1 : ranks[k - 1];
    const Index r1 = k + 1 == modes.size() ? 1 : ranks[k];
    TtCore core(r0, modes[k], r1);
    for (double& v : core.a) v = normal(rng);
    cores.push_back(std::move(core));
  }
  return TtTensor(std::move(cores));
}

inline DenseTensor random_dense(const std::vector<Index>& shape,
                                std::mt19937& rng) {
  DenseTensor t(shape);
  std::normal_distribution<double> normal;
  for (Index i = 0; i < t.size(); ++i) t.data()[i] = normal(rng);
  return t;
}

inline double rel_diff(const DenseTensor& a, const DenseTensor& b) {
  REQUIRE(a.shape() == b.shape());
  double num = 0.0;
  double den = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    num += d * d;
    den += b.data()[i] * b.data()[i];
  }
  return std::sqrt(num) / std::sqrt(den);
}

}  // namespace ttoi::testing
