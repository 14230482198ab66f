// SPDX-License-Identifier: MIT

#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "ttoi/errors.hpp"
#include "ttoi/quantize.hpp"

using namespace ttoi;
using testing::random_dense;
using testing::random_tt;
using testing::rel_diff;

TEST_SUITE_BEGIN("quantize");

TEST_CASE("prime factorizations ascend with repetition") {
  CHECK(quantized_factors(400, FactorPolicy::ascending_primes) ==
        std::vector<Index>{2, 2, 2, 2, 5, 5});
  CHECK(quantized_factors(12, FactorPolicy::ascending_primes) ==
        std::vector<Index>{2, 2, 3});
  CHECK(quantized_factors(7, FactorPolicy::ascending_primes) ==
        std::vector<Index>{7});
  CHECK(quantized_factors(1, FactorPolicy::ascending_primes) ==
        std::vector<Index>{1});
}

TEST_CASE("merged factors stay under the cap") {
  for (Index n : {12, 60, 400, 360, 97}) {
    const auto f = quantized_factors(n, FactorPolicy::merged, 6);
    Index product = 1;
    for (Index v : f) product *= v;
    CHECK(product == n);
    // primes above the cap survive unmerged; everything else fits
    for (Index v : f) {
      if (v > 6) {
        const auto raw = quantized_factors(v, FactorPolicy::ascending_primes);
        CHECK(raw.size() == 1);
      }
    }
  }
  // merging strictly shortens composite factorizations
  CHECK(quantized_factors(400, FactorPolicy::merged, 6).size() <
        quantized_factors(400, FactorPolicy::ascending_primes).size());
}

TEST_CASE("dense quantization is an index-arithmetic reshape") {
  std::mt19937 rng(5);
  const DenseTensor t = random_dense({3, 12, 2}, rng);
  const DenseTensor q = quantize(t, 1, {2, 2, 3});
  REQUIRE(q.shape() == std::vector<Index>{3, 2, 2, 3, 2});
  // mode index decomposes big-endian: j = (a*2 + b)*3 + c
  for (Index i = 0; i < 3; ++i) {
    for (Index a = 0; a < 2; ++a) {
      for (Index b = 0; b < 2; ++b) {
        for (Index c = 0; c < 3; ++c) {
          for (Index k = 0; k < 2; ++k) {
            const Index j = (a * 2 + b) * 3 + c;
            const std::vector<Index> qi{i, a, b, c, k};
            const std::vector<Index> ti{i, j, k};
            CHECK(q.at(qi) == t.at(ti));
          }
        }
      }
    }
  }
}

TEST_CASE("tensor-train quantization preserves entries exactly") {
  std::mt19937 rng(9);
  const TtTensor t = random_tt({4, 12, 3}, {3, 2}, rng);
  const TtTensor q = quantize(t, 1, {2, 2, 3});
  const DenseTensor oracle = quantize(full(t), 1, {2, 2, 3});
  CHECK(rel_diff(full(q), oracle) < 1e-13);
}

TEST_CASE("bad factorizations are rejected") {
  std::mt19937 rng(3);
  const DenseTensor t = random_dense({3, 12}, rng);
  CHECK_THROWS_AS((void)quantize(t, 1, {2, 5}), InvalidInputError);
  CHECK_THROWS_AS((void)quantized_factors(0, FactorPolicy::ascending_primes),
                  InvalidInputError);
}

TEST_SUITE_END();
