// SPDX-License-Identifier: MIT

#include "ttoi/quantize.hpp"

#include <numeric>

#include "tt_internal.hpp"

namespace ttoi {
namespace {

std::vector<Index> prime_factors(Index n) {
  std::vector<Index> out;
  for (Index p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      out.push_back(p);
      n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

void check_factors(Index n, const std::vector<Index>& factors) {
  Index prod = 1;
  for (Index f : factors) {
    if (f <= 0) throw InvalidInputError("quantize: nonpositive factor");
    prod *= f;
  }
  if (prod != n) throw InvalidInputError("quantize: factors do not match mode");
}

}  // namespace

std::vector<Index> quantized_factors(Index n, FactorPolicy policy,
                                     Index merge_cap) {
  if (n < 1) throw InvalidInputError("quantized_factors: nonpositive size");
  if (n == 1) return {1};
  std::vector<Index> primes = prime_factors(n);
  if (policy == FactorPolicy::ascending_primes) return primes;
  if (merge_cap < 2) throw InvalidInputError("quantized_factors: cap too small");
  std::vector<Index> out;
  Index acc = 1;
  for (Index p : primes) {
    if (acc > 1 && acc * p > merge_cap) {
      out.push_back(acc);
      acc = 1;
    }
    acc *= p;
  }
  out.push_back(acc);
  return out;
}

DenseTensor quantize(const DenseTensor& x, Index mode,
                     const std::vector<Index>& factors) {
  if (mode < 0 || mode >= x.ndims()) {
    throw InvalidInputError("quantize: mode out of range");
  }
  check_factors(x.shape()[static_cast<std::size_t>(mode)], factors);
  std::vector<Index> shape;
  for (Index k = 0; k < x.ndims(); ++k) {
    if (k == mode) {
      shape.insert(shape.end(), factors.begin(), factors.end());
    } else {
      shape.push_back(x.shape()[static_cast<std::size_t>(k)]);
    }
  }
  return x.reshaped(std::move(shape));
}

TtTensor quantize(const TtTensor& x, Index mode,
                  const std::vector<Index>& factors) {
  if (mode < 0 || mode >= x.ndims()) {
    throw InvalidInputError("quantize: mode out of range");
  }
  check_factors(x.core(mode).n, factors);
  std::vector<TtCore> cores;
  for (Index k = 0; k < x.ndims(); ++k) {
    if (k != mode) {
      cores.push_back(x.core(k));
      continue;
    }
    TtCore rest = x.core(k);
    for (std::size_t f = 0; f + 1 < factors.size(); ++f) {
      const Index na = factors[f];
      const Index nb = rest.n / na;
      auto [lft, rgt] =
          detail::split_pair(rest, na, nb, 0.0, detail::AbsorbSide::right);
      cores.push_back(std::move(lft));
      rest = std::move(rgt);
    }
    cores.push_back(std::move(rest));
  }
  return TtTensor(std::move(cores));
}

}  // namespace ttoi
