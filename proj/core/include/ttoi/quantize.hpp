// SPDX-License-Identifier: MIT

#pragma once

#include <vector>

#include "ttoi/dense_tensor.hpp"
#include "ttoi/tt_tensor.hpp"

namespace ttoi {

enum class FactorPolicy {
  ascending_primes,  // full prime factorization, ascending with repetition
  merged,            // ascending primes greedily merged under a cap
};

/// Mode-size factorization for quantized tensorization. A prime n yields the
/// single factor [n].
std::vector<Index> quantized_factors(Index n, FactorPolicy policy,
                                     Index merge_cap = 6);

/// Splits mode `mode` of a dense tensor into the given factors (a bit-exact
/// reshape; the factor product must equal the original mode size).
DenseTensor quantize(const DenseTensor& x, Index mode,
                     const std::vector<Index>& factors);

/// Splits mode `mode` of a tensor train into the given factors by exact
/// rank-revealing splits of the affected core.
TtTensor quantize(const TtTensor& x, Index mode,
                  const std::vector<Index>& factors);

}  // namespace ttoi
