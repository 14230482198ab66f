// SPDX-License-Identifier: MIT

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ttoi/tt_tensor.hpp"

namespace ttoi {

/// Black-box entry evaluator for cross interpolation.
using EntryFn = std::function<double(std::span<const Index>)>;

struct CrossOptions {
  double epsilon = 1e-10;       // target relative accuracy (validation RMS)
  Index initial_rank = 2;       // size of the random starting index sets
  Index rank_increment = 2;     // bond rank enrichment applied on stall
  Index max_rank = 200;
  Index max_sweeps = 20;        // full forward+backward sweeps
  Index validation_samples = 100;
  std::uint64_t seed = 0;
  double maxvol_tol = 1.05;     // pivot dominance threshold
};

struct CrossResult {
  TtTensor tensor;
  Index oracle_calls = 0;   // distinct entries evaluated
  Index sweeps = 0;         // half-sweeps performed
  bool converged = false;
  double validation_error = 0.0;  // relative RMS at the validation set
};

/// Adaptive-rank cross interpolation of a black-box tensor by two-core
/// alternating sweeps with maxvol pivoting. Convergence is declared when the
/// RMS error at a fixed random validation set drops below epsilon times the
/// sample RMS; the search enriches bond ranks when progress stalls.
CrossResult tt_cross(const std::vector<Index>& modes, const EntryFn& f,
                     const CrossOptions& options = {});

}  // namespace ttoi
