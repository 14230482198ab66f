// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "ttoi/tt_tensor.hpp"

namespace ttoi {

struct Rk45Options {
  double rtol = 1e-8;
  double atol = 1e-10;
  double dt_init = 0.0;  // 0: choose from the initial slope
  double dt_min = 1e-12;
  Index max_steps = 10'000'000;
  double safety = 0.9;
  // tensor-train state only:
  double round_tol = 0.0;     // truncation epsilon for stage combinations
  bool round_per_step = false;  // round once per step instead of per stage
};

template <class State>
struct OdeResult {
  std::vector<State> states;  // one per observation time
  std::vector<double> times;
  Index steps = 0;
  Index rhs_evals = 0;
  Index max_rank_seen = 1;  // meaningful for tensor-train states
};

/// Adaptive Dormand-Prince 5(4) integration of y' = rhs(t, y), recording the
/// state at every time in `t_obs` (ascending; the first entry is the initial
/// time). Steps are clipped to land on observation times exactly.
/// Throws StiffnessError when the controller underflows dt_min,
/// StepBudgetError past max_steps, DivergenceError on non-finite values.
OdeResult<Eigen::VectorXd> rk45(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& rhs,
    const Eigen::VectorXd& y0, std::span<const double> t_obs,
    const Rk45Options& options);

/// Same scheme over tensor-train states. Stage combinations are re-truncated
/// at round_tol (per stage by default); the embedded error difference is
/// rounded at a tenth of that tolerance.
OdeResult<TtTensor> rk45(
    const std::function<TtTensor(double, const TtTensor&)>& rhs,
    const TtTensor& y0, std::span<const double> t_obs,
    const Rk45Options& options);

}  // namespace ttoi
