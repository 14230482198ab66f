// SPDX-License-Identifier: MIT

#include "ttoi/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace ttoi {
namespace {

// Dormand-Prince 5(4) tableau
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
     -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// 5th-order minus embedded 4th-order weights (error estimate)
constexpr double kE[7] = {
    35.0 / 384 - 5179.0 / 57600,      0.0,
    500.0 / 1113 - 7571.0 / 16695,    125.0 / 192 - 393.0 / 640,
    -2187.0 / 6784 + 92097.0 / 339200, 11.0 / 84 - 187.0 / 2100,
    -1.0 / 40};

struct DenseOps {
  // y + h * sum coeff[j] k[j]; the rounding tolerance is ignored
  static Eigen::VectorXd combine(const Eigen::VectorXd* y, double h,
                                 std::span<const double> coeff,
                                 std::span<const Eigen::VectorXd> k,
                                 double /*tol*/) {
    Eigen::VectorXd out =
        y ? *y : Eigen::VectorXd::Zero(k[0].size()).eval();
    for (std::size_t j = 0; j < coeff.size(); ++j) {
      if (coeff[j] != 0.0) out += (h * coeff[j]) * k[j];
    }
    return out;
  }
  static double norm(const Eigen::VectorXd& y) { return y.norm(); }
  static Index max_rank(const Eigen::VectorXd&) { return 1; }
  static bool finite(const Eigen::VectorXd& y) { return y.allFinite(); }
  static void reduce(Eigen::VectorXd&, double) {}
};

struct TtOps {
  static TtTensor combine(const TtTensor* y, double h,
                          std::span<const double> coeff,
                          std::span<const TtTensor> k, double tol) {
    TtTensor out;
    bool seeded = false;
    if (y) {
      out = *y;
      seeded = true;
    }
    for (std::size_t j = 0; j < coeff.size(); ++j) {
      if (coeff[j] == 0.0) continue;
      TtTensor term = tt_scale(k[j], h * coeff[j]);
      out = seeded ? tt_add(out, term) : std::move(term);
      seeded = true;
    }
    if (!seeded) out = TtTensor::zero(k[0].mode_sizes());
    return tol > 0.0 ? round(out, {tol}) : out;
  }
  static double norm(const TtTensor& y) { return tt_norm(y); }
  static Index max_rank(const TtTensor& y) { return y.max_rank(); }
  static bool finite(const TtTensor& y) { return std::isfinite(tt_norm(y)); }
  static void reduce(TtTensor& y, double tol) {
    if (tol > 0.0) y = round(y, {tol});
  }
};

template <class State, class Ops>
OdeResult<State> rk45_impl(
    const std::function<State(double, const State&)>& rhs, const State& y0,
    std::span<const double> t_obs, const Rk45Options& o) {
  if (t_obs.empty()) throw InvalidInputError("rk45: no observation times");
  for (std::size_t i = 0; i + 1 < t_obs.size(); ++i) {
    if (t_obs[i + 1] <= t_obs[i]) {
      throw InvalidInputError("rk45: observation times must increase");
    }
  }

  OdeResult<State> res;
  res.states.push_back(y0);
  res.times.push_back(t_obs[0]);
  if (t_obs.size() == 1) return res;

  const double stage_tol = o.round_per_step ? 0.0 : o.round_tol;
  const double span = t_obs.back() - t_obs.front();

  double t = t_obs[0];
  State y = y0;
  std::vector<State> k(7);
  k[0] = rhs(t, y);
  ++res.rhs_evals;
  res.max_rank_seen = std::max(res.max_rank_seen, Ops::max_rank(y));

  double h = o.dt_init;
  if (h <= 0.0) {
    const double ny = Ops::norm(y);
    const double nf = Ops::norm(k[0]);
    h = (ny > 0.0 && nf > 1e-300) ? 0.01 * ny / nf : span * 1e-6;
    h = std::min(h, span);
  }

  std::size_t next_obs = 1;
  while (next_obs < t_obs.size()) {
    if (res.steps >= o.max_steps) {
      throw StepBudgetError("rk45: step budget exhausted");
    }
    bool clipped = false;
    double hs = h;
    if (t + hs >= t_obs[next_obs] - 1e-14 * span) {
      hs = std::max(t_obs[next_obs] - t, 0.0);
      clipped = true;
    }

    for (int s = 1; s < 7; ++s) {
      State ys =
          Ops::combine(&y, hs, std::span<const double>(kA[s], s),
                       std::span<const State>(k.data(), s), stage_tol);
      res.max_rank_seen = std::max(res.max_rank_seen, Ops::max_rank(ys));
      k[static_cast<std::size_t>(s)] = rhs(t + kC[s] * hs, ys);
    }
    res.rhs_evals += 6;
    State ynew = Ops::combine(&y, hs, std::span<const double>(kA[6], 6),
                              std::span<const State>(k.data(), 6),
                              o.round_tol);
    if (!Ops::finite(ynew)) {
      throw DivergenceError("rk45: non-finite state");
    }
    State err = Ops::combine(nullptr, hs, std::span<const double>(kE, 7),
                             std::span<const State>(k.data(), 7),
                             0.1 * o.round_tol);
    const double scale =
        o.atol + o.rtol * std::max(Ops::norm(y), Ops::norm(ynew));
    const double enorm = Ops::norm(err) / scale;
    const double grow =
        std::clamp(enorm > 0.0 ? o.safety * std::pow(enorm, -0.2) : 5.0,
                   0.2, 5.0);

    if (enorm <= 1.0) {
      t += hs;
      y = std::move(ynew);
      k[0] = std::move(k[6]);  // first-same-as-last
      // the reused derivative came from unrounded stage sums; trim it so
      // ranks cannot compound across steps
      Ops::reduce(k[0], o.round_tol);
      ++res.steps;
      res.max_rank_seen = std::max(res.max_rank_seen, Ops::max_rank(y));
      if (clipped) {
        t = t_obs[next_obs];
        res.states.push_back(y);
        res.times.push_back(t);
        ++next_obs;
      } else {
        h = hs * grow;
      }
    } else {
      h = hs * grow;
      if (h < o.dt_min) {
        throw StiffnessError("rk45: step size underflow");
      }
    }
  }
  return res;
}

}  // namespace

OdeResult<Eigen::VectorXd> rk45(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& rhs,
    const Eigen::VectorXd& y0, std::span<const double> t_obs,
    const Rk45Options& options) {
  return rk45_impl<Eigen::VectorXd, DenseOps>(rhs, y0, t_obs, options);
}

OdeResult<TtTensor> rk45(
    const std::function<TtTensor(double, const TtTensor&)>& rhs,
    const TtTensor& y0, std::span<const double> t_obs,
    const Rk45Options& options) {
  return rk45_impl<TtTensor, TtOps>(rhs, y0, t_obs, options);
}

}  // namespace ttoi
