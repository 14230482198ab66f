// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ttoi/integrate.hpp"
#include "ttoi/quantize.hpp"
#include "ttoi/snapshot_io.hpp"

namespace ttoi {

enum class Method { rom, tt_rom, ft, tt, qtt };
enum class ErrorMetric { l2_at_eval, linf_at_eval, max_over_times };

std::string method_name(Method m);
Method parse_method(const std::string& name);
std::string metric_name(ErrorMetric m);
ErrorMetric parse_metric(const std::string& name);
std::string factor_policy_name(FactorPolicy p);
FactorPolicy parse_factor_policy(const std::string& name);

/// One benchmark execution: training window, method settings, prediction
/// integrator. Prediction defaults are the common loose ODE-solver setting
/// (rtol 1e-3, atol 1e-6); generation keeps its own tight defaults.
struct RunConfig {
  Method method = Method::rom;
  double epsilon_tt = 1e-12;
  double gamma = 0.0;     // ft/tt/qtt ridge weight
  double lambda_a = 0.0;  // rom/tt-rom per-block penalties
  double lambda_f = 0.0;
  Index n_modes_override = 0;  // 0: match the train's final internal rank
  double train_cut_time = 0.0;
  double eval_time = 0.0;
  int stencil_order = 4;
  ErrorMetric metric = ErrorMetric::l2_at_eval;
  FactorPolicy factor_policy = FactorPolicy::ascending_primes;
  bool use_cross = false;  // tt-rom: compress by cross interpolation
  std::uint64_t seed = 0;
  Rk45Options prediction;

  RunConfig() {
    prediction.rtol = 1e-3;
    prediction.atol = 1e-6;
  }

  [[nodiscard]] std::string canonical() const;
  [[nodiscard]] std::uint64_t hash() const;
};

struct RunReport {
  std::string problem;
  std::string method;
  double t_pod = 0.0;
  double t_learn = 0.0;
  double t_predict = 0.0;
  double rel_error = 0.0;
  std::vector<Index> rank_or_modes;  // rom/tt-rom: {n}; tt/qtt: train ranks
  std::string metric;
  bool converged = true;
  std::string failure;  // integration failure message when !converged
  std::uint64_t config_hash = 0;
  std::uint64_t snapshot_hash = 0;
};

/// Content digest of a snapshot set (layout, dims, times, payload).
std::uint64_t snapshot_digest(const SnapshotSet& s);

/// Relative error between two states under the given metric.
double compute_rel_error(const Eigen::VectorXd& pred,
                         const Eigen::VectorXd& ref, ErrorMetric metric);

/// Trains on snapshots with t <= train_cut_time, predicts from the last
/// training state to eval_time, and scores against the reference snapshot.
/// eval_time must land on a snapshot time at or after the training cut;
/// equality (self-prediction) skips the ODE solve. Integration failures are
/// reported through `converged` rather than thrown. When `predicted_out` is
/// given it receives the dense predicted state at eval_time.
RunReport run_method(const SnapshotSet& snaps, const RunConfig& cfg,
                     const std::string& problem_name,
                     Eigen::VectorXd* predicted_out = nullptr);

std::string report_csv_header();
std::string report_csv_row(const RunReport& r);
std::string report_json(const RunReport& r);

}  // namespace ttoi
