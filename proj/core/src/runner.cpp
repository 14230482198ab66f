// SPDX-License-Identifier: MIT

#include "ttoi/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <span>
#include <utility>

#include "json.hpp"
#include "ttoi/cross.hpp"
#include "ttoi/errors.hpp"
#include "ttoi/opinf_full.hpp"
#include "ttoi/opinf_rom.hpp"

namespace ttoi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_hash(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void append_bytes(std::vector<unsigned char>& out, const void* p,
                  std::size_t n) {
  const auto* b = static_cast<const unsigned char*>(p);
  out.insert(out.end(), b, b + n);
}

Index max_internal_rank(const TtTensor& t) {
  Index r = 1;
  for (Index rk : t.ranks()) r = std::max(r, rk);
  return r;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::rom:
      return "rom";
    case Method::tt_rom:
      return "tt-rom";
    case Method::ft:
      return "ft";
    case Method::tt:
      return "tt";
    case Method::qtt:
      return "qtt";
  }
  return "rom";
}

Method parse_method(const std::string& name) {
  if (name == "rom") return Method::rom;
  if (name == "tt-rom" || name == "ttrom") return Method::tt_rom;
  if (name == "ft") return Method::ft;
  if (name == "tt") return Method::tt;
  if (name == "qtt") return Method::qtt;
  throw InvalidInputError("unknown method: " + name);
}

std::string metric_name(ErrorMetric m) {
  switch (m) {
    case ErrorMetric::l2_at_eval:
      return "l2-at-eval";
    case ErrorMetric::linf_at_eval:
      return "linf-at-eval";
    case ErrorMetric::max_over_times:
      return "max-over-times";
  }
  return "l2-at-eval";
}

ErrorMetric parse_metric(const std::string& name) {
  if (name == "l2-at-eval" || name == "l2") return ErrorMetric::l2_at_eval;
  if (name == "linf-at-eval" || name == "linf") {
    return ErrorMetric::linf_at_eval;
  }
  if (name == "max-over-times" || name == "max") {
    return ErrorMetric::max_over_times;
  }
  throw InvalidInputError("unknown metric: " + name);
}

std::string factor_policy_name(FactorPolicy p) {
  return p == FactorPolicy::merged ? "merged" : "ascending-primes";
}

FactorPolicy parse_factor_policy(const std::string& name) {
  if (name == "ascending-primes" || name == "primes") {
    return FactorPolicy::ascending_primes;
  }
  if (name == "merged") return FactorPolicy::merged;
  throw InvalidInputError("unknown factor policy: " + name);
}

std::string RunConfig::canonical() const {
  std::string s;
  s += "method=" + method_name(method);
  s += ";eps=" + fmt_double(epsilon_tt);
  s += ";gamma=" + fmt_double(gamma);
  s += ";lambda_a=" + fmt_double(lambda_a);
  s += ";lambda_f=" + fmt_double(lambda_f);
  s += ";n_override=" + std::to_string(n_modes_override);
  s += ";cut=" + fmt_double(train_cut_time);
  s += ";eval=" + fmt_double(eval_time);
  s += ";stencil=" + std::to_string(stencil_order);
  s += ";metric=" + metric_name(metric);
  s += ";policy=" + factor_policy_name(factor_policy);
  s += ";cross=" + std::string(use_cross ? "1" : "0");
  s += ";seed=" + std::to_string(seed);
  s += ";rtol=" + fmt_double(prediction.rtol);
  s += ";atol=" + fmt_double(prediction.atol);
  s += ";per_step=" + std::string(prediction.round_per_step ? "1" : "0");
  return s;
}

std::uint64_t RunConfig::hash() const {
  const std::string s = canonical();
  return fnv1a({reinterpret_cast<const unsigned char*>(s.data()), s.size()});
}

std::uint64_t snapshot_digest(const SnapshotSet& s) {
  std::vector<unsigned char> bytes;
  bytes.reserve(64 + s.data.size() * sizeof(double));
  const auto layout = static_cast<std::uint8_t>(s.layout);
  append_bytes(bytes, &layout, 1);
  const std::uint64_t nd = s.state_dims.size();
  append_bytes(bytes, &nd, sizeof(nd));
  for (Index d : s.state_dims) {
    const std::uint64_t v = static_cast<std::uint64_t>(d);
    append_bytes(bytes, &v, sizeof(v));
  }
  const std::uint64_t k = static_cast<std::uint64_t>(s.count);
  append_bytes(bytes, &k, sizeof(k));
  append_bytes(bytes, &s.t0, sizeof(s.t0));
  append_bytes(bytes, &s.dt, sizeof(s.dt));
  append_bytes(bytes, s.data.data(), s.data.size() * sizeof(double));
  return fnv1a(bytes);
}

double compute_rel_error(const Eigen::VectorXd& pred,
                         const Eigen::VectorXd& ref, ErrorMetric metric) {
  if (pred.size() != ref.size()) {
    throw ShapeError("relative error: size mismatch");
  }
  double denom = 0.0;
  double num = 0.0;
  if (metric == ErrorMetric::linf_at_eval) {
    denom = ref.lpNorm<Eigen::Infinity>();
    num = (pred - ref).lpNorm<Eigen::Infinity>();
  } else {
    denom = ref.norm();
    num = (pred - ref).norm();
  }
  if (denom == 0.0) {
    throw InvalidInputError("relative error undefined: zero reference state");
  }
  return num / denom;
}

namespace {

/// Predicted dense states at each requested time, one prediction family per
/// method. `obs` always starts at the last training time; a single entry
/// means self-prediction (reconstruct, no ODE solve).
struct Prediction {
  std::vector<Eigen::VectorXd> states;
  Index max_rank_seen = 1;
};

Prediction predict_reduced(const ReducedOperators& ops,
                           const Eigen::MatrixXd& basis_or_empty,
                           const TtRomModel* tt_model,
                           const Eigen::VectorXd& z0,
                           std::span<const double> obs,
                           const Rk45Options& options) {
  std::vector<Eigen::VectorXd> reduced;
  if (obs.size() <= 1) {
    reduced.push_back(z0);
  } else {
    const auto rhs = [&ops](double, const Eigen::VectorXd& z) {
      return reduced_rhs(ops, z);
    };
    auto res = rk45(rhs, z0, obs, options);
    reduced = std::move(res.states);
  }
  Prediction out;
  out.states.reserve(reduced.size());
  for (const Eigen::VectorXd& z : reduced) {
    if (tt_model != nullptr) {
      const DenseTensor x = full(ttrom_reconstruct(*tt_model, z));
      out.states.emplace_back(
          Eigen::Map<const Eigen::VectorXd>(x.data(), x.size()));
    } else {
      out.states.emplace_back(basis_or_empty * z);
    }
  }
  return out;
}

Prediction predict_dense_full(const FullOperators& ops,
                              const Eigen::VectorXd& x0,
                              std::span<const double> obs,
                              const Rk45Options& options) {
  Prediction out;
  if (obs.size() <= 1) {
    out.states.push_back(x0);
    return out;
  }
  const auto rhs = [&ops](double, const Eigen::VectorXd& x) {
    return full_rhs(ops, x);
  };
  auto res = rk45(rhs, x0, obs, options);
  out.states = std::move(res.states);
  return out;
}

Prediction predict_tt_full(const FullOperators& ops, const TtTensor& x0,
                           double epsilon, std::span<const double> obs,
                           Rk45Options options) {
  options.round_tol = epsilon;
  std::vector<TtTensor> states;
  Prediction out;
  if (obs.size() <= 1) {
    states.push_back(x0);
  } else {
    const TruncationTol tol{epsilon};
    const auto rhs = [&ops, tol](double, const TtTensor& x) {
      return full_rhs(ops, x, tol);
    };
    auto res = rk45(rhs, x0, obs, options);
    states = std::move(res.states);
    out.max_rank_seen = res.max_rank_seen;
  }
  out.states.reserve(states.size());
  for (const TtTensor& s : states) {
    const DenseTensor x = full(s);
    out.states.emplace_back(
        Eigen::Map<const Eigen::VectorXd>(x.data(), x.size()));
  }
  return out;
}

}  // namespace

RunReport run_method(const SnapshotSet& snaps, const RunConfig& cfg,
                     const std::string& problem_name,
                     Eigen::VectorXd* predicted_out) {
  if (snaps.count < 2) {
    throw InvalidInputError("run: need at least two snapshots");
  }
  if (snaps.dt <= 0.0) {
    throw InvalidInputError("run: nonpositive snapshot step");
  }
  const bool structured = snaps.layout == SnapshotSet::Layout::structured;
  if (!structured && (cfg.method == Method::ft || cfg.method == Method::tt)) {
    throw InvalidInputError(
        "run: ft/tt require structured snapshots; use rom, tt-rom, or qtt");
  }
  if (cfg.epsilon_tt < 0.0 || cfg.gamma < 0.0 || cfg.lambda_a < 0.0 ||
      cfg.lambda_f < 0.0) {
    throw InvalidInputError("run: negative tolerance or penalty");
  }
  if (cfg.eval_time < cfg.train_cut_time) {
    throw InvalidInputError("run: eval_time precedes train_cut_time");
  }

  // Training window: every snapshot with t <= train_cut_time.
  const double ticks = (cfg.train_cut_time - snaps.t0) / snaps.dt;
  Index ktrain = static_cast<Index>(std::floor(ticks + 1e-9)) + 1;
  ktrain = std::min(ktrain, snaps.count);
  if (ktrain < 2) {
    throw InvalidInputError("run: training window has fewer than 2 snapshots");
  }

  const double eval_ticks = (cfg.eval_time - snaps.t0) / snaps.dt;
  const Index keval = static_cast<Index>(std::llround(eval_ticks));
  const double tol_t = 1e-9 * std::max(1.0, std::abs(cfg.eval_time));
  if (keval < 0 || keval >= snaps.count ||
      std::abs(snaps.time_at(keval) - cfg.eval_time) > tol_t) {
    throw InvalidInputError("run: eval_time does not land on a snapshot");
  }
  if (keval < ktrain - 1) {
    throw InvalidInputError("run: eval_time precedes the training window");
  }

  const SnapshotSet train = snaps.window(0, ktrain);
  const Eigen::VectorXd reference = snaps.snapshot(keval);
  const Lambda lam{cfg.lambda_a, cfg.lambda_f, 0.0};
  const TruncationTol tol{cfg.epsilon_tt};

  std::vector<double> obs;
  if (keval == ktrain - 1) {
    obs = {snaps.time_at(keval)};
  } else if (cfg.metric == ErrorMetric::max_over_times) {
    for (Index k = ktrain - 1; k <= keval; ++k) obs.push_back(snaps.time_at(k));
  } else {
    obs = {snaps.time_at(ktrain - 1), snaps.time_at(keval)};
  }

  RunReport rep;
  rep.problem = problem_name;
  rep.method = method_name(cfg.method);
  rep.metric = metric_name(cfg.metric);
  rep.config_hash = cfg.hash();
  rep.snapshot_hash = snapshot_digest(snaps);

  // Phase 1: reduction / compression. Phase 2: operator learning.
  // The prediction phase below is shared across methods.
  PodBasis basis;
  ReducedOperators reduced_ops;
  Eigen::MatrixXd reduced_traj;  // K x n training trajectory (rom, tt-rom)
  TtRomModel tt_model;
  FullOperators full_ops;
  TtTensor x_tt;

  auto t = Clock::now();
  switch (cfg.method) {
    case Method::rom: {
      Index n = cfg.n_modes_override;
      if (n <= 0) {
        const TtTensor matched = tt_svd(train.tensor(), tol);
        n = matched.ranks().empty() ? 1 : matched.ranks().back();
      }
      n = std::min(n, std::min(train.count, train.state_size()));
      basis = pod(train.matrix().transpose(), n);
      rep.t_pod = seconds_since(t);
      rep.rank_or_modes = {n};

      t = Clock::now();
      reduced_traj = train.matrix().transpose() * basis.basis;
      reduced_ops = solve_opinf(
          build_design(reduced_traj),
          derivative_targets(reduced_traj, train.dt, cfg.stencil_order), lam);
      rep.t_learn = seconds_since(t);
      break;
    }
    case Method::tt_rom: {
      if (cfg.use_cross) {
        const DenseTensor dense = train.tensor();
        CrossOptions copt;
        copt.epsilon = cfg.epsilon_tt;
        copt.seed = cfg.seed;
        const auto res = tt_cross(
            dense.shape(),
            [&dense](std::span<const Index> idx) { return dense.at(idx); },
            copt);
        x_tt = res.tensor;
      } else {
        x_tt = tt_svd(train.tensor(), tol);
      }
      rep.t_pod = seconds_since(t);

      t = Clock::now();
      tt_model = ttrom_fit(x_tt, train.dt, lam, cfg.stencil_order);
      rep.t_learn = seconds_since(t);
      reduced_traj = tt_model.reduced_snapshots;
      rep.rank_or_modes = {reduced_traj.cols()};
      break;
    }
    case Method::ft: {
      rep.t_pod = 0.0;
      full_ops = ft_learn(train, cfg.gamma, cfg.stencil_order);
      rep.t_learn = seconds_since(t);
      break;
    }
    case Method::tt: {
      x_tt = tt_svd(train.tensor(), tol);
      rep.t_pod = seconds_since(t);

      t = Clock::now();
      full_ops = tt_learn_from(x_tt, train.dt, tol, cfg.gamma,
                               cfg.stencil_order);
      rep.t_learn = seconds_since(t);
      rep.rank_or_modes = x_tt.ranks();
      break;
    }
    case Method::qtt: {
      std::vector<Index> modes =
          qtt_modes(train, cfg.factor_policy);
      modes.push_back(train.count);
      x_tt = tt_svd(DenseTensor(modes, train.data), tol);
      rep.t_pod = seconds_since(t);

      t = Clock::now();
      full_ops = tt_learn_from(x_tt, train.dt, tol, cfg.gamma,
                               cfg.stencil_order);
      rep.t_learn = seconds_since(t);
      rep.rank_or_modes = x_tt.ranks();
      break;
    }
  }

  t = Clock::now();
  Prediction pred;
  try {
    switch (cfg.method) {
      case Method::rom: {
        const Eigen::VectorXd z0 = reduced_traj.row(ktrain - 1).transpose();
        pred = predict_reduced(reduced_ops, basis.basis, nullptr, z0, obs,
                               cfg.prediction);
        break;
      }
      case Method::tt_rom: {
        const Eigen::VectorXd z0 = reduced_traj.row(ktrain - 1).transpose();
        pred = predict_reduced(tt_model.operators, {}, &tt_model, z0, obs,
                               cfg.prediction);
        break;
      }
      case Method::ft: {
        pred = predict_dense_full(full_ops, train.snapshot(ktrain - 1), obs,
                                  cfg.prediction);
        break;
      }
      case Method::tt:
      case Method::qtt: {
        const TtTensor ic = round(snapshot_state(x_tt, ktrain - 1), tol);
        pred = predict_tt_full(full_ops, ic, cfg.epsilon_tt, obs,
                               cfg.prediction);
        break;
      }
    }
  } catch (const IntegrationError& e) {
    rep.t_predict = seconds_since(t);
    rep.converged = false;
    rep.failure = e.what();
    rep.rel_error = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  rep.t_predict = seconds_since(t);

  if ((cfg.method == Method::tt || cfg.method == Method::qtt) &&
      obs.size() > 1) {
    const Index op_rank = std::max(max_internal_rank(full_ops.a_tt),
                                   max_internal_rank(full_ops.f_tt));
    if (pred.max_rank_seen > 4 * op_rank) {
      std::fprintf(stderr,
                   "warning: prediction rank %lld exceeded 4x the operator "
                   "rank %lld\n",
                   static_cast<long long>(pred.max_rank_seen),
                   static_cast<long long>(op_rank));
    }
  }

  if (obs.size() > 1 && cfg.metric == ErrorMetric::max_over_times) {
    double worst = 0.0;
    for (std::size_t k = 1; k < obs.size(); ++k) {
      worst = std::max(
          worst, compute_rel_error(pred.states[k],
                                   snaps.snapshot(ktrain - 1 + Index(k)),
                                   ErrorMetric::l2_at_eval));
    }
    rep.rel_error = worst;
  } else {
    const ErrorMetric m = cfg.metric == ErrorMetric::max_over_times
                              ? ErrorMetric::l2_at_eval
                              : cfg.metric;
    rep.rel_error = compute_rel_error(pred.states.back(), reference, m);
  }
  if (predicted_out != nullptr) *predicted_out = pred.states.back();
  return rep;
}

std::string report_csv_header() {
  return "problem,method,t_pod,t_learn,t_predict,rel_error,rank_or_modes,"
         "metric,converged,config_hash,snapshot_hash";
}

std::string report_csv_row(const RunReport& r) {
  std::string ranks;
  for (std::size_t i = 0; i < r.rank_or_modes.size(); ++i) {
    if (i > 0) ranks += ';';
    ranks += std::to_string(r.rank_or_modes[i]);
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,", r.t_pod, r.t_learn,
                r.t_predict);
  std::string err = "nan";
  if (std::isfinite(r.rel_error)) {
    char e[32];
    std::snprintf(e, sizeof(e), "%.10e", r.rel_error);
    err = e;
  }
  return r.problem + "," + r.method + "," + buf + err + "," + ranks + "," +
         r.metric + "," + (r.converged ? "true" : "false") + "," +
         fmt_hash(r.config_hash) + "," + fmt_hash(r.snapshot_hash);
}

std::string report_json(const RunReport& r) {
  nlohmann::json j;
  j["problem"] = r.problem;
  j["method"] = r.method;
  j["t_pod"] = r.t_pod;
  j["t_learn"] = r.t_learn;
  j["t_predict"] = r.t_predict;
  if (std::isfinite(r.rel_error)) {
    j["rel_error"] = r.rel_error;
  } else {
    j["rel_error"] = nullptr;
  }
  j["rank_or_modes"] = r.rank_or_modes;
  j["metric"] = r.metric;
  j["converged"] = r.converged;
  if (r.converged) {
    j["failure"] = nullptr;
  } else {
    j["failure"] = r.failure;
  }
  j["config_hash"] = fmt_hash(r.config_hash);
  j["snapshot_hash"] = fmt_hash(r.snapshot_hash);
  return j.dump();
}

}  // namespace ttoi
