// SPDX-License-Identifier: MIT

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "ttoi/errors.hpp"
#include "ttoi/pde_gen.hpp"
#include "ttoi/runner.hpp"

using namespace ttoi;

namespace {

/// Small diffusion case shared across the runner tests.
const SnapshotSet& toy_snapshots() {
  static const SnapshotSet s = [] {
    const GridSpec2d g{8, 8, 0.0, 1.0, 0.0, 1.0};
    PdeProblem p;
    p.kind = PdeProblem::Kind::heat;
    p.mu = 0.01;
    p.t_final = 0.1;
    p.dt_snapshot = 0.02;
    return generate_snapshots(p, g);
  }();
  return s;
}

RunConfig toy_config(Method m) {
  RunConfig cfg;
  cfg.method = m;
  cfg.train_cut_time = 0.08;
  cfg.eval_time = 0.1;
  cfg.lambda_a = 1e-8;
  cfg.lambda_f = 1e-8;
  return cfg;
}

Index count_fields(const std::string& line) {
  return static_cast<Index>(std::count(line.begin(), line.end(), ',')) + 1;
}

}  // namespace

TEST_SUITE_BEGIN("runner");

TEST_CASE("relative errors follow their metric definitions") {
  Eigen::VectorXd ref(3);
  ref << 1.0, -2.0, 2.0;

  CHECK(compute_rel_error(ref, ref, ErrorMetric::l2_at_eval) == 0.0);
  CHECK(compute_rel_error(ref, ref, ErrorMetric::linf_at_eval) == 0.0);

  const Eigen::VectorXd scaled = 1.01 * ref;
  CHECK(compute_rel_error(scaled, ref, ErrorMetric::l2_at_eval) ==
        doctest::Approx(0.01).epsilon(1e-12));

  std::mt19937 rng(5);
  std::normal_distribution<double> normal;
  Eigen::VectorXd pred(3);
  for (Index i = 0; i < 3; ++i) pred(i) = ref(i) + 0.1 * normal(rng);
  CHECK(compute_rel_error(pred, ref, ErrorMetric::l2_at_eval) ==
        doctest::Approx((pred - ref).norm() / ref.norm()).epsilon(1e-12));
  CHECK(compute_rel_error(pred, ref, ErrorMetric::linf_at_eval) ==
        doctest::Approx((pred - ref).lpNorm<Eigen::Infinity>() /
                        ref.lpNorm<Eigen::Infinity>())
            .epsilon(1e-12));

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS((void)compute_rel_error(pred, zero, ErrorMetric::l2_at_eval),
                  InvalidInputError);
  Eigen::VectorXd short_ref(2);
  short_ref << 1.0, 2.0;
  CHECK_THROWS_AS(
      (void)compute_rel_error(pred, short_ref, ErrorMetric::l2_at_eval),
      ShapeError);
}

TEST_CASE("name round trips cover every method and metric") {
  for (Method m : {Method::rom, Method::tt_rom, Method::ft, Method::tt,
                   Method::qtt}) {
    CHECK(parse_method(method_name(m)) == m);
  }
  for (ErrorMetric m : {ErrorMetric::l2_at_eval, ErrorMetric::linf_at_eval,
                        ErrorMetric::max_over_times}) {
    CHECK(parse_metric(metric_name(m)) == m);
  }
  CHECK(parse_method("ttrom") == Method::tt_rom);
  CHECK(parse_metric("linf") == ErrorMetric::linf_at_eval);
  CHECK(parse_factor_policy("merged") == FactorPolicy::merged);
  CHECK_THROWS_AS((void)parse_method("pod"), InvalidInputError);
  CHECK_THROWS_AS((void)parse_metric("l3"), InvalidInputError);
}

TEST_CASE("repeated runs are bitwise identical") {
  const SnapshotSet& s = toy_snapshots();
  const RunConfig cfg = toy_config(Method::tt);

  const RunReport a = run_method(s, cfg, "toy");
  const RunReport b = run_method(s, cfg, "toy");
  CHECK(a.rel_error == b.rel_error);
  CHECK(a.config_hash == b.config_hash);
  CHECK(a.snapshot_hash == b.snapshot_hash);
  CHECK(a.rank_or_modes == b.rank_or_modes);
  CHECK(a.converged);
  CHECK(a.method == "tt");
  CHECK(a.metric == "l2-at-eval");

  RunConfig other = cfg;
  other.gamma = 1e-6;
  CHECK(other.hash() != cfg.hash());
  CHECK(snapshot_digest(s) == a.snapshot_hash);
}

TEST_CASE("self-prediction reproduces the stored snapshot") {
  const SnapshotSet& s = toy_snapshots();
  for (Method m : {Method::rom, Method::ft}) {
    RunConfig cfg = toy_config(m);
    cfg.eval_time = cfg.train_cut_time;  // last training snapshot
    const RunReport rep = run_method(s, cfg, "toy");
    CHECK(rep.converged);
    CHECK(rep.rel_error < 1e-10);
  }
}

TEST_CASE("every method predicts the toy diffusion accurately") {
  const SnapshotSet& s = toy_snapshots();
  for (Method m : {Method::rom, Method::tt_rom, Method::ft, Method::tt,
                   Method::qtt}) {
    const RunReport rep = run_method(s, toy_config(m), "toy");
    CHECK(rep.converged);
    CHECK(rep.rel_error < 1e-2);
    if (m == Method::rom || m == Method::tt_rom) {
      REQUIRE(rep.rank_or_modes.size() == 1);
      CHECK(rep.rank_or_modes[0] >= 1);
    }
  }
}

TEST_CASE("the max-over-times metric lands on every snapshot") {
  // forcing intermediate landings usually tightens the trajectory, so the
  // maximum is not comparable to the two-point at-eval number; check the
  // tag and that the score stays a sane relative error
  const SnapshotSet& s = toy_snapshots();
  RunConfig cfg = toy_config(Method::ft);
  cfg.metric = ErrorMetric::max_over_times;
  const RunReport rep = run_method(s, cfg, "toy");
  CHECK(rep.converged);
  CHECK(rep.metric == "max-over-times");
  CHECK(rep.rel_error > 0.0);
  CHECK(rep.rel_error < 1e-2);
}

TEST_CASE("bad run requests are rejected up front") {
  const SnapshotSet& s = toy_snapshots();

  RunConfig off_grid = toy_config(Method::rom);
  off_grid.eval_time = 0.093;  // between snapshots
  CHECK_THROWS_AS((void)run_method(s, off_grid, "toy"), InvalidInputError);

  RunConfig backwards = toy_config(Method::rom);
  backwards.eval_time = 0.02;  // before the training cut
  CHECK_THROWS_AS((void)run_method(s, backwards, "toy"), InvalidInputError);

  SnapshotSet flat(SnapshotSet::Layout::unstructured, {64}, s.count, s.t0,
                   s.dt);
  for (Index k = 0; k < s.count; ++k) flat.set_snapshot(k, s.snapshot(k));
  CHECK_THROWS_AS((void)run_method(flat, toy_config(Method::ft), "toy"),
                  InvalidInputError);
  CHECK_THROWS_AS((void)run_method(flat, toy_config(Method::tt), "toy"),
                  InvalidInputError);
  // rom and qtt accept unstructured layouts
  CHECK(run_method(flat, toy_config(Method::rom), "toy").converged);
  CHECK(run_method(flat, toy_config(Method::qtt), "toy").converged);
}

TEST_CASE("integration failures are reported, not thrown") {
  const SnapshotSet& s = toy_snapshots();
  RunConfig cfg = toy_config(Method::ft);
  cfg.prediction.max_steps = 1;  // starve the integrator
  cfg.prediction.rtol = 1e-12;   // so one step cannot span the window
  cfg.prediction.atol = 1e-14;
  const RunReport rep = run_method(s, cfg, "toy");
  CHECK_FALSE(rep.converged);
  CHECK_FALSE(rep.failure.empty());
  CHECK(std::isnan(rep.rel_error));

  // the failed run still serializes cleanly
  const auto j = nlohmann::json::parse(report_json(rep));
  CHECK(j["rel_error"].is_null());
  CHECK(j["converged"] == false);
  CHECK(j["failure"].is_string());
}

TEST_CASE("csv and json rows carry the full report") {
  const SnapshotSet& s = toy_snapshots();
  const RunReport rep = run_method(s, toy_config(Method::tt), "toy");

  const std::string header = report_csv_header();
  const std::string row = report_csv_row(rep);
  CHECK(count_fields(header) == 11);
  CHECK(count_fields(row) == 11);
  CHECK(header.substr(0, 8) == "problem,");
  CHECK(row.substr(0, 4) == "toy,");
  CHECK(row.find("true") != std::string::npos);

  const auto j = nlohmann::json::parse(report_json(rep));
  CHECK(j["problem"] == "toy");
  CHECK(j["method"] == "tt");
  CHECK(j["metric"] == "l2-at-eval");
  CHECK(j["converged"] == true);
  CHECK(j["failure"].is_null());
  CHECK(j["rel_error"].get<double>() == doctest::Approx(rep.rel_error));
  CHECK(j["rank_or_modes"].is_array());
  CHECK(j["config_hash"].is_string());
}

TEST_CASE("canonical config strings resolve every field") {
  RunConfig a = toy_config(Method::qtt);
  const std::string s = a.canonical();
  CHECK(s.find("method=qtt") != std::string::npos);
  CHECK(s.find("metric=l2-at-eval") != std::string::npos);

  RunConfig b = a;
  CHECK(a.hash() == b.hash());
  b.seed = 17;
  CHECK(a.hash() != b.hash());
  b = a;
  b.prediction.rtol = 1e-5;
  CHECK(a.hash() != b.hash());
}

TEST_SUITE_END();
