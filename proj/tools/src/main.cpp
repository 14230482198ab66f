// SPDX-License-Identifier: MIT
//
// Benchmark harness: generates snapshot data, runs a single method, builds
// comparison tables, and inspects snapshot files.
//
// Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 I/O error.

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ttoi/errors.hpp"
#include "ttoi/pde_gen.hpp"
#include "ttoi/runner.hpp"
#include "ttoi/snapshot_io.hpp"

namespace {

using ttoi::Index;

struct GenerateArgs {
  std::string problem;
  std::string out;
  Index nx = 20;
  Index ny = 20;
  double mu = 0.01;
  double t_final = -1.0;  // <0: per-problem default
  double dt = -1.0;
  double extent = -1.0;  // square domain edge length
};

struct RunArgs {
  std::string in;
  std::string problem;  // label; defaults to the input file stem
  std::string method;
  std::string metric = "l2-at-eval";
  std::string factor_policy = "ascending-primes";
  std::string format = "both";  // csv | json | both
  std::string dump;             // predicted-field output path
  double eps_tt = 1e-12;
  double gamma = 0.0;
  double lambda_a = 0.0;
  double lambda_f = 0.0;
  Index n_modes = 0;
  double train_cut = std::numeric_limits<double>::quiet_NaN();
  double eval_time = std::numeric_limits<double>::quiet_NaN();
  int stencil_order = 4;
  std::uint64_t seed = 0;
  bool cross = false;
  double rtol = 1e-3;
  double atol = 1e-6;
  bool round_per_step = false;
};

void require_run_args(const RunArgs& a) {
  if (a.in.empty()) throw ttoi::InvalidInputError("run: 'in' is required");
  if (a.method.empty()) {
    throw ttoi::InvalidInputError("run: 'method' is required");
  }
  if (!std::isfinite(a.train_cut) || !std::isfinite(a.eval_time)) {
    throw ttoi::InvalidInputError(
        "run: 'train-cut' and 'eval-time' are required");
  }
}

std::string dims_string(const std::vector<Index>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i > 0) s += 'x';
    s += std::to_string(dims[i]);
  }
  return s;
}

void print_snapshot_info(const std::string& path, const ttoi::SnapshotSet& s) {
  const char* layout =
      s.layout == ttoi::SnapshotSet::Layout::structured ? "structured"
                                                        : "unstructured";
  std::printf(
      "%s: layout=%s dims=%s count=%lld t0=%g dt=%g hash=%016llx\n",
      path.c_str(), layout, dims_string(s.state_dims).c_str(),
      static_cast<long long>(s.count), s.t0, s.dt,
      static_cast<unsigned long long>(ttoi::fnv1a_file(path)));
}

ttoi::RunConfig to_run_config(const RunArgs& a) {
  ttoi::RunConfig cfg;
  cfg.method = ttoi::parse_method(a.method);
  cfg.epsilon_tt = a.eps_tt;
  cfg.gamma = a.gamma;
  cfg.lambda_a = a.lambda_a;
  cfg.lambda_f = a.lambda_f;
  cfg.n_modes_override = a.n_modes;
  cfg.train_cut_time = a.train_cut;
  cfg.eval_time = a.eval_time;
  cfg.stencil_order = a.stencil_order;
  cfg.metric = ttoi::parse_metric(a.metric);
  cfg.factor_policy = ttoi::parse_factor_policy(a.factor_policy);
  cfg.use_cross = a.cross;
  cfg.seed = a.seed;
  cfg.prediction.rtol = a.rtol;
  cfg.prediction.atol = a.atol;
  cfg.prediction.round_per_step = a.round_per_step;
  return cfg;
}

int cmd_generate(const GenerateArgs& a) {
  ttoi::PdeProblem p;
  if (a.problem == "heat") {
    p.kind = ttoi::PdeProblem::Kind::heat;
    p.t_final = a.t_final < 0 ? 1.0 : a.t_final;
    p.dt_snapshot = a.dt < 0 ? 0.01 : a.dt;
  } else if (a.problem == "burgers") {
    p.kind = ttoi::PdeProblem::Kind::burgers;
    p.t_final = a.t_final < 0 ? 0.1 : a.t_final;
    p.dt_snapshot = a.dt < 0 ? 0.001 : a.dt;
  } else {
    throw ttoi::InvalidInputError("unknown problem: " + a.problem);
  }
  p.mu = a.mu;
  if (p.dt_snapshot <= 0.0) {
    throw ttoi::InvalidInputError("generate: snapshot spacing must be > 0");
  }

  const double edge =
      a.extent > 0 ? a.extent
                   : (p.kind == ttoi::PdeProblem::Kind::heat ? 1.0 : 4.0);
  ttoi::GridSpec2d grid{a.nx, a.ny, 0.0, edge, 0.0, edge};

  const ttoi::SnapshotSet snaps = ttoi::generate_snapshots(p, grid);
  ttoi::write_snapshots(a.out, snaps);
  print_snapshot_info(a.out, snaps);
  return 0;
}

int cmd_inspect(const std::string& path) {
  const ttoi::SnapshotSet snaps = ttoi::read_snapshots(path);
  print_snapshot_info(path, snaps);
  return 0;
}

int emit_run(const std::string& format, const ttoi::RunReport& rep) {
  if (format == "csv" || format == "both") {
    std::printf("%s\n%s\n", ttoi::report_csv_header().c_str(),
                ttoi::report_csv_row(rep).c_str());
  }
  if (format == "json" || format == "both") {
    std::printf("%s\n", ttoi::report_json(rep).c_str());
  }
  return rep.converged ? 0 : 3;
}

int cmd_run(const RunArgs& args) {
  const ttoi::SnapshotSet snaps = ttoi::read_snapshots(args.in);
  const ttoi::RunConfig cfg = to_run_config(args);
  const std::string label =
      args.problem.empty() ? std::filesystem::path(args.in).stem().string()
                           : args.problem;

  Eigen::VectorXd predicted;
  ttoi::RunReport rep = ttoi::run_method(snaps, cfg, label, &predicted);
  rep.snapshot_hash = ttoi::fnv1a_file(args.in);

  if (!args.dump.empty() && rep.converged) {
    ttoi::SnapshotSet one(snaps.layout, snaps.state_dims, 1, cfg.eval_time,
                          snaps.dt);
    one.set_snapshot(0, predicted);
    ttoi::write_snapshots(args.dump, one);
  }
  return emit_run(args.format, rep);
}

/// Flat key=value config, '#' comments, blank lines ignored.
std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ttoi::IoError("cannot open config: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) {
      line.resize(h);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ttoi::InvalidInputError(path + ": expected key = value: " + line);
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

/// Applies config keys onto `a`; `use_key` rejects keys already pinned by
/// command-line flags (flags win).
template <class KeyFilter>
void apply_config(RunArgs& a, const std::map<std::string, std::string>& kv,
                  const std::string& path, const KeyFilter& use_key) {
  for (const auto& [key, value] : kv) {
    bool known = true;
    try {
      if (key == "in") {
        if (use_key(key)) a.in = value;
      } else if (key == "problem") {
        if (use_key(key)) a.problem = value;
      } else if (key == "method") {
        if (use_key(key)) a.method = value;
      } else if (key == "metric") {
        if (use_key(key)) a.metric = value;
      } else if (key == "factor-policy") {
        if (use_key(key)) a.factor_policy = value;
      } else if (key == "eps-tt") {
        if (use_key(key)) a.eps_tt = std::stod(value);
      } else if (key == "gamma") {
        if (use_key(key)) a.gamma = std::stod(value);
      } else if (key == "lambda-a") {
        if (use_key(key)) a.lambda_a = std::stod(value);
      } else if (key == "lambda-f") {
        if (use_key(key)) a.lambda_f = std::stod(value);
      } else if (key == "n-modes") {
        if (use_key(key)) a.n_modes = std::stoll(value);
      } else if (key == "train-cut") {
        if (use_key(key)) a.train_cut = std::stod(value);
      } else if (key == "eval-time") {
        if (use_key(key)) a.eval_time = std::stod(value);
      } else if (key == "stencil-order") {
        if (use_key(key)) a.stencil_order = std::stoi(value);
      } else if (key == "seed") {
        if (use_key(key)) a.seed = std::stoull(value);
      } else if (key == "cross") {
        if (use_key(key)) a.cross = value == "1" || value == "true";
      } else if (key == "rtol") {
        if (use_key(key)) a.rtol = std::stod(value);
      } else if (key == "atol") {
        if (use_key(key)) a.atol = std::stod(value);
      } else if (key == "round-per-step") {
        if (use_key(key)) a.round_per_step = value == "1" || value == "true";
      } else {
        known = false;
      }
    } catch (const std::invalid_argument&) {
      throw ttoi::InvalidInputError(path + ": bad value for " + key + ": " +
                                    value);
    } catch (const std::out_of_range&) {
      throw ttoi::InvalidInputError(path + ": bad value for " + key + ": " +
                                    value);
    }
    if (!known) throw ttoi::InvalidInputError(path + ": unknown key: " + key);
  }
}

RunArgs args_from_map(const std::map<std::string, std::string>& kv,
                      const std::string& path) {
  RunArgs a;
  apply_config(a, kv, path, [](const std::string&) { return true; });
  require_run_args(a);
  return a;
}

int cmd_table(const std::vector<std::string>& configs,
              const std::string& format, const std::string& out) {
  std::vector<std::string> lines;
  const std::string header = ttoi::report_csv_header() + ",status";
  bool any_failed = false;

  for (const std::string& path : configs) {
    const RunArgs a = args_from_map(parse_config_file(path), path);
    const ttoi::RunConfig cfg = to_run_config(a);
    const std::string label =
        a.problem.empty() ? std::filesystem::path(a.in).stem().string()
                          : a.problem;
    ttoi::RunReport rep;
    bool failed = false;
    try {
      const ttoi::SnapshotSet snaps = ttoi::read_snapshots(a.in);
      rep = ttoi::run_method(snaps, cfg, label);
      rep.snapshot_hash = ttoi::fnv1a_file(a.in);
      failed = !rep.converged;
    } catch (const ttoi::Error& e) {
      rep.problem = label;
      rep.method = ttoi::method_name(cfg.method);
      rep.metric = ttoi::metric_name(cfg.metric);
      rep.config_hash = cfg.hash();
      rep.converged = false;
      rep.failure = e.what();
      rep.rel_error = std::numeric_limits<double>::quiet_NaN();
      failed = true;
    }
    any_failed = any_failed || failed;
    if (format == "json") {
      lines.push_back(ttoi::report_json(rep));
    } else {
      lines.push_back(ttoi::report_csv_row(rep) +
                      (failed ? ",failed" : ",ok"));
    }
  }

  std::string text;
  if (format != "json") text = header + "\n";
  for (const std::string& l : lines) text += l + "\n";
  std::fputs(text.c_str(), stdout);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw ttoi::IoError("cannot write table: " + out);
    f << text;
  }
  return any_failed ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tensor-train operator inference benchmark harness"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate =
      app.add_subcommand("generate", "integrate a model problem, write snapshots");
  generate->add_option("problem", gen.problem, "heat or burgers")->required();
  generate->add_option("--nx", gen.nx, "grid points in x");
  generate->add_option("--ny", gen.ny, "grid points in y");
  generate->add_option("--mu", gen.mu, "diffusion coefficient (heat)");
  generate->add_option("--t-final", gen.t_final, "final time");
  generate->add_option("--dt", gen.dt, "snapshot spacing");
  generate->add_option("--extent", gen.extent, "square domain edge length");
  generate->add_option("--out,-o", gen.out, "output snapshot file")
      ->required();

  RunArgs run;
  std::string run_config;
  std::map<std::string, CLI::Option*> run_opt;
  auto* runc = app.add_subcommand("run", "train one method and predict");
  runc->add_option("--config", run_config, "flat key=value config file");
  run_opt["in"] = runc->add_option("--in,-i", run.in, "snapshot file");
  run_opt["problem"] =
      runc->add_option("--problem", run.problem, "problem label");
  run_opt["method"] =
      runc->add_option("--method", run.method, "rom | tt-rom | ft | tt | qtt");
  run_opt["eps-tt"] =
      runc->add_option("--eps-tt", run.eps_tt, "train compression tolerance");
  run_opt["gamma"] =
      runc->add_option("--gamma", run.gamma, "ridge weight (ft/tt/qtt)");
  run_opt["lambda-a"] =
      runc->add_option("--lambda-a", run.lambda_a, "linear-block penalty");
  run_opt["lambda-f"] =
      runc->add_option("--lambda-f", run.lambda_f, "quadratic-block penalty");
  run_opt["n-modes"] =
      runc->add_option("--n-modes", run.n_modes, "POD mode-count override");
  run_opt["train-cut"] =
      runc->add_option("--train-cut", run.train_cut, "last training time");
  run_opt["eval-time"] =
      runc->add_option("--eval-time", run.eval_time, "prediction target time");
  run_opt["stencil-order"] = runc->add_option(
      "--stencil-order", run.stencil_order,
      "time-derivative stencil order (2 or 4)");
  run_opt["metric"] = runc->add_option(
      "--metric", run.metric, "l2-at-eval | linf-at-eval | max-over-times");
  run_opt["seed"] =
      runc->add_option("--seed", run.seed, "cross-interpolation seed");
  run_opt["factor-policy"] = runc->add_option(
      "--factor-policy", run.factor_policy, "ascending-primes | merged");
  run_opt["cross"] =
      runc->add_flag("--cross", run.cross, "compress by cross interpolation");
  run_opt["rtol"] =
      runc->add_option("--rtol", run.rtol, "prediction relative tolerance");
  run_opt["atol"] =
      runc->add_option("--atol", run.atol, "prediction absolute tolerance");
  run_opt["round-per-step"] =
      runc->add_flag("--round-per-step", run.round_per_step,
                     "round once per step instead of per stage");
  runc->add_option("--format", run.format, "csv | json | both");
  runc->add_option("--out,-o", run.dump, "write the predicted field here");

  std::vector<std::string> table_configs;
  std::string table_format = "csv";
  std::string table_out;
  auto* table =
      app.add_subcommand("table", "aggregate runs from config files");
  table->add_option("configs", table_configs, "run config files");
  table->add_option("--format", table_format, "csv | json");
  table->add_option("--out,-o", table_out, "also write the table here");

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "print a snapshot header");
  inspect->add_option("file", inspect_path, "snapshot file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen);
    if (runc->parsed()) {
      if (!run_config.empty()) {
        apply_config(run, parse_config_file(run_config), run_config,
                     [&run_opt](const std::string& key) {
                       const auto it = run_opt.find(key);
                       return it == run_opt.end() || it->second->count() == 0;
                     });
      }
      require_run_args(run);
      return cmd_run(run);
    }
    if (table->parsed()) return cmd_table(table_configs, table_format,
                                          table_out);
    if (inspect->parsed()) return cmd_inspect(inspect_path);
  } catch (const ttoi::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const ttoi::InvalidInputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ttoi::ShapeError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ttoi::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
