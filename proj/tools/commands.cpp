/*
 Copyright 2026 The delayh2 Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "delayh2/errors.hpp"
#include "delayh2/verify.hpp"

namespace delayh2::cli {

namespace {

void print_int_matrix(std::ostream& os, const IntMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << " ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << " " << m(i, j);
    os << "\n";
  }
}

std::string format_norm(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

IntMatrix plant_delays(const ProblemConfig& cfg, const DelayMatrix& d, double tol) {
  if (cfg.plant_delays) return *cfg.plant_delays;
  const auto& plant = cfg.require_plant();
  return plant_block_delays(plant.g22(), cfg.block_cols, cfg.block_rows,
                            static_cast<std::size_t>(d.max_delay()), tol);
}

std::string describe_witness(const DelayMatrix& d, const IntMatrix& p, const std::array<int, 4>& w) {
  const auto [k, i, j, l] = w;
  std::ostringstream os;
  os << "(k=" << k + 1 << ", i=" << i + 1 << ", j=" << j + 1 << ", l=" << l + 1
     << "): d_ki + p_ij + d_jl = " << d(k, i) + p(i, j) + d(j, l) << " < d_kl = " << d(k, l);
  return os.str();
}

SynthesisOptions synthesis_options(const ProblemConfig& cfg, const CommandOptions& opts) {
  SynthesisOptions so;
  so.normalization_tol = opts.tol.value_or(cfg.tol);
  return so;
}

QiResult run_qi(const ProblemConfig& cfg, const ConstraintSpace& cs, double tol) {
  const auto d = cs.implied_delays();
  return check_qi(d, plant_delays(cfg, d, tol));
}

}  // namespace

int cmd_check_qi(const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out,
                 std::ostream& err) {
  const double tol = opts.tol.value_or(kZeroBlockTol);
  const auto d = cfg.delay_matrix();
  const auto p = plant_delays(cfg, d, tol);
  if (!cfg.name.empty()) out << "problem: " << cfg.name << "\n";
  out << "delay matrix d (row: controller, column: measurement):\n";
  print_int_matrix(out, d.values());
  out << "plant block delays p (row: measurement, column: control):\n";
  print_int_matrix(out, p);
  const auto qi = check_qi(d, p);
  if (qi.holds) {
    out << "QI: pass\n";
    return kOk;
  }
  out << "QI: FAIL " << describe_witness(d, p, *qi.witness) << "\n";
  err << "constraint is not quadratically invariant\n";
  return kCheckFailed;
}

int cmd_synth(const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out,
              std::ostream& err) {
  const auto& plant = cfg.require_plant();
  const auto cs = cfg.constraint_space();
  if (!opts.force) {
    const auto qi = run_qi(cfg, cs, kZeroBlockTol);
    if (!qi.holds) {
      err << "QI check failed; rerun with --force to synthesize anyway\n";
      return kCheckFailed;
    }
  }
  const auto result = synthesize(plant, cs, synthesis_options(cfg, opts));
  if (!cfg.name.empty()) out << "problem: " << cfg.name << "\n";
  out << "horizon N: " << cs.horizon() << "\n";
  out << "controller order: " << result.controller.states() << "\n";
  out << "||P11||^2: " << format_norm(result.p11_norm_sq) << "\n";
  out << "QP cost: " << format_norm(result.qp_cost) << "\n";
  out << "H2 norm^2: " << format_norm(result.total_norm_sq) << "\n";
  out << "H2 norm: " << format_norm(std::sqrt(result.total_norm_sq)) << "\n";
  if (opts.out_path) {
    std::ofstream file(*opts.out_path);
    if (!file) {
      err << *opts.out_path << ": cannot open for writing\n";
      return kUsageError;
    }
    write_controller_file(file, cfg.name, result, cs.horizon());
    out << "controller written to " << *opts.out_path << "\n";
  }
  return kOk;
}

int cmd_sweep(const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out,
              std::ostream& err) {
  if (!std::holds_alternative<RepeatedPattern>(cfg.constraint)) {
    err << "sweep needs a constraint.repeated_pattern in the config\n";
    return kUsageError;
  }
  if (opts.n_min < 0 || opts.n_max < opts.n_min) {
    err << "sweep needs 0 <= --n-min <= --n-max\n";
    return kUsageError;
  }
  const auto& plant = cfg.require_plant();
  const auto so = synthesis_options(cfg, opts);
  const int rows = opts.n_max - opts.n_min + 1;

  struct Row {
    std::optional<double> norm;
    std::string warning;
  };
  std::vector<Row> results(static_cast<std::size_t>(rows));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < rows; r = next++) {
      auto& row = results[static_cast<std::size_t>(r)];
      const int n = opts.n_min + r;
      try {
        const auto cs = cfg.constraint_space(n);
        if (!opts.force && !run_qi(cfg, cs, kZeroBlockTol).holds) {
          row.warning = "constraint is not quadratically invariant";
          continue;
        }
        row.norm = std::sqrt(synthesize(plant, cs, so).total_norm_sq);
      } catch (const std::exception& e) {
        row.warning = e.what();
      }
    }
  };
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(rows));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ofstream file;
  if (opts.out_path) {
    file.open(*opts.out_path);
    if (!file) {
      err << *opts.out_path << ": cannot open for writing\n";
      return kUsageError;
    }
  }
  std::ostream& csv = opts.out_path ? static_cast<std::ostream&>(file) : out;
  csv << "N,norm\n";
  for (int r = 0; r < rows; ++r) {
    const auto& row = results[static_cast<std::size_t>(r)];
    csv << opts.n_min + r << ",";
    if (row.norm) csv << format_norm(*row.norm);
    csv << "\n";
    if (!row.norm) err << "warning: N=" << opts.n_min + r << ": " << row.warning << "\n";
  }
  if (opts.out_path) out << "wrote " << rows << " row(s) to " << *opts.out_path << "\n";
  return kOk;
}

int cmd_verify(const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out,
               std::ostream& err) {
  if (!opts.controller_path) {
    err << "verify needs --controller <path>\n";
    return kUsageError;
  }
  const auto& plant = cfg.require_plant();
  const auto file = load_controller_file(*opts.controller_path);
  const auto cs = cfg.constraint_space(file.horizon);
  const auto& k = file.controller;

  const auto report = conformance(k, cs, opts.tol.value_or(1e-7));
  out << "conformance: " << (report.conforms ? "pass" : "FAIL (" + report.summary() + ")")
      << "\n";

  bool stable = false;
  std::optional<ClosedLoop> cl;
  try {
    cl = closed_loop(plant, k);
    const double rho = spectral_radius(cl->model.a());
    stable = cl->internally_stable();
    out << "internal stability: " << (stable ? "pass" : "FAIL") << " (spectral radius "
        << format_norm(rho) << ")\n";
  } catch (const IllPosed& e) {
    out << "internal stability: FAIL (" << e.what() << ")\n";
  }
  if (stable) {
    const double norm = std::sqrt(h2_norm_sq(cl->model));
    out << "H2 norm: " << format_norm(norm) << "\n";
    if (file.norm) {
      out << "recorded norm: " << format_norm(*file.norm) << " (relative difference "
          << format_norm(std::abs(norm - *file.norm) / std::max(1e-300, std::abs(*file.norm)))
          << ")\n";
    }
  } else {
    out << "H2 norm: unavailable (closed loop unstable)\n";
  }
  return report.conforms && stable ? kOk : kCheckFailed;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"H2-optimal controller synthesis under communication delay constraints"};
  app.require_subcommand(1);

  std::string config_path;
  CommandOptions opts;
  std::string out_path;
  std::string controller_path;
  double tol = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "problem description (JSON)")->required();
    sub->add_option("--tol", tol, "override the zero tolerance used by this command");
  };
  auto* check = app.add_subcommand("check-qi", "test quadratic invariance of the delay pattern");
  add_common(check);
  auto* synth = app.add_subcommand("synth", "synthesize the optimal controller");
  add_common(synth);
  synth->add_option("--out", out_path, "controller output file");
  synth->add_flag("--force", opts.force, "skip the QI check");
  auto* sweep = app.add_subcommand("sweep", "optimal norm for a range of horizons");
  add_common(sweep);
  sweep->add_option("--out", out_path, "CSV output file (default stdout)");
  sweep->add_option("--n-min", opts.n_min, "first horizon")->required();
  sweep->add_option("--n-max", opts.n_max, "last horizon")->required();
  sweep->add_flag("--force", opts.force, "skip the QI check");
  sweep->add_option("--threads", opts.threads, "worker threads (0 = all cores)");
  auto* verify = app.add_subcommand("verify", "check a controller file against a problem");
  add_common(verify);
  verify->add_option("--controller", controller_path, "controller file from synth")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }
  if (!out_path.empty()) opts.out_path = out_path;
  if (!controller_path.empty()) opts.controller_path = controller_path;
  for (auto* sub : {check, synth, sweep, verify}) {
    if (sub->count("--tol") > 0) opts.tol = tol;
  }

  try {
    const auto cfg = load_config(config_path);
    if (check->parsed()) return cmd_check_qi(cfg, opts, out, err);
    if (synth->parsed()) return cmd_synth(cfg, opts, out, err);
    if (sweep->parsed()) return cmd_sweep(cfg, opts, out, err);
    return cmd_verify(cfg, opts, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
}

}  // namespace delayh2::cli
