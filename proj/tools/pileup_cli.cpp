// pileup: command-line front end.
//
//   pileup classify        --config model.json
//   pileup potential-table --rmin A --rmax B --steps K --out table.csv
//   pileup energy          --config model.json --positions pos.csv
//   pileup minimize        --config model.json --n 256 --out min.csv
//   pileup limit-minimize  --p P --q Q --constants c.json --m 800 --out rho.csv
//   pileup converge-study  --config study.json [--out dir]
//   pileup log-study       --config study.json [--out dir]
//
// Exit codes: 0 ok, 1 configuration error, 2 solver did not converge,
// 3 unclassifiable regime.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pileup/config.hpp"
#include "pileup/continuum.hpp"
#include "pileup/csv.hpp"
#include "pileup/discrete_energy.hpp"
#include "pileup/measures.hpp"
#include "pileup/optimizer.hpp"
#include "pileup/potential.hpp"
#include "pileup/scaling.hpp"
#include "pileup/study.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pileup;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNoConvergence = 2, kUnclassifiable = 3 };

struct Globals {
  std::string config;
  std::string out;
  int threads = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

json num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw config::ConfigError("cannot write " + path);
  f << j.dump(2) << '\n';
}

std::string sidecar(const std::string& csv_path) {
  fs::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

std::string require_config(const Globals& g) {
  if (g.config.empty()) throw config::ConfigError("--config is required");
  return g.config;
}

std::vector<double> read_positions(const std::string& path) {
  const auto t = csv::read_file(path);
  int col = t.column("position");
  if (col < 0) col = t.columns.empty() && !t.rows.empty() ? static_cast<int>(t.rows[0].size()) - 1
                                                          : static_cast<int>(t.columns.size()) - 1;
  std::vector<double> x;
  for (const auto& row : t.rows) {
    if (col < 0 || static_cast<std::size_t>(col) >= row.size()) {
      throw config::ConfigError(path + ": no position column");
    }
    x.push_back(row[col]);
  }
  if (x.empty()) throw config::ConfigError(path + ": no positions");
  return x;
}

int cmd_classify(const Globals& g) {
  const auto model = config::parse_model(config::read_json_file(require_config(g)));
  const auto r = scaling::classify(model);
  const json j = config::to_json(r);
  std::cout << j.dump(2) << '\n';
  if (!g.out.empty()) write_json(g.out, j);
  return kOk;
}

int cmd_potential_table(const Globals& g, double rmin, double rmax, int steps) {
  if (!(rmin > 0.0) || !(rmax > rmin) || steps < 1) {
    throw config::ConfigError("potential-table: need 0 < rmin < rmax and steps >= 1");
  }
  csv::Table t;
  t.meta.push_back("potential V(r) = r coth r - log|sinh r| - log 2");
  t.columns = {"r", "V", "dV"};
  // steps intervals, steps + 1 rows, both ends included.
  for (int i = 0; i <= steps; ++i) {
    const double r = i == steps ? rmax : rmin + (rmax - rmin) * i / steps;
    t.rows.push_back({r, potential::eval_V(r), potential::eval_dV(r)});
  }
  if (g.out.empty()) {
    csv::write(std::cout, t);
  } else {
    csv::write_file(g.out, t);
  }
  return kOk;
}

int cmd_energy(const Globals& g, const std::string& positions) {
  const auto model = config::parse_model(config::read_json_file(require_config(g)));
  const auto r = scaling::classify(model);
  const auto x = read_positions(positions);
  const int n = static_cast<int>(x.size());
  const auto ctx = energy::make_context(r, model, n);
  const auto parts = energy::energy_parts(ctx, x);
  json j{{"n", n},
         {"p", r.p},
         {"q", r.q},
         {"total", num(parts.total)},
         {"interaction", num(parts.interaction)},
         {"force", num(parts.force)},
         {"barrier", num(parts.barrier)}};
  std::cout << j.dump(2) << '\n';
  if (!g.out.empty()) write_json(g.out, j);
  return kOk;
}

int cmd_minimize(const Globals& g, int n) {
  if (n < 1) throw config::ConfigError("minimize: --n must be >= 1");
  const auto root = config::read_json_file(require_config(g));
  const auto model = config::parse_model(root);
  const auto options = root.contains("solver") ? config::parse_solver(root["solver"])
                                                : opt::SolverOptions{};
  const auto r = scaling::classify(model);
  const auto ctx = energy::make_context(r, model, n);
  const auto rep = opt::minimize_discrete(ctx, n, std::nullopt, options);
  csv::Table t;
  t.meta.push_back("minimize n=" + std::to_string(n) + " p=" + std::to_string(r.p) +
                   " q=" + std::to_string(r.q));
  t.columns = {"index", "position"};
  for (int i = 0; i < n; ++i) t.rows.push_back({static_cast<double>(i + 1), rep.minimizer[i]});
  const json summary{{"n", n},
                     {"p", r.p},
                     {"q", r.q},
                     {"objective", num(rep.objective)},
                     {"iterations", rep.iterations},
                     {"kkt_residual", num(rep.kkt_residual)},
                     {"converged", rep.converged},
                     {"message", rep.message}};
  if (g.out.empty()) {
    csv::write(std::cout, t);
    std::cerr << summary.dump(2) << '\n';
  } else {
    csv::write_file(g.out, t);
    write_json(sidecar(g.out), summary);
  }
  return rep.converged ? kOk : kNoConvergence;
}

int cmd_limit_minimize(const Globals& g, int p, int q, const std::string& constants, int m) {
  if (m < 2) throw config::ConfigError("limit-minimize: --m must be >= 2");
  const auto k = constants.empty() ? continuum::LimitConstants{}
                                   : config::parse_constants(config::read_json_file(constants));
  try {
    continuum::validate(p, q, k);
  } catch (const scaling::ParticularCaseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw config::ConfigError(e.what());
  }
  const auto rep = continuum::minimize_limit(p, q, k, m);
  const auto rho = measures::density_from_quantile(measures::QuantileFn{rep.minimizer}, m);
  csv::Table t;
  t.meta.push_back("limit-minimize p=" + std::to_string(p) + " q=" + std::to_string(q) +
                   " m=" + std::to_string(m) + " width=" + csv::format_number(rho.width));
  t.columns = {"x", "rho"};
  for (int i = 0; i < rho.m(); ++i) {
    t.rows.push_back({(i + 0.5) * rho.cell_width(), rho.density(i)});
  }
  const json summary{{"p", p},
                     {"q", q},
                     {"m", m},
                     {"objective", num(rep.objective)},
                     {"iterations", rep.iterations},
                     {"kkt_residual", num(rep.kkt_residual)},
                     {"converged", rep.converged}};
  if (g.out.empty()) {
    csv::write(std::cout, t);
    std::cerr << summary.dump(2) << '\n';
  } else {
    csv::write_file(g.out, t);
    write_json(sidecar(g.out), summary);
  }
  return rep.converged ? kOk : kNoConvergence;
}

config::StudyConfig load_study(const Globals& g) {
  auto cfg = config::parse_study(config::read_json_file(require_config(g)));
  if (!g.out.empty()) cfg.output_dir = g.out;
  if (g.threads > 0) cfg.threads = g.threads;
  if (g.seed_set) cfg.seed = g.seed;
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  fs::create_directories(cfg.output_dir);
  return cfg;
}

int cmd_converge_study(const Globals& g) {
  const auto cfg = load_study(g);
  const auto res = study::run_convergence_study(cfg);
  const fs::path dir(cfg.output_dir);
  csv::write_file((dir / "converge_study.csv").string(), study::to_table(res));
  write_json((dir / "converge_study.json").string(), study::to_json(res));
  std::cout << "verdict: " << res.verdict << '\n';
  for (const auto& rec : res.records) {
    if (!rec.converged) return kNoConvergence;
  }
  return kOk;
}

int cmd_log_study(const Globals& g) {
  const auto cfg = load_study(g);
  const auto res = study::run_log_study(cfg);
  const fs::path dir(cfg.output_dir);
  csv::write_file((dir / "log_study.csv").string(), study::to_table(res));
  write_json((dir / "log_study.json").string(), study::to_json(res));
  std::cout << "verdict: " << res.verdict << '\n';
  for (const auto& rec : res.records) {
    if (!rec.converged) return kNoConvergence;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete and continuum dislocation-wall pile-up energies"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON model or study configuration");
  app.add_option("--out", g.out, "output file (or directory for studies)");
  app.add_option("--threads", g.threads, "OpenMP threads (0: default)");
  auto* seed_opt = app.add_option("--seed", g.seed, "seed for randomized initializations");

  auto* classify = app.add_subcommand("classify", "classify a model into its (p, q) regime");
  classify->fallthrough();

  double rmin = 1e-3, rmax = 10.0;
  int steps = 100;
  auto* table = app.add_subcommand("potential-table", "tabulate V and V'");
  table->add_option("--rmin", rmin);
  table->add_option("--rmax", rmax);
  table->add_option("--steps", steps, "number of intervals");
  table->fallthrough();

  std::string positions;
  auto* energy_cmd = app.add_subcommand("energy", "evaluate E_n at given positions");
  energy_cmd->add_option("--positions", positions)->required();
  energy_cmd->fallthrough();

  int n = 0;
  auto* minimize = app.add_subcommand("minimize", "minimize E_n");
  minimize->add_option("--n", n)->required();
  minimize->fallthrough();

  int p = 0, q = 0, m = 800;
  std::string constants;
  auto* limit = app.add_subcommand("limit-minimize", "minimize the limit energy");
  limit->add_option("--p", p)->required();
  limit->add_option("--q", q)->required();
  limit->add_option("--constants", constants, "JSON {c_tilde, Lambda, beta, C}");
  limit->add_option("--m", m);
  limit->fallthrough();

  auto* converge = app.add_subcommand("converge-study", "discrete-to-continuum study");
  converge->fallthrough();
  auto* log_study = app.add_subcommand("log-study", "log-rescaled energy study");
  log_study->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  g.seed_set = seed_opt->count() > 0;
  if (g.threads > 0) omp_set_num_threads(g.threads);

  try {
    if (*classify) return cmd_classify(g);
    if (*table) return cmd_potential_table(g, rmin, rmax, steps);
    if (*energy_cmd) return cmd_energy(g, positions);
    if (*minimize) return cmd_minimize(g, n);
    if (*limit) return cmd_limit_minimize(g, p, q, constants, m);
    if (*converge) return cmd_converge_study(g);
    if (*log_study) return cmd_log_study(g);
  } catch (const scaling::UnclassifiableRegime& e) {
    std::cerr << "unclassifiable regime: " << e.what() << '\n';
    return kUnclassifiable;
  } catch (const scaling::ParticularCaseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kConfig;
}
