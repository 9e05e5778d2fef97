#include "pileup/study.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pileup/discrete_energy.hpp"
#include "pileup/measures.hpp"
#include "pileup/optimizer.hpp"

namespace pileup::study {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json number_or_string(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

}  // namespace

bool non_increasing_within_band(const std::vector<double>& g) {
  if (g.size() < static_cast<std::size_t>(kWindow)) return false;
  for (std::size_t k = g.size() - kWindow + 1; k < g.size(); ++k) {
    if (!(g[k] <= kBand * g[k - 1])) return false;
  }
  return true;
}

continuum::LimitConstants constants_of(const scaling::RegimeReport& r) {
  return {r.c_tilde, r.Lambda, r.beta, r.C};
}

energy::RegimeContext context_at(const scaling::RegimeReport& r, const scaling::Model& model,
                                 int n) {
  return energy::make_context(r, model, n);
}

std::vector<double> warm_start(const std::vector<double>& continuum_quantile, int n,
                               double upper) {
  const auto curve = measures::quantile_curve(measures::QuantileFn{continuum_quantile});
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[i] = std::min(curve((i + 0.5) / n), upper);
  return x;
}

std::vector<double> random_start(int n, double upper, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const double w = std::min(1.0, upper);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (double& v : x) v = w * u(rng);
  std::sort(x.begin(), x.end());
  // Break any ties so the start avoids the singular set.
  for (int i = 1; i < n; ++i) x[i] = std::max(x[i], x[i - 1] + 1e-9 * w);
  return x;
}

StudyResult run_convergence_study(const config::StudyConfig& cfg) {
  config::validate(cfg);
  StudyResult res;
  res.regime = scaling::classify(cfg.model);
  res.constants = constants_of(res.regime);
  const auto& R = res.regime;

  const opt::SolveReport cont =
      R.particular_case() ? continuum::minimize_particular_case(*R.Lambda, cfg.m_continuum)
                          : continuum::minimize_limit(R.p, R.q, res.constants, cfg.m_continuum,
                                                      cfg.solver);
  res.continuum_objective = cont.objective;
  res.continuum_minimizer = cont.minimizer;
  const measures::QuantileFn cont_q{cont.minimizer};

  std::vector<double> energy_gaps, w1s;
  for (int n : cfg.n_list) {
    const auto ctx = context_at(R, cfg.model, n);
    const double upper = energy::barrier_upper(ctx);
    Record rec;
    rec.n = n;
    const auto rep =
        opt::minimize_discrete(ctx, n, warm_start(cont.minimizer, n, upper), cfg.solver);
    const auto parts = energy::energy_parts(ctx, rep.minimizer);
    rec.objective = rep.objective;
    rec.interaction = parts.interaction;
    rec.force = parts.force;
    rec.iterations = rep.iterations;
    rec.kkt_residual = rep.kkt_residual;
    rec.converged = rep.converged;
    rec.message = rep.message;
    rec.energy_gap = std::fabs(rep.objective - res.continuum_objective);
    rec.w1 = measures::w1_distance(measures::empirical(rep.minimizer), cont_q);
    energy_gaps.push_back(rec.energy_gap);
    w1s.push_back(rec.w1);
    res.records.push_back(std::move(rec));
  }

  // Uniqueness probe at the largest n not above 256.
  int probe_n = cfg.n_list.front();
  for (int n : cfg.n_list) {
    if (n <= 256) probe_n = n;
  }
  {
    const auto ctx = context_at(R, cfg.model, probe_n);
    const double upper = energy::barrier_upper(ctx);
    const auto a = opt::minimize_discrete(ctx, probe_n, std::nullopt, cfg.solver);
    const auto b =
        opt::minimize_discrete(ctx, probe_n, random_start(probe_n, upper, cfg.seed), cfg.solver);
    double gap = 0.0;
    for (int i = 0; i < probe_n; ++i) {
      gap = std::max(gap, std::fabs(a.minimizer[i] - b.minimizer[i]));
    }
    res.uniqueness_n = probe_n;
    res.uniqueness_gap = gap;
  }

  res.energy_consistent = non_increasing_within_band(energy_gaps);
  res.w1_consistent = non_increasing_within_band(w1s);
  res.verdict = res.energy_consistent && res.w1_consistent ? "consistent" : "inconsistent";
  return res;
}

LogStudyResult run_log_study(const config::StudyConfig& cfg) {
  config::validate(cfg);
  LogStudyResult res;
  res.regime = scaling::classify(cfg.model);
  res.M = cfg.M;
  if (res.regime.p != 5 || res.regime.q < 2 || res.regime.particular_case()) {
    throw config::ConfigError("log study: needs p = 5 and q in {2, 3} (finite beta)");
  }
  const double upper = 1.0 / cfg.M;
  std::vector<double> errors;
  for (int n : cfg.n_list) {
    const auto ctx = context_at(res.regime, cfg.model, n);
    opt::DiscreteObjective f(ctx, n);
    auto options = cfg.solver;
    options.gap_to_origin = true;
    std::vector<double> x0(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x0[i] = (i + 1) * upper / (n + 1);
    const auto rep = opt::minimize(f, x0, upper, options);
    LogRecord rec;
    rec.n = n;
    rec.alpha_n = ctx.alpha_n;
    rec.value = energy::log_rescaled_energy(ctx, rep.minimizer);
    rec.target = 1.0 - 1.0 / cfg.M;
    rec.error = std::fabs(rec.value - rec.target);
    rec.converged = rep.converged;
    errors.push_back(rec.error);
    res.records.push_back(rec);
  }
  res.verdict = non_increasing_within_band(errors) ? "consistent" : "inconsistent";
  return res;
}

csv::Table to_table(const StudyResult& r) {
  csv::Table t;
  t.meta.push_back("converge-study p=" + std::to_string(r.regime.p) +
                   " q=" + std::to_string(r.regime.q));
  t.meta.push_back("continuum_objective=" + csv::format_number(r.continuum_objective));
  t.meta.push_back("verdict=" + r.verdict + " band=" + csv::format_number(kBand) +
                   " window=" + std::to_string(kWindow));
  t.columns = {"n", "objective", "interaction", "force", "iterations",
               "kkt_residual", "converged", "energy_gap", "w1"};
  for (const auto& rec : r.records) {
    t.rows.push_back({static_cast<double>(rec.n), rec.objective, rec.interaction, rec.force,
                      static_cast<double>(rec.iterations), rec.kkt_residual,
                      rec.converged ? 1.0 : 0.0, rec.energy_gap, rec.w1});
  }
  return t;
}

json to_json(const StudyResult& r) {
  json j;
  j["regime"] = config::to_json(r.regime);
  j["continuum_objective"] = number_or_string(r.continuum_objective);
  j["records"] = json::array();
  for (const auto& rec : r.records) {
    j["records"].push_back({{"n", rec.n},
                            {"objective", number_or_string(rec.objective)},
                            {"interaction", number_or_string(rec.interaction)},
                            {"force", number_or_string(rec.force)},
                            {"iterations", rec.iterations},
                            {"kkt_residual", number_or_string(rec.kkt_residual)},
                            {"converged", rec.converged},
                            {"message", rec.message},
                            {"energy_gap", number_or_string(rec.energy_gap)},
                            {"w1", number_or_string(rec.w1)}});
  }
  j["energy_consistent"] = r.energy_consistent;
  j["w1_consistent"] = r.w1_consistent;
  j["verdict"] = r.verdict;
  j["verdict_rule"] = {{"band", kBand}, {"window", kWindow}};
  j["uniqueness"] = {{"n", r.uniqueness_n}, {"max_abs_difference", r.uniqueness_gap}};
  return j;
}

csv::Table to_table(const LogStudyResult& r) {
  csv::Table t;
  t.meta.push_back("log-study p=" + std::to_string(r.regime.p) +
                   " q=" + std::to_string(r.regime.q) + " M=" + csv::format_number(r.M));
  t.meta.push_back("verdict=" + r.verdict + " band=" + csv::format_number(kBand) +
                   " window=" + std::to_string(kWindow));
  t.columns = {"n", "alpha_n", "value", "target", "error", "converged"};
  for (const auto& rec : r.records) {
    t.rows.push_back({static_cast<double>(rec.n), rec.alpha_n, rec.value, rec.target, rec.error,
                      rec.converged ? 1.0 : 0.0});
  }
  return t;
}

json to_json(const LogStudyResult& r) {
  json j;
  j["regime"] = config::to_json(r.regime);
  j["M"] = r.M;
  j["records"] = json::array();
  for (const auto& rec : r.records) {
    j["records"].push_back({{"n", rec.n},
                            {"alpha_n", rec.alpha_n},
                            {"value", number_or_string(rec.value)},
                            {"target", rec.target},
                            {"error", number_or_string(rec.error)},
                            {"converged", rec.converged}});
  }
  j["verdict"] = r.verdict;
  return j;
}

}  // namespace pileup::study
