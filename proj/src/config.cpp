#include "pileup/config.hpp"

#include <cmath>
#include <fstream>

namespace pileup::config {

using nlohmann::json;

namespace {

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  if (!j[key].is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return j[key].get<double>();
}

json optional_number(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return "inf";
  return *v;
}

std::optional<double> parse_optional(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (j[key].is_string()) {
    const auto s = j[key].get<std::string>();
    if (s == "inf" || s == "Infinity") return scaling::kInfinity;
    throw ConfigError(std::string("'") + key + "' must be a number or \"inf\"");
  }
  if (!j[key].is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return j[key].get<double>();
}

}  // namespace

scaling::PowerLawSeq parse_seq(const json& j, const std::string& what) {
  if (j.is_number()) {
    const double c = j.get<double>();
    if (!(c > 0.0)) throw ConfigError(what + ": coefficient must be positive");
    return scaling::constant(c);
  }
  if (!j.is_object()) throw ConfigError(what + ": expected {coeff, exp_n, exp_log}");
  scaling::PowerLawSeq s{number(j, "coeff", 1.0), number(j, "exp_n", 0.0),
                         number(j, "exp_log", 0.0)};
  if (!(s.coeff > 0.0) || !std::isfinite(s.coeff)) {
    throw ConfigError(what + ": coeff must be positive and finite");
  }
  if (!std::isfinite(s.exp_n) || !std::isfinite(s.exp_log)) {
    throw ConfigError(what + ": exponents must be finite");
  }
  return s;
}

scaling::Model parse_model(const json& j) {
  if (!j.is_object()) throw ConfigError("model: expected a JSON object");
  if (j.contains("family")) {
    const json& f = j["family"];
    if (!f.contains("alpha")) throw ConfigError("family: 'alpha' is required");
    scaling::DirectFamily fam{parse_seq(f["alpha"], "family.alpha"), std::nullopt};
    if (f.contains("Lambda") && !f["Lambda"].is_null()) {
      fam.Lambda = parse_seq(f["Lambda"], "family.Lambda");
    }
    return fam;
  }
  const json& p = j.contains("params") ? j["params"] : j;
  for (const char* key : {"h", "K", "sigma"}) {
    if (!p.contains(key)) throw ConfigError(std::string("model: '") + key + "' is required");
  }
  scaling::ParamSequences ps{parse_seq(p["h"], "h"), parse_seq(p["K"], "K"),
                             parse_seq(p["sigma"], "sigma"), std::nullopt};
  if (p.contains("L") && !p["L"].is_null()) ps.L = parse_seq(p["L"], "L");
  return ps;
}

continuum::LimitConstants parse_constants(const json& j) {
  if (!j.is_object()) throw ConfigError("constants: expected a JSON object");
  continuum::LimitConstants k;
  k.c_tilde = parse_optional(j, "c_tilde");
  k.Lambda = parse_optional(j, "Lambda");
  k.beta = parse_optional(j, "beta");
  k.C = parse_optional(j, "C");
  return k;
}

opt::SolverOptions parse_solver(const json& j) {
  opt::SolverOptions o;
  if (j.is_null()) return o;
  if (!j.is_object()) throw ConfigError("solver: expected a JSON object");
  o.tolerance = number(j, "tolerance", o.tolerance);
  o.max_iterations = static_cast<int>(number(j, "max_iterations", o.max_iterations));
  if (!(o.tolerance > 0.0)) throw ConfigError("solver.tolerance must be positive");
  if (o.max_iterations < 1) throw ConfigError("solver.max_iterations must be >= 1");
  return o;
}

json to_json(const scaling::PowerLawSeq& s) {
  return {{"coeff", s.coeff}, {"exp_n", s.exp_n}, {"exp_log", s.exp_log}};
}

json to_json(const scaling::RegimeReport& r) {
  json j;
  j["p"] = r.p;
  j["q"] = r.q;
  j["c_tilde"] = optional_number(r.c_tilde);
  j["Lambda"] = optional_number(r.Lambda);
  j["beta"] = optional_number(r.beta);
  j["C"] = optional_number(r.C);
  j["particular_case"] = r.particular_case();
  j["ahat_form"] = to_json(r.ahat_form);
  j["ell_form"] = r.ell_form ? to_json(*r.ell_form) : json(nullptr);
  j["alpha_form"] = r.alpha_form ? to_json(*r.alpha_form) : json(nullptr);
  j["Lambda_form"] = r.Lambda_form ? to_json(*r.Lambda_form) : json(nullptr);
  j["beta_probe"] = {{"diverge_threshold", scaling::BetaProbe::kDivergeThreshold},
                     {"vanish_threshold", scaling::BetaProbe::kVanishThreshold},
                     {"relative_tolerance", scaling::BetaProbe::kRelTol},
                     {"log2_n_schedule", "10 * 2^(k/2), k < 58"}};
  return j;
}

void validate(const StudyConfig& cfg) {
  if (cfg.n_list.empty()) throw ConfigError("study: n_list must not be empty");
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    if (cfg.n_list[i] < 1) throw ConfigError("study: n_list entries must be >= 1");
    if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1]) {
      throw ConfigError("study: n_list must be strictly increasing");
    }
  }
  if (cfg.m_continuum < 100) throw ConfigError("study: m_continuum must be >= 100");
  if (!(cfg.M >= 1.0)) throw ConfigError("study: M must be >= 1");
}

StudyConfig parse_study(const json& j) {
  StudyConfig cfg;
  cfg.model = parse_model(j);
  if (!j.contains("n_list") || !j["n_list"].is_array()) {
    throw ConfigError("study: 'n_list' must be an array");
  }
  for (const auto& v : j["n_list"]) {
    if (!v.is_number_integer()) throw ConfigError("study: n_list entries must be integers");
    cfg.n_list.push_back(v.get<int>());
  }
  cfg.m_continuum = static_cast<int>(number(j, "m_continuum", cfg.m_continuum));
  if (j.contains("solver")) cfg.solver = parse_solver(j["solver"]);
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  cfg.threads = static_cast<int>(number(j, "threads", 0));
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  cfg.M = number(j, "M", cfg.M);
  validate(cfg);
  return cfg;
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace pileup::config
