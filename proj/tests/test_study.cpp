#include "doctest.h"
#include "pileup/config.hpp"
#include "pileup/study.hpp"

#include <cmath>
#include <filesystem>

using namespace pileup;
using nlohmann::json;

namespace {

json seq(double a, double b = 0.0, double c = 0.0) { return {{"coeff", a}, {"exp_n", b}, {"exp_log", c}}; }

// p = 5, q = 3: alpha_n = log n, Lambda_n = 1 / log n.
json family_53() { return {{"family", {{"alpha", seq(1, 0, 1)}, {"Lambda", seq(1, 0, -1)}}}}; }

std::string scratch_dir(const char* name) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("models parse in both forms") {
  const json phys{{"h", seq(1, -1)}, {"K", seq(1)}, {"sigma", seq(1)}, {"L", seq(1)}};
  const auto r1 = scaling::classify(config::parse_model(phys));
  CHECK(r1.p == 4);
  CHECK(r1.q == 2);
  const auto r2 = scaling::classify(config::parse_model(json{{"params", phys}}));
  CHECK(r2.p == 4);
  const auto r3 = scaling::classify(config::parse_model(family_53()));
  CHECK(r3.p == 5);
  CHECK(r3.q == 3);
}

TEST_CASE("malformed input is a configuration error") {
  CHECK_THROWS_AS(config::parse_seq(seq(-1.0), "h"), config::ConfigError);
  CHECK_THROWS_AS(config::parse_seq(json("fast"), "h"), config::ConfigError);
  CHECK(config::parse_seq(json{{"exp_n", 1}}, "h").coeff == 1.0);  // missing fields default
  CHECK_THROWS_AS(config::parse_model(json{{"h", seq(1)}}), config::ConfigError);
  CHECK_THROWS_AS(config::parse_solver(json{{"tolerance", -1}}), config::ConfigError);
  CHECK_THROWS_AS(config::read_json_file("/nonexistent/model.json"), config::ConfigError);
}

TEST_CASE("study configuration validation") {
  json j = family_53();
  j["n_list"] = json::array();
  CHECK_THROWS_AS(config::parse_study(j), config::ConfigError);
  j["n_list"] = {16, 8};
  CHECK_THROWS_AS(config::parse_study(j), config::ConfigError);
  j["n_list"] = {8, 16};
  j["m_continuum"] = 50;
  CHECK_THROWS_AS(config::parse_study(j), config::ConfigError);
  j["m_continuum"] = 200;
  j["M"] = 3.0;
  j["seed"] = 42;
  const auto cfg = config::parse_study(j);
  CHECK(cfg.n_list == std::vector<int>{8, 16});
  CHECK(cfg.M == 3.0);
  CHECK(cfg.seed == 42u);
}

TEST_CASE("regime report serializes infinities and forms") {
  const json phys{{"h", seq(1, -1)}, {"K", seq(1, 32)}, {"sigma", seq(1)}, {"L", seq(24 / M_PI, 0, 1)}};
  const json j = config::to_json(scaling::classify(config::parse_model(phys)));
  CHECK(j["p"] == 5);
  CHECK(j["q"] == 2);
  CHECK(j.contains("beta"));
  CHECK(j.contains("ahat_form"));
}

}

TEST_SUITE("study") {

TEST_CASE("band rule") {
  CHECK(study::non_increasing_within_band({1.0, 0.5, 0.25, 0.2}));
  CHECK(study::non_increasing_within_band({1.0, 0.5, 0.54, 0.5}));  // +8% tolerated
  CHECK_FALSE(study::non_increasing_within_band({1.0, 0.5, 0.6, 0.5}));
  // only the last window counts
  CHECK(study::non_increasing_within_band({0.1, 5.0, 1.0, 0.5, 0.25}));
}

TEST_CASE("starting points") {
  const std::vector<double> xi{0.1, 0.3, 0.5, 0.7, 0.9};
  const auto w = study::warm_start(xi, 8, 1.0);
  REQUIRE(w.size() == 8u);
  for (std::size_t i = 1; i < w.size(); ++i) CHECK(w[i] > w[i - 1]);
  CHECK(w.front() > 0.0);
  CHECK(w.back() <= 1.0);
  const auto a = study::random_start(50, 0.5, 7), b = study::random_start(50, 0.5, 7);
  CHECK(a == b);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] > a[i - 1]);
  CHECK(a.back() < 0.5);
}

TEST_CASE("regime (5,3) study approaches 2 e^-2") {
  config::StudyConfig cfg;
  cfg.model = config::parse_model(family_53());
  cfg.n_list = {16, 32, 64, 128};
  cfg.m_continuum = 200;
  cfg.output_dir = scratch_dir("pileup_study_53");
  const auto res = study::run_convergence_study(cfg);
  CHECK(res.regime.p == 5);
  CHECK(res.continuum_objective == doctest::Approx(2.0 * std::exp(-2.0)));
  double prev = 1e9;
  for (const auto& rec : res.records) {
    CHECK(rec.converged);
    CHECK(rec.interaction < prev);
    CHECK(rec.interaction > 2.0 * std::exp(-2.0));
    prev = rec.interaction;
  }
  const auto table = study::to_table(res);
  CHECK(table.rows.size() == cfg.n_list.size());
  CHECK(study::to_json(res).contains("verdict"));
}

TEST_CASE("log study: M = 1 tends to 0, M = 2 to 1/2") {
  config::StudyConfig cfg;
  cfg.model = config::parse_model(family_53());
  cfg.n_list = {64, 256, 1024};
  cfg.output_dir = scratch_dir("pileup_log_study");
  cfg.M = 1.0;
  const auto uniform = study::run_log_study(cfg);
  cfg.M = 2.0;
  const auto packed = study::run_log_study(cfg);
  REQUIRE(uniform.records.size() == 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& u = uniform.records[i];
    const auto& p = packed.records[i];
    CHECK(u.converged);
    CHECK(p.converged);
    CHECK(std::fabs(u.value) <= 3.0 / u.alpha_n);
    CHECK(p.target == 0.5);
    CHECK(std::fabs(p.value - 0.5) <= 3.0 / p.alpha_n);
  }
  CHECK(std::fabs(uniform.records[2].value) < std::fabs(uniform.records[0].value));
}

}
