// JSON ingestion for models, limit constants and study configurations.
//
// A model is either physical parameters
//   {"h": SEQ, "K": SEQ, "sigma": SEQ, "L": SEQ}      (L optional)
// possibly nested under "params", or a direct regime family
//   {"family": {"alpha": SEQ, "Lambda": SEQ}}          (Lambda optional)
// with SEQ = {"coeff": a, "exp_n": b, "exp_log": c}, meaning a n^b (log n)^c.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pileup/continuum.hpp"
#include "pileup/optimizer.hpp"
#include "pileup/scaling.hpp"

namespace pileup::config {

// Every ingestion failure is reported as this (CLI exit code 1).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

scaling::PowerLawSeq parse_seq(const nlohmann::json& j, const std::string& what);
scaling::Model parse_model(const nlohmann::json& j);
continuum::LimitConstants parse_constants(const nlohmann::json& j);
opt::SolverOptions parse_solver(const nlohmann::json& j);

nlohmann::json to_json(const scaling::PowerLawSeq& s);
nlohmann::json to_json(const scaling::RegimeReport& r);

struct StudyConfig {
  scaling::Model model;
  std::vector<int> n_list;
  int m_continuum = 400;
  opt::SolverOptions solver;
  std::string output_dir = ".";
  int threads = 0;  // 0: leave the OpenMP default
  std::uint64_t seed = 0;
  double M = 2.0;   // packing density for the log study
};

// Throws ConfigError unless n_list is non-empty and strictly increasing and
// m_continuum >= 100.
void validate(const StudyConfig& cfg);
StudyConfig parse_study(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);

}  // namespace pileup::config
