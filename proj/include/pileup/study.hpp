// Convergence studies: discrete minimizers at increasing n against the
// continuum minimizer of the limit energy.

#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "pileup/config.hpp"
#include "pileup/continuum.hpp"
#include "pileup/csv.hpp"
#include "pileup/scaling.hpp"

namespace pileup::study {

// A gap sequence is accepted when g_{k+1} <= kBand * g_k over the last
// kWindow entries.
inline constexpr double kBand = 1.1;
inline constexpr int kWindow = 3;

bool non_increasing_within_band(const std::vector<double>& g);

struct Record {
  int n = 0;
  double objective = 0.0;
  double interaction = 0.0;
  double force = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  bool converged = false;
  double energy_gap = 0.0;  // |E_n - E*|
  double w1 = 0.0;          // W1(empirical minimizer, continuum minimizer)
  std::string message;
};

struct StudyResult {
  scaling::RegimeReport regime;
  continuum::LimitConstants constants;
  double continuum_objective = 0.0;
  std::vector<double> continuum_minimizer;  // quantile grid values
  std::vector<Record> records;
  bool energy_consistent = false;
  bool w1_consistent = false;
  std::string verdict;  // "consistent" or "inconsistent"
  // Two solves at uniqueness_n from different starts, infinity-norm distance.
  int uniqueness_n = 0;
  double uniqueness_gap = 0.0;
};

continuum::LimitConstants constants_of(const scaling::RegimeReport& r);

// Context of the n-th discrete problem (handles the particular case).
energy::RegimeContext context_at(const scaling::RegimeReport& r, const scaling::Model& model,
                                 int n);

// Continuum minimizer sampled at s = (i - 1/2)/n as a warm start.
std::vector<double> warm_start(const std::vector<double>& continuum_quantile, int n,
                               double upper);

// Sorted uniform draws in (0, min(1, upper)), strictly increasing.
std::vector<double> random_start(int n, double upper, std::uint64_t seed);

StudyResult run_convergence_study(const config::StudyConfig& cfg);

struct LogRecord {
  int n = 0;
  double alpha_n = 0.0;
  double value = 0.0;   // (1/(2 alpha_n)) log E_n at the packed minimizer
  double target = 0.0;  // 1 - 1/M
  double error = 0.0;
  bool converged = false;
};

struct LogStudyResult {
  scaling::RegimeReport regime;
  double M = 0.0;
  std::vector<LogRecord> records;
  std::string verdict;
};

// Minimizes E_n over configurations packed into [0, 1/M] and evaluates the
// log-rescaled energy there. Requires p = 5, q in {2, 3}.
LogStudyResult run_log_study(const config::StudyConfig& cfg);

csv::Table to_table(const StudyResult& r);
nlohmann::json to_json(const StudyResult& r);
csv::Table to_table(const LogStudyResult& r);
nlohmann::json to_json(const LogStudyResult& r);

}  // namespace pileup::study
