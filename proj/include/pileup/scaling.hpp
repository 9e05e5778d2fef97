// Parameter sequences, the derived aspect ratios and the (p, q) regime
// classification.
//
// Sequences are a * n^b * (log n)^c. Asymptotic comparison of two such
// forms is lexicographic in (b, c, a), which is what makes the
// classification decidable.

#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace pileup::scaling {

struct PowerLawSeq {
  double coeff = 1.0;
  double exp_n = 0.0;
  double exp_log = 0.0;

  double at(double n) const;
  // log of the value, given log n; lets probes run at n far beyond 2^1023.
  double log_at(double log_n) const;
};

PowerLawSeq operator*(const PowerLawSeq& a, const PowerLawSeq& b);
PowerLawSeq operator/(const PowerLawSeq& a, const PowerLawSeq& b);
PowerLawSeq pow(const PowerLawSeq& a, double r);
PowerLawSeq constant(double c);

// -1 if a << b, 0 if a/b tends to a positive constant, +1 if a >> b.
int compare_growth(const PowerLawSeq& a, const PowerLawSeq& b);

// Physical parameters. An absent L means an unbounded domain (q = 0).
struct ParamSequences {
  PowerLawSeq h;
  PowerLawSeq K;
  PowerLawSeq sigma;
  std::optional<PowerLawSeq> L;
};

// Regime given directly by its dimensionless sequences. `alpha` is the
// ratio that enters the interaction term: alpha_hat for q in {0, 1} and
// alpha for q in {2, 3}. Needed for families the physical parameters
// cannot reach (alpha_hat never exceeds O(log n)).
struct DirectFamily {
  PowerLawSeq alpha;
  std::optional<PowerLawSeq> Lambda;
};

using Model = std::variant<ParamSequences, DirectFamily>;

class UnclassifiableRegime : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParticularCaseError : public std::domain_error {
 public:
  ParticularCaseError()
      : std::domain_error("beta is infinite: use particular-case energy") {}
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct RegimeReport {
  int p = 0;
  int q = 0;
  std::optional<double> c_tilde;
  std::optional<double> Lambda;
  std::optional<double> beta;  // may be +inf
  std::optional<double> C;
  PowerLawSeq ahat_form;
  std::optional<PowerLawSeq> ell_form;  // only for physical parameters
  std::optional<PowerLawSeq> alpha_form;   // absent when q = 0
  std::optional<PowerLawSeq> Lambda_form;  // absent when q = 0

  bool particular_case() const { return p == 5 && q == 2 && beta && *beta == kInfinity; }
};

double f_n(double n, double a);

// Numeric sequences at a given n (n >= 2 whenever log powers are present).
double ahat(double n, const Model& model);
double alpha(double n, const Model& model);   // +inf when q = 0
double Lambda(double n, const Model& model);  // +inf when q = 0
double ell(double n, const ParamSequences& params);

// Domain class q, decided from the Lambda form alone.
int domain_class(const Model& model);

// alpha_n^{(q)}: alpha_hat for q in {0, 1}, alpha for q in {2, 3}.
double alpha_q(double n, const Model& model);

RegimeReport classify(const Model& model);

// Frozen probe settings for the beta limit.
struct BetaProbe {
  static constexpr double kDivergeThreshold = 1e12;
  static constexpr double kVanishThreshold = 1e-12;
  static constexpr double kRelTol = 1e-9;
  // log2 n = 10 * 2^{k/2}, k = 0 .. kSteps-1, i.e. n from 2^10 to ~2^{10^9}.
  static constexpr int kSteps = 58;
};

// lim exp(e(log n)) over the probe schedule; +inf, 0 or the converged value.
// Throws UnclassifiableRegime("indeterminate ...") when nothing triggers.
double probe_exp_limit(const std::function<double(double log_n)>& exponent);

// beta for a p = 5, q = 2 model.
double beta_limit(const Model& model);

double limit_constant_C(int p, double Lambda, double beta);

// C_n^{(p)}: Lambda_n, Lambda_n^2, exp(2 alpha_n (1 - 1/Lambda_n)).
double force_prefactor(int p, double alpha_n, double Lambda_n);

}  // namespace pileup::scaling
