#include "pileup/scaling.hpp"

#include <cmath>
#include <numbers>

namespace pileup::scaling {

namespace {

constexpr double kExpTol = 1e-12;
constexpr double kPi = std::numbers::pi;

int sign_with_tol(double d) {
  if (d > kExpTol) return 1;
  if (d < -kExpTol) return -1;
  return 0;
}

struct Forms {
  int q = 0;
  PowerLawSeq ahat;
  std::optional<PowerLawSeq> ell;
  std::optional<PowerLawSeq> alpha;
  std::optional<PowerLawSeq> Lambda;
};

// Leading-order form of f_n(a) for a power-law a.
PowerLawSeq ahat_form_of(const PowerLawSeq& a) {
  const PowerLawSeq inv_n{1.0, -1.0, 0.0};
  const PowerLawSeq n_form{1.0, 1.0, 0.0};
  const int vs_inv_n = compare_growth(a, inv_n);
  if (vs_inv_n < 0) return n_form * a * a;
  if (vs_inv_n == 0) {
    // a ~ c/n; for c < 1 every a_n sits in the quadratic branch.
    return a.coeff < 1.0 ? n_form * a * a : a;
  }
  const int vs_one = compare_growth(a, constant(1.0));
  if (vs_one < 0) return a;
  if (vs_one == 0) {
    return a.coeff <= 1.0 ? a : constant(std::log(a.coeff) + 1.0);
  }
  if (sign_with_tol(a.exp_n) > 0) {
    // log a = b log n + c log log n + log coeff ~ b log n
    return PowerLawSeq{a.exp_n, 0.0, 1.0};
  }
  throw UnclassifiableRegime(
      "alpha_hat grows like log log n; outside the power-law-with-log family");
}

PowerLawSeq a_form_of(const ParamSequences& ps) {
  const PowerLawSeq n_form{1.0, 1.0, 0.0};
  return pow(constant(kPi) * ps.K / (n_form * ps.sigma * ps.h), 0.5);
}

int q_of(const std::optional<PowerLawSeq>& Lambda_form) {
  if (!Lambda_form) return 0;
  const int c = compare_growth(*Lambda_form, constant(1.0));
  return c > 0 ? 1 : (c == 0 ? 2 : 3);
}

Forms forms_of(const Model& model) {
  Forms f;
  if (const auto* ps = std::get_if<ParamSequences>(&model)) {
    const PowerLawSeq n_form{1.0, 1.0, 0.0};
    f.ahat = ahat_form_of(a_form_of(*ps));
    f.ell = constant(1.0 / kPi) * n_form * ps->h * f.ahat;
    if (ps->L) {
      f.alpha = constant(kPi) * *ps->L / (n_form * ps->h);
      f.Lambda = *f.alpha / f.ahat;
    }
  } else {
    const auto& fam = std::get<DirectFamily>(model);
    f.Lambda = fam.Lambda;
    const int q = q_of(fam.Lambda);
    if (q >= 2) {
      f.alpha = fam.alpha;
      f.ahat = fam.alpha / *fam.Lambda;
    } else {
      f.ahat = fam.alpha;
      if (fam.Lambda) f.alpha = fam.alpha * *fam.Lambda;
    }
  }
  f.q = q_of(f.Lambda);
  return f;
}

struct Sample {
  double ahat;
  double alpha;
  double Lambda;
};

// Everything evaluated from log n so probes can go far past double range of n.
Sample sample(double log_n, const Model& model) {
  Sample s{};
  if (const auto* ps = std::get_if<ParamSequences>(&model)) {
    const double log_a = 0.5 * (std::log(kPi) + ps->K.log_at(log_n) - log_n -
                                ps->sigma.log_at(log_n) - ps->h.log_at(log_n));
    if (log_a < -log_n) {
      s.ahat = std::exp(log_n + 2.0 * log_a);
    } else if (log_a <= 0.0) {
      s.ahat = std::exp(log_a);
    } else {
      s.ahat = log_a + 1.0;
    }
    if (ps->L) {
      const double log_ell = log_n + ps->h.log_at(log_n) - std::log(kPi) + std::log(s.ahat);
      s.Lambda = std::exp(ps->L->log_at(log_n) - log_ell);
      s.alpha = std::exp(std::log(kPi) + ps->L->log_at(log_n) - log_n - ps->h.log_at(log_n));
    } else {
      s.Lambda = kInfinity;
      s.alpha = kInfinity;
    }
    return s;
  }
  const auto& fam = std::get<DirectFamily>(model);
  const int q = q_of(fam.Lambda);
  const double log_x = fam.alpha.log_at(log_n);
  if (q >= 2) {
    const double log_L = fam.Lambda->log_at(log_n);
    s.alpha = std::exp(log_x);
    s.Lambda = std::exp(log_L);
    s.ahat = std::exp(log_x - log_L);
  } else {
    s.ahat = std::exp(log_x);
    s.Lambda = fam.Lambda ? std::exp(fam.Lambda->log_at(log_n)) : kInfinity;
    s.alpha = fam.Lambda ? std::exp(log_x + std::log(s.Lambda)) : kInfinity;
  }
  return s;
}

}  // namespace

double PowerLawSeq::at(double n) const { return std::exp(log_at(std::log(n))); }

double PowerLawSeq::log_at(double log_n) const {
  double v = std::log(coeff) + exp_n * log_n;
  if (exp_log != 0.0) v += exp_log * std::log(log_n);
  return v;
}

PowerLawSeq operator*(const PowerLawSeq& a, const PowerLawSeq& b) {
  return {a.coeff * b.coeff, a.exp_n + b.exp_n, a.exp_log + b.exp_log};
}

PowerLawSeq operator/(const PowerLawSeq& a, const PowerLawSeq& b) {
  return {a.coeff / b.coeff, a.exp_n - b.exp_n, a.exp_log - b.exp_log};
}

PowerLawSeq pow(const PowerLawSeq& a, double r) {
  return {std::pow(a.coeff, r), a.exp_n * r, a.exp_log * r};
}

PowerLawSeq constant(double c) { return {c, 0.0, 0.0}; }

int compare_growth(const PowerLawSeq& a, const PowerLawSeq& b) {
  if (const int s = sign_with_tol(a.exp_n - b.exp_n)) return s;
  if (const int s = sign_with_tol(a.exp_log - b.exp_log)) return s;
  return 0;
}

double f_n(double n, double a) {
  if (!(a > 0.0)) throw std::domain_error("f_n: a must be positive");
  if (!(n >= 1.0)) throw std::domain_error("f_n: n must be >= 1");
  if (a < 1.0 / n) return n * a * a;
  if (a <= 1.0) return a;
  return std::log(a) + 1.0;
}

double ahat(double n, const Model& model) { return sample(std::log(n), model).ahat; }
double alpha(double n, const Model& model) { return sample(std::log(n), model).alpha; }
double Lambda(double n, const Model& model) { return sample(std::log(n), model).Lambda; }

double ell(double n, const ParamSequences& params) {
  return n * params.h.at(n) * ahat(n, params) / kPi;
}

int domain_class(const Model& model) { return forms_of(model).q; }

double alpha_q(double n, const Model& model) {
  const Sample s = sample(std::log(n), model);
  return domain_class(model) >= 2 ? s.alpha : s.ahat;
}

RegimeReport classify(const Model& model) {
  const Forms f = forms_of(model);
  RegimeReport r;
  r.q = f.q;
  r.ahat_form = f.ahat;
  r.ell_form = f.ell;
  r.alpha_form = f.alpha;
  r.Lambda_form = f.Lambda;

  const PowerLawSeq x = f.q >= 2 ? *f.alpha : f.ahat;
  const PowerLawSeq inv_n{1.0, -1.0, 0.0};
  const int vs_inv_n = compare_growth(x, inv_n);
  if (vs_inv_n < 0) {
    r.p = 1;
  } else if (vs_inv_n == 0) {
    r.p = 2;
    r.c_tilde = x.coeff;
  } else {
    const int vs_one = compare_growth(x, constant(1.0));
    if (vs_one < 0) {
      r.p = 3;
    } else if (vs_one == 0) {
      r.p = 4;
      r.c_tilde = x.coeff;
    } else {
      r.p = 5;
    }
  }

  if (r.q == 2) {
    r.Lambda = f.Lambda->coeff;
    if (r.p == 5) r.beta = beta_limit(model);
    if (!r.particular_case()) {
      r.C = limit_constant_C(r.p, *r.Lambda, r.beta.value_or(0.0));
    }
  }
  return r;
}

double probe_exp_limit(const std::function<double(double log_n)>& exponent) {
  double prev = 0.0;
  int rising_above = 0;
  int falling_below = 0;
  for (int k = 0; k < BetaProbe::kSteps; ++k) {
    const double log2_n = 10.0 * std::exp2(0.5 * k);
    const double v = std::exp(exponent(log2_n * std::numbers::ln2));
    if (k > 0) {
      rising_above = (v > BetaProbe::kDivergeThreshold && v > prev) ? rising_above + 1 : 0;
      falling_below = (v < BetaProbe::kVanishThreshold && v < prev) ? falling_below + 1 : 0;
      if (rising_above >= 2) return kInfinity;
      if (falling_below >= 2) return 0.0;
      if (std::isfinite(v) && v > 0.0 && std::fabs(v - prev) < BetaProbe::kRelTol * v) return v;
    }
    prev = v;
  }
  throw UnclassifiableRegime("beta limit indeterminate over the probe range");
}

double beta_limit(const Model& model) {
  const Forms f = forms_of(model);
  if (f.q != 2) throw std::invalid_argument("beta_limit: requires q = 2");
  const double Lbar = f.Lambda->coeff;
  if (Lbar < 1.0 - kExpTol) return 0.0;
  if (Lbar > 1.0 + kExpTol) return kInfinity;
  return probe_exp_limit([&](double log_n) {
    const Sample s = sample(log_n, model);
    return 2.0 * s.alpha * (1.0 - 1.0 / s.Lambda);
  });
}

double limit_constant_C(int p, double Lambda, double beta) {
  switch (p) {
    case 1:
      return Lambda;
    case 2:
    case 3:
    case 4:
      return Lambda * Lambda;
    case 5:
      if (std::isinf(beta)) throw ParticularCaseError();
      return beta / 2.0;
    default:
      throw std::invalid_argument("limit_constant_C: p must be in 1..5");
  }
}

double force_prefactor(int p, double alpha_n, double Lambda_n) {
  switch (p) {
    case 1:
      return Lambda_n;
    case 2:
    case 3:
    case 4:
      return Lambda_n * Lambda_n;
    case 5:
      return std::exp(2.0 * alpha_n * (1.0 - 1.0 / Lambda_n));
    default:
      throw std::invalid_argument("force_prefactor: p must be in 1..5");
  }
}

}  // namespace pileup::scaling
