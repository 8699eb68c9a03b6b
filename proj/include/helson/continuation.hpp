#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "helson/construct.hpp"

namespace helson::continuation {

using cplx = std::complex<double>;

struct ContinuedValue {
  cplx value;
  double tail_bound = 0.0;
};

/// E(x) = Q(x) + psi_chi(x) on [1, X_end], stored as one closed form per interval between breakpoints.
/// Beyond X_end the continuation holds E at E(X_end); the growth law |E(x)| <= C x^g bounds what that drops.
class ErrorProfile {
 public:
  explicit ErrorProfile(construct::EulerSupport support);

  const construct::EulerSupport& support() const { return support_; }
  const construct::QFunction& q() const { return support_.q; }
  double X_end() const { return support_.X_end; }
  double growth_exponent() const { return support_.growth_exponent; }
  double growth_constant() const { return support_.growth_constant; }

  cplx E(double x) const;
  cplx E_end() const { return E_end_; }
  double E_end_abs() const { return std::abs(E_end_); }
  const std::vector<double>& breakpoints() const { return breaks_; }

  /// Support primes as doubles with log p and chi(p), ascending.
  const std::vector<double>& prime_values() const { return p_; }
  const std::vector<double>& prime_logs() const { return logp_; }
  const std::vector<cplx>& prime_chars() const { return chi_; }

  /// Throws PoleError when s is within kPoleDistance of a term exponent.
  void check_pole(cplx s) const;

 private:
  construct::EulerSupport support_;
  std::vector<construct::QTerm> terms_;  // sorted by cutoff
  std::vector<double> breaks_;           // 1 = breaks_[0] < ... < breaks_.back() = X_end
  std::vector<cplx> K_;                  // constant part on [breaks_[i], breaks_[i+1])
  std::vector<std::size_t> active_;      // number of leading terms_ active on interval i
  std::vector<double> p_, logp_;
  std::vector<cplx> chi_;
  cplx E_end_ = 0.0;

  friend cplx mellin_with_scale(const ErrorProfile& E, cplx s, double X, double* scale);
};

inline constexpr double kPoleDistance = 1e-9;

/// s * integral_1^X E(x) x^{-s-1} dx, exactly, per interval.
cplx mellin_exact(const ErrorProfile& E, cplx s, double X);

/// Exponential integral E1 on the principal branch (cut along the negative real axis).
cplx expint_e1(cplx z);
/// Series form, accurate for |z| < 4 or so.
cplx expint_e1_series(cplx z);
/// Continued-fraction form, accurate for |z| >= 4 away from the cut.
cplx expint_e1_cf(cplx z);

/// Dyadic index of a term: smallest j >= 0 with |Im rho| <= 2^j.
int dyadic_index(const construct::QTerm& t);

/// R(s) = sum m y^{rho-s}/(s-rho) over terms of dyadic index <= j_max; tail_bound is the exact
/// modulus sum of the excluded terms.
ContinuedValue r_eval(const construct::QFunction& q, cplx s, int j_max = std::numeric_limits<int>::max());

/// Continuation of D'(s) = -sum chi(p) log p p^{-s}. tol > 0 turns a larger tail bound into a PrecisionError.
ContinuedValue dprime_continued(const ErrorProfile& E, cplx s, double tol = std::numeric_limits<double>::infinity());

/// D(s) - sum_{p <= x} chi(p) p^{-s}. literal_sigma reproduces the fixed-s kernel variant, which does not
/// define a convergent integral and is rejected with a PrecisionError.
ContinuedValue d_continued(const ErrorProfile& E, cplx s, double x, bool literal_sigma = false,
                           double tol = std::numeric_limits<double>::infinity());

/// log of the Euler product over the support: D(s) plus the prime-power part.
ContinuedValue log_zeta_chi(const ErrorProfile& E, cplx s, double tol = std::numeric_limits<double>::infinity());

struct Contour {
  cplx center;
  double radius = 0.02;
  int nodes = 1024;
};

struct WindingEstimate {
  double value = 0.0;
  double imag = 0.0;
  double max_tail = 0.0;
};

/// Trapezoid estimate of (1/2 pi i) times the contour integral of dlog. Throws InconclusiveError when the
/// imaginary part exceeds 0.05, PrecisionError when tail * circumference >= 0.1.
WindingEstimate winding_estimate(const std::function<ContinuedValue(cplx)>& dlog, const Contour& c);
double winding_number(const std::function<ContinuedValue(cplx)>& dlog, const Contour& c);

/// Validates radius, placement in Re s > 1/2 and distance >= 2 radius to the other listed points.
void validate_contour(const Contour& c, const std::vector<cplx>& others);

/// Riemann zeta by Euler-Maclaurin (N = 50, ten Bernoulli corrections).
cplx riemann_zeta(cplx s);

struct AssembleParts {
  bool riemann = false;
  const ErrorProfile* pnu = nullptr;
  const ErrorProfile* chi = nullptr;
  /// Complement primes with sampled angles.
  const std::vector<std::pair<std::uint64_t, double>>* steinhaus = nullptr;
};

/// zeta(s) / zeta_{P_nu}(s) * exp(log_zeta_chi) * finite Steinhaus factor; tails combined in quadrature.
ContinuedValue zeta_chi_assemble(const AssembleParts& parts, cplx s);

}  // namespace helson::continuation
