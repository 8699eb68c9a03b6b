#include "helson/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "helson/error.hpp"
#include "helson/parallel.hpp"

namespace helson::continuation {

namespace {

constexpr double kEuler = 0.57721566490153286061;

// (e^w - 1)/w, stable near w = 0.
cplx expm1_over(cplx w) {
  if (std::abs(w) < 1e-5) return 1.0 + w / 2.0 + w * w / 6.0;
  return (std::exp(w) - 1.0) / w;
}

// integral_c^X x^{rho - s - 1} dx
cplx power_piece(cplx rho, cplx s, double c, double X) {
  const cplx w = rho - s;
  const double L = std::log(X / c);
  return std::exp(w * std::log(c)) * L * expm1_over(w * L);
}

// Relative allowance for floating-point accumulation, applied to the sum of summand moduli.
constexpr double kRounding = 64.0 * std::numeric_limits<double>::epsilon();

// Bound on integral_X^inf |E(x) - E(X)| x^{-sigma-1} dx from |E(x)| <= C x^g and the stored |E(X)|.
double growth_tail(const ErrorProfile& E, cplx s) {
  const double sigma = s.real();
  const double g = E.growth_exponent();
  if (!(sigma > g) || !(sigma > 0)) return std::numeric_limits<double>::infinity();
  const double X = E.X_end();
  return E.growth_constant() * std::pow(X, g - sigma) / (sigma - g) + E.E_end_abs() * std::pow(X, -sigma) / sigma;
}

void enforce_tol(double tail, double tol, const char* what) {
  if (!std::isfinite(tail) || tail > tol) {
    std::ostringstream os;
    os << what << ": truncation bound " << tail << " exceeds tolerance " << tol << "; a larger X_max is needed";
    throw PrecisionError(os.str());
  }
}

}  // namespace

ErrorProfile::ErrorProfile(construct::EulerSupport support) : support_(std::move(support)) {
  terms_ = support_.q.terms;
  std::stable_sort(terms_.begin(), terms_.end(),
                   [](const construct::QTerm& a, const construct::QTerm& b) { return a.cutoff < b.cutoff; });
  const double X = support_.X_end;
  for (const auto& e : support_.entries) {
    const double p = static_cast<double>(e.p);
    if (p > X) break;
    p_.push_back(p);
    logp_.push_back(std::log(p));
    chi_.push_back(construct::EulerSupport::unit(e.angle));
  }
  std::set<double> cut{1.0, X};
  for (const auto& t : terms_)
    if (t.cutoff > 1.0 && t.cutoff < X) cut.insert(t.cutoff);
  for (double p : p_)
    if (p < X) cut.insert(p);
  breaks_.assign(cut.begin(), cut.end());

  std::size_t pi = 0, ti = 0;
  cplx psi = 0.0, offset = 0.0;
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    const double a = breaks_[i];
    while (pi < p_.size() && p_[pi] <= a) {
      psi += chi_[pi] * logp_[pi];
      ++pi;
    }
    while (ti < terms_.size() && terms_[ti].cutoff <= a) {
      const auto& t = terms_[ti];
      offset += static_cast<double>(t.mult) * std::pow(cplx(t.cutoff), t.rho) / t.rho;
      ++ti;
    }
    K_.push_back(psi - offset);
    active_.push_back(ti);
  }
  E_end_ = E(X);
}

cplx ErrorProfile::E(double x) const {
  if (x < 1.0) throw ArgumentError("E(x) needs x >= 1");
  cplx psi = 0.0;
  for (std::size_t i = 0; i < p_.size() && p_[i] <= x; ++i) psi += chi_[i] * logp_[i];
  return construct::q_integral(support_.q, x) + psi;
}

void ErrorProfile::check_pole(cplx s) const {
  for (const auto& t : terms_)
    if (std::abs(s - t.rho) < kPoleDistance) throw PoleError("evaluation point is a prescribed pole", t.rho.real(), t.rho.imag());
}

cplx mellin_with_scale(const ErrorProfile& E, cplx s, double X, double* scale);

cplx mellin_exact(const ErrorProfile& E, cplx s, double X) { return mellin_with_scale(E, s, X, nullptr); }

cplx mellin_with_scale(const ErrorProfile& E, cplx s, double X, double* scale) {
  if (s == cplx(0.0)) throw ArgumentError("mellin_exact needs s != 0");
  if (X < 1.0 || X > E.X_end()) throw ArgumentError("mellin_exact needs 1 <= X <= X_end");
  cplx step = 0.0;
  const auto& b = E.breaks_;
  cplx lower = 1.0;  // a^{-s} at a = 1
  for (std::size_t i = 0; i + 1 < b.size() && b[i] < X; ++i) {
    const double hi = std::min(b[i + 1], X);
    const cplx upper = std::exp(-s * std::log(hi));
    const cplx piece = E.K_[i] * (lower - upper);
    step += piece;
    if (scale != nullptr) *scale += std::abs(E.K_[i]) * (std::abs(lower) + std::abs(upper));
    lower = upper;
  }
  cplx power = 0.0;
  for (const auto& t : E.terms_) {
    const double c = std::max(1.0, t.cutoff);
    if (c >= X) continue;
    const cplx piece = static_cast<double>(t.mult) / t.rho * s * power_piece(t.rho, s, c, X);
    power += piece;
    if (scale != nullptr) *scale += std::abs(piece);
  }
  return step + power;
}

cplx expint_e1_series(cplx z) {
  cplx sum = 0.0;
  cplx term = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -z / static_cast<double>(k);
    const cplx add = term / static_cast<double>(k);
    sum += add;
    if (std::abs(add) < 1e-17 * std::abs(sum)) break;
  }
  return -kEuler - std::log(z) - sum;
}

cplx expint_e1_cf(cplx z) {
  // E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...))), modified Lentz.
  const double tiny = 1e-300;
  cplx f = z + 1.0;
  if (std::abs(f) < tiny) f = tiny;
  cplx C = f, D = 0.0;
  for (int n = 1; n < 100000; ++n) {
    const double a = -static_cast<double>(n) * static_cast<double>(n);
    const cplx bn = z + static_cast<double>(2 * n + 1);
    D = bn + a * D;
    if (std::abs(D) < tiny) D = tiny;
    C = bn + a / C;
    if (std::abs(C) < tiny) C = tiny;
    D = 1.0 / D;
    const cplx delta = C * D;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-z) / f;
}

cplx expint_e1(cplx z) {
  if (z == cplx(0.0)) throw PoleError("E1 is singular at 0", 0.0, 0.0);
  // The continued fraction converges slowly next to the cut; the series loses about e^{|z| - |Re z|} there, which is
  // mild for |Im z| < 10.
  const bool near_cut = z.real() < 0.0 && std::abs(z.imag()) < 10.0;
  return std::abs(z) < 4.0 || near_cut ? expint_e1_series(z) : expint_e1_cf(z);
}

int dyadic_index(const construct::QTerm& t) {
  const double g = std::abs(t.rho.imag());
  int j = 0;
  while (g > std::ldexp(1.0, j)) ++j;
  return j;
}

ContinuedValue r_eval(const construct::QFunction& q, cplx s, int j_max) {
  ContinuedValue out;
  for (const auto& t : q.terms) {
    if (std::abs(s - t.rho) < kPoleDistance) throw PoleError("evaluation point is a prescribed pole", t.rho.real(), t.rho.imag());
    const cplx v = static_cast<double>(t.mult) * std::exp((t.rho - s) * std::log(t.cutoff)) / (s - t.rho);
    if (dyadic_index(t) <= j_max)
      out.value += v;
    else
      out.tail_bound += std::abs(v);
  }
  return out;
}

ContinuedValue dprime_continued(const ErrorProfile& E, cplx s, double tol) {
  E.check_pole(s);
  ContinuedValue out;
  out.tail_bound = std::abs(s) * growth_tail(E, s);
  enforce_tol(out.tail_bound, tol, "dprime_continued");
  double scale = 0.0;
  const auto r = r_eval(E.q(), s);
  const cplx end_term = E.E_end() * std::exp(-s * std::log(E.X_end()));
  out.value = r.value - mellin_with_scale(E, s, E.X_end(), &scale) - end_term;
  scale += std::abs(end_term);
  for (const auto& t : E.q().terms) scale += std::abs(static_cast<double>(t.mult) * std::exp((t.rho - s) * std::log(t.cutoff)) / (s - t.rho));
  out.tail_bound += kRounding * scale;
  return out;
}

ContinuedValue d_continued(const ErrorProfile& E, cplx s, double x, bool literal_sigma, double tol) {
  if (literal_sigma)
    throw PrecisionError("the fixed-s kernel y^{rho-s}/(w-rho) is not integrable along the ray w in [s, s+inf)");
  if (x < 1.0 || x > E.X_end()) throw ArgumentError("d_continued needs 1 <= x <= X_end");
  E.check_pole(s);
  const double X = E.X_end();
  const double L = std::log(X);
  ContinuedValue out;
  out.tail_bound = growth_tail(E, s) * (std::abs(s) / L + 1.0 / (L * L));
  enforce_tol(out.tail_bound, tol, "d_continued");

  const auto& p = E.prime_values();
  const auto& lp = E.prime_logs();
  const auto& chi = E.prime_chars();
  cplx direct = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= x) continue;
    direct += chi[i] * std::exp(-s * lp[i]);
    scale += std::exp(-s.real() * lp[i]);
  }
  cplx law = 0.0;
  for (const auto& t : E.q().terms) {
    const double y = std::max(X, t.cutoff);
    const cplx piece = static_cast<double>(t.mult) * expint_e1((s - t.rho) * std::log(y));
    law -= piece;
    scale += std::abs(piece);
  }
  out.value = direct + law;
  out.tail_bound += kRounding * scale;
  return out;
}

ContinuedValue log_zeta_chi(const ErrorProfile& E, cplx s, double tol) {
  const double sigma = s.real();
  if (!(sigma > 0.5)) throw ArgumentError("log_zeta_chi needs Re s > 1/2");
  ContinuedValue out = d_continued(E, s, 1.0, false, std::numeric_limits<double>::infinity());
  const auto& lp = E.prime_logs();
  const auto& chi = E.prime_chars();
  cplx powers = 0.0;
  double rem = 0.0;
  for (std::size_t i = 0; i < lp.size(); ++i) {
    const cplx z = chi[i] * std::exp(-s * lp[i]);
    const double r = std::abs(z);
    cplx zj = z;
    double rj = r;
    int j = 1;
    while (true) {
      ++j;
      zj *= z;
      rj *= r;
      if (rj < 1e-18) break;
      powers += zj / static_cast<double>(j);
    }
    rem += rj / (static_cast<double>(j) * (1.0 - r)) + kRounding * r * r;
  }
  const double X = E.X_end();
  const double beyond = std::pow(X, 1.0 - 2.0 * sigma) / ((2.0 * sigma - 1.0) * 2.0 * (1.0 - std::pow(X, -sigma)));
  out.value += powers;
  out.tail_bound += rem + beyond;
  enforce_tol(out.tail_bound, tol, "log_zeta_chi");
  return out;
}

WindingEstimate winding_estimate(const std::function<ContinuedValue(cplx)>& dlog, const Contour& c) {
  if (!(c.radius > 0) || c.nodes < 8) throw ArgumentError("contour needs radius > 0 and at least 8 nodes");
  const auto n = static_cast<std::size_t>(c.nodes);
  std::vector<double> re(n), im(n), tail(n);
  parallel_for(n, [&](std::size_t k) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    const cplx d = std::polar(c.radius, th);
    const auto v = dlog(c.center + d);
    const cplx w = v.value * d;
    re[k] = w.real();
    im[k] = w.imag();
    tail[k] = v.tail_bound;
  });
  WindingEstimate out;
  out.value = pairwise_sum(re.data(), n) / static_cast<double>(n);
  out.imag = pairwise_sum(im.data(), n) / static_cast<double>(n);
  out.max_tail = *std::max_element(tail.begin(), tail.end());
  return out;
}

double winding_number(const std::function<ContinuedValue(cplx)>& dlog, const Contour& c) {
  const auto w = winding_estimate(dlog, c);
  const double circumference = 2.0 * std::numbers::pi * c.radius;
  if (!(w.max_tail * circumference < 0.1)) {
    std::ostringstream os;
    os << "winding_number: tail bound " << w.max_tail << " times circumference " << circumference << " is not below 0.1";
    throw PrecisionError(os.str());
  }
  if (std::abs(w.imag) > 0.05) {
    std::ostringstream os;
    os << "winding_number: imaginary part " << w.imag << " exceeds 0.05; increase the node count";
    throw InconclusiveError(os.str());
  }
  return w.value;
}

void validate_contour(const Contour& c, const std::vector<cplx>& others) {
  if (!(c.radius > 0)) throw ArgumentError("contour radius must be positive");
  if (c.nodes < 8) throw ArgumentError("contour needs at least 8 nodes");
  if (!(c.center.real() - c.radius > 0.5)) throw ArgumentError("contour must lie in Re s > 1/2");
  for (const auto& o : others) {
    const double d = std::abs(o - c.center);
    if (d > 1e-15 && d < 2.0 * c.radius) throw ArgumentError("contour comes within 2 radii of another prescribed point");
  }
}

cplx riemann_zeta(cplx s) {
  if (s == cplx(1.0)) throw PoleError("zeta has a pole at s = 1", 1.0, 0.0);
  constexpr int N = 50;
  // B_{2k} / (2k)!
  static const double coef[10] = {
      1.0 / 6.0 / 2.0,
      -1.0 / 30.0 / 24.0,
      1.0 / 42.0 / 720.0,
      -1.0 / 30.0 / 40320.0,
      5.0 / 66.0 / 3628800.0,
      -691.0 / 2730.0 / 479001600.0,
      7.0 / 6.0 / 87178291200.0,
      -3617.0 / 510.0 / 20922789888000.0,
      43867.0 / 798.0 / 6402373705728000.0,
      -174611.0 / 330.0 / 2432902008176640000.0,
  };
  cplx sum = 0.0;
  for (int n = 1; n < N; ++n) sum += std::exp(-s * std::log(static_cast<double>(n)));
  const double logN = std::log(static_cast<double>(N));
  const cplx Ns = std::exp(-s * logN);
  sum += static_cast<double>(N) * Ns / (s - 1.0) + 0.5 * Ns;
  cplx rising = s;            // s (s+1) ... (s + 2k - 2)
  cplx power = Ns / static_cast<double>(N);  // N^{-s-1}
  for (int k = 0; k < 10; ++k) {
    sum += coef[k] * rising * power;
    rising *= (s + static_cast<double>(2 * k + 1)) * (s + static_cast<double>(2 * k + 2));
    power /= static_cast<double>(N) * static_cast<double>(N);
  }
  return sum;
}

ContinuedValue zeta_chi_assemble(const AssembleParts& parts, cplx s) {
  if (parts.chi != nullptr && parts.steinhaus != nullptr) {
    const auto& ps = parts.chi->prime_values();
    for (const auto& [p, angle] : *parts.steinhaus) {
      (void)angle;
      if (std::binary_search(ps.begin(), ps.end(), static_cast<double>(p)))
        throw ArgumentError("Steinhaus tail overlaps the constructed support at p=" + std::to_string(p));
    }
  }
  cplx logv = 0.0;
  double tail2 = 0.0;
  if (parts.riemann) {
    logv += std::log(riemann_zeta(s));
    tail2 += 1e-24;
  }
  if (parts.pnu != nullptr) {
    const auto v = log_zeta_chi(*parts.pnu, s);
    logv -= v.value;
    tail2 += v.tail_bound * v.tail_bound;
  }
  if (parts.chi != nullptr) {
    const auto v = log_zeta_chi(*parts.chi, s);
    logv += v.value;
    tail2 += v.tail_bound * v.tail_bound;
  }
  if (parts.steinhaus != nullptr) {
    for (const auto& [p, angle] : *parts.steinhaus)
      logv -= std::log(1.0 - construct::EulerSupport::unit(angle) * std::exp(-s * std::log(static_cast<double>(p))));
  }
  ContinuedValue out;
  out.value = std::exp(logv);
  const double t = std::sqrt(tail2);
  out.tail_bound = std::abs(out.value) * std::expm1(t);
  return out;
}

}  // namespace helson::continuation
