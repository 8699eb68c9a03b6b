#include "helson/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "helson/error.hpp"

namespace helson::factorization {

namespace {

bool is_one_plus_alpha(cplx rho, double alpha) { return rho == cplx(1.0 + alpha, 0.0); }

// log of one factor of B at s, principal branch
cplx factor_log(cplx rho, int mult, double alpha, cplx s) {
  if (is_one_plus_alpha(rho, alpha)) {
    if (s == cplx(alpha - 1.0, 0.0)) throw PoleError("reflected pole of the linear factor", alpha - 1.0, 0.0);
    return static_cast<double>(mult) * std::log((s - 1.0 - alpha) / (s + 1.0 - alpha));
  }
  return static_cast<double>(mult) * std::log(atom_eval({rho, alpha}, s));
}

// integral_T^inf dN(t)/(1+t^2) <= integral_T^inf 2 N(t) t^{-3} dt with N(t) <= C_c t^e, times max(beta - alpha)
double density_tail(const DensityModel& m, double alpha, double T) {
  const double e = (m.alpha_c - alpha) / (m.alpha_c + alpha - 1.0);
  if (!(alpha >= 0.5) || !(e < 2.0)) throw ArgumentError("density model gives no convergent tail at this alpha");
  return (m.alpha_c - alpha) * 2.0 * m.C_c * std::pow(T, e - 2.0) / (2.0 - e);
}

}  // namespace

cplx atom_eval(const BlaschkeAtom& atom, cplx s) {
  const cplx rho = atom.rho;
  const double alpha = atom.alpha;
  if (!(rho.real() > alpha)) throw ArgumentError("Blaschke atom needs Re rho > alpha");
  if (is_one_plus_alpha(rho, alpha)) throw ArgumentError("rho = 1 + alpha is carried by the linear factor");
  const cplx reflected = 2.0 * alpha - std::conj(rho);
  if (std::abs(s - reflected) < continuation::kPoleDistance)
    throw PoleError("evaluation point is the reflected pole of the atom", reflected.real(), reflected.imag());
  const cplx a = 1.0 - alpha + std::conj(rho);
  const cplx b = 1.0 + alpha - rho;
  return (s - rho) / (s - reflected) * (a / b) * std::abs(b / a);
}

BlaschkeReport blaschke_condition(const multisets::SignedMultiset& Z, double alpha,
                                  const std::optional<DensityModel>& model) {
  BlaschkeReport r;
  double T_max = 0.0;
  for (const auto& p : Z.points()) {
    if (!(p.beta > alpha)) throw ArgumentError("blaschke_condition needs every beta > alpha");
    r.finite_sum += std::abs(p.mult) * (p.beta - alpha) / (1.0 + p.gamma * p.gamma);
    r.partial_sums.push_back(r.finite_sum);
    T_max = std::max(T_max, std::abs(p.gamma));
  }
  const std::size_t n = r.partial_sums.size();
  if (n >= 8) {
    const double first = r.partial_sums[n / 2 - 1];
    r.diverging = r.finite_sum - first >= first;
  }
  if (model) r.tail = density_tail(*model, alpha, std::max(1.0, T_max));
  return r;
}

continuation::ContinuedValue blaschke_product(const multisets::SignedMultiset& Z, double alpha, cplx s, double trunc_T,
                                              const std::optional<DensityModel>& model) {
  if (!(s.real() >= alpha)) throw ArgumentError("blaschke_product needs Re s >= alpha");
  cplx logB = 0.0;
  double excluded = 0.0;
  double T_max = 0.0;
  for (const auto& p : Z.points()) {
    if (!(p.beta > alpha)) throw ArgumentError("blaschke_product needs every beta > alpha");
    T_max = std::max(T_max, std::abs(p.gamma));
    const cplx rho(p.beta, p.gamma);
    if (std::abs(p.gamma) <= trunc_T)
      logB += factor_log(rho, p.mult, alpha, s);
    else
      excluded += std::abs(factor_log(rho, p.mult, alpha, s));
  }
  if (model) {
    // beyond the data: |log b| <= (8|s-1-alpha| + 2)(beta-alpha)/gamma^2 once |gamma| >= max(1, 2|Im s|)
    const double T = std::max({1.0, T_max, trunc_T});
    if (T < 2.0 * std::abs(s.imag()))
      excluded = std::numeric_limits<double>::infinity();
    else
      excluded += (8.0 * std::abs(s - 1.0 - alpha) + 2.0) * 2.0 * density_tail(*model, alpha, T);
  }
  continuation::ContinuedValue out;
  out.value = std::exp(logB);
  out.tail_bound = std::abs(out.value) * std::expm1(excluded);
  return out;
}

std::vector<double> geometric_grid(double lo, double hi, int per_decade) {
  if (!(lo > 0) || !(hi > lo) || per_decade < 1) throw ArgumentError("geometric_grid needs 0 < lo < hi");
  const int n = static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade));
  std::vector<double> pos;
  for (int k = 0; k <= n; ++k) pos.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / n));
  std::vector<double> out;
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) out.push_back(-*it);
  out.push_back(0.0);
  out.insert(out.end(), pos.begin(), pos.end());
  return out;
}

cplx outer_eval(const BoundaryData& data, cplx s) {
  const auto& x = data.x;
  const auto& f = data.log_modulus;
  if (x.size() != f.size() || x.size() < 2) throw ArgumentError("outer_eval needs matching samples, at least two");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw ArgumentError("outer_eval needs increasing sample abscissae");
  if (!(x.front() < 0 && x.back() > 0)) throw ArgumentError("outer_eval needs samples on both sides of 0");
  const cplx z = s - data.alpha;
  if (!(z.real() > 0)) throw ArgumentError("outer_eval needs Re s > alpha");

  auto kernel = [&](double t) { return 1.0 / (z - cplx(0.0, t)) - cplx(0.0, t) / (1.0 + t * t); };
  cplx sampled = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    sampled += 0.5 * (x[i + 1] - x[i]) * (kernel(x[i]) * f[i] + kernel(x[i + 1]) * f[i + 1]);

  // past |x| = X the kernel is z/x^2 + O(x^{-3}); with log|h| = A |x|^{-d} each side contributes z A X^{-1-d}/(1+d)
  const double d = data.decay;
  if (!(d > -1.0)) throw ArgumentError("outer_eval needs decay > -1");
  cplx tail = 0.0;
  for (const double end : {x.front(), x.back()}) {
    const double Xe = std::abs(end);
    const double A = (end < 0 ? f.front() : f.back()) * std::pow(Xe, d);
    tail += z * A * std::pow(Xe, -1.0 - d) / (1.0 + d);
  }
  if (std::abs(tail) > 0.1 * std::abs(sampled) && std::abs(tail) > 0.0) {
    std::ostringstream os;
    os.precision(17);
    os << "outer_eval: analytic tails " << std::abs(tail) << " exceed 10% of the sampled integral "
       << std::abs(sampled) << "; extend the sample range";
    throw PrecisionError(os.str());
  }
  return std::exp((sampled + tail) / std::numbers::pi);
}

}  // namespace helson::factorization
