#include "helson/meansquare.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "helson/error.hpp"
#include "helson/parallel.hpp"
#include "helson/rng.hpp"

namespace helson::meansquare {

namespace {

constexpr std::size_t kChunk = std::size_t{1} << 16;

double trapezoid_mean(const std::vector<double>& values, double h, double T) {
  std::vector<double> w(values);
  if (!w.empty()) {
    w.front() *= 0.5;
    w.back() *= 0.5;
  }
  return pairwise_sum(w.data(), w.size()) * h / (2.0 * T);
}

// |S(t_k)|^2 on the symmetric grid, with S = sum b_j e^{-i t w_j}.
std::vector<double> squared_samples(const std::vector<double>& freqs, const std::vector<cplx>& b, const Grid& g,
                                    double T) {
  const auto S = phasor_series(freqs, b, -T, g.h, g.count);
  std::vector<double> out(S.size());
  for (std::size_t k = 0; k < S.size(); ++k) out[k] = std::norm(S[k]);
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double nyquist_step(double n_max) {
  if (!(n_max > 1.0)) return std::numeric_limits<double>::infinity();
  return std::numbers::pi / std::log(n_max);
}

std::vector<cplx> phasor_series(const std::vector<double>& freqs, const std::vector<cplx>& b, double t0, double dt,
                                std::size_t count) {
  if (freqs.size() != b.size()) throw ArgumentError("phasor_series: frequency and coefficient counts differ");
  std::vector<cplx> out(count);
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  const std::size_t m = freqs.size();
  std::vector<double> sr(m), si(m);
  for (std::size_t j = 0; j < m; ++j) {
    sr[j] = std::cos(dt * freqs[j]);
    si[j] = -std::sin(dt * freqs[j]);
  }
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t k0 = c * kChunk, k1 = std::min(count, k0 + kChunk);
    const double t = t0 + static_cast<double>(k0) * dt;
    std::vector<double> zr(m), zi(m);
    for (std::size_t j = 0; j < m; ++j) {
      const cplx z = b[j] * std::polar(1.0, -t * freqs[j]);
      zr[j] = z.real();
      zi[j] = z.imag();
    }
    for (std::size_t k = k0; k < k1; ++k) {
      double re = 0.0, im = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        re += zr[j];
        im += zi[j];
        const double nr = zr[j] * sr[j] - zi[j] * si[j];
        zi[j] = zr[j] * si[j] + zi[j] * sr[j];
        zr[j] = nr;
      }
      out[k] = cplx(re, im);
    }
  });
  return out;
}

Grid symmetric_grid(double T, double dt) {
  if (!(T > 0) || !(dt > 0)) throw ArgumentError("mean squares need T > 0 and dt > 0");
  Grid g;
  const auto intervals = static_cast<std::size_t>(std::ceil(2.0 * T / dt));
  g.count = intervals + 1;
  g.h = 2.0 * T / static_cast<double>(intervals);
  return g;
}

MeanSquareResult dirichlet_meansquare(const std::vector<Term>& terms, double sigma, double T, double dt) {
  if (!(sigma >= 0.5)) throw ArgumentError("dirichlet_meansquare needs sigma >= 1/2");
  MeanSquareResult r;
  r.sigma = sigma;
  r.T = T;
  if (terms.empty()) return r;
  double n_max = 0.0, n_min = std::numeric_limits<double>::infinity();
  for (const auto& t : terms) {
    if (!(t.n >= 1.0)) throw ArgumentError("dirichlet_meansquare needs n >= 1");
    n_max = std::max(n_max, t.n);
    n_min = std::min(n_min, t.n);
  }
  const double guard = nyquist_step(n_max);
  if (dt > guard) throw ArgumentError("dt " + fmt(dt) + " exceeds the sampling guard pi/log(n_max) = " + fmt(guard));
  const auto g = symmetric_grid(T, dt);

  std::vector<Term> sorted(terms);
  std::sort(sorted.begin(), sorted.end(), [](const Term& a, const Term& b) { return a.n < b.n; });
  std::vector<double> freqs, weight;
  std::vector<cplx> b;
  for (const auto& t : sorted) {
    const double w = std::abs(t.a) * std::pow(t.n, -sigma);
    freqs.push_back(std::log(t.n));
    b.push_back(t.a * std::pow(t.n, -sigma));
    weight.push_back(w);
  }
  for (std::size_t j = 1; j < freqs.size(); ++j)
    if (!(freqs[j] > freqs[j - 1])) throw ArgumentError("dirichlet_meansquare needs distinct n");

  const auto sq = squared_samples(freqs, b, g, T);
  r.samples = g.count;
  r.empirical = trapezoid_mean(sq, g.h, T);

  double diag = 0.0, mv = 0.0, l1 = 0.0;
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    double delta = std::numeric_limits<double>::infinity();
    if (j > 0) delta = std::min(delta, freqs[j] - freqs[j - 1]);
    if (j + 1 < freqs.size()) delta = std::min(delta, freqs[j + 1] - freqs[j]);
    const double w2 = weight[j] * weight[j];
    diag += w2;
    if (std::isfinite(delta)) mv += w2 / delta;
    l1 += weight[j];
  }
  r.target = diag;
  // trapezoid error on each cross term e^{i w t}: |h cot(w h/2) - 2/w| |sin wT| <= 2 |w| h^2 / pi^2 for |w| h <= pi
  const double trap = 2.0 * std::log(n_max / n_min) * g.h * g.h / (std::numbers::pi * std::numbers::pi) * l1 * l1;
  r.remainder = (3.0 * std::numbers::pi * mv + trap) / (2.0 * T);
  r.ratio = r.target > 0 ? r.empirical / r.target : 0.0;
  return r;
}

MeanSquareResult approx_meansquare(const continuation::ErrorProfile& E, double sigma, double x_cut, double T,
                                   double dt) {
  if (!(sigma > 0.5)) throw ArgumentError("approx_meansquare needs sigma > 1/2");
  const double X = E.X_end();
  if (!(x_cut >= 1.0 && x_cut <= X)) throw ArgumentError("approx_meansquare needs 1 <= x_cut <= X_end");
  const double guard = nyquist_step(X);
  if (dt <= 0) dt = guard / 2;
  if (dt > guard) throw ArgumentError("dt " + fmt(dt) + " exceeds the sampling guard pi/log(X_end) = " + fmt(guard));

  MeanSquareResult r;
  r.sigma = sigma;
  r.x_cut = x_cut;
  r.T = T;
  const auto g = symmetric_grid(T, dt);
  r.samples = g.count;

  const auto& p = E.prime_values();
  const auto& lp = E.prime_logs();
  const auto& chi = E.prime_chars();
  std::vector<double> freqs;
  std::vector<cplx> b;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= x_cut) continue;
    freqs.push_back(lp[i]);
    b.push_back(chi[i] * std::exp(-sigma * lp[i]));
    r.target += std::exp(-2.0 * sigma * lp[i]);
  }
  const auto S = phasor_series(freqs, b, -T, g.h, g.count);

  const auto& terms = E.q().terms;
  std::vector<double> sq(g.count), law_sq(g.count);
  parallel_for(g.count, [&](std::size_t k) {
    const cplx s(sigma, -T + static_cast<double>(k) * g.h);
    E.check_pole(s);
    cplx law = 0.0;
    for (const auto& t : terms)
      law -= static_cast<double>(t.mult) * continuation::expint_e1((s - t.rho) * std::log(std::max(X, t.cutoff)));
    sq[k] = std::norm(S[k] + law);
    law_sq[k] = std::norm(law);
  });
  r.empirical = trapezoid_mean(sq, g.h, T);

  // What the continuation leaves out beyond X_end: the support primes there, replaced by the law. Their mean square
  // is at most twice the diagonal sum plus twice the law's own mean square. The diagonal sum is extrapolated from the
  // prime mass per dyadic window measured on [X^{2/3}, X]: sum_{x<p<=2x} log p <= D x^b, b the largest exponent of q.
  double b_exp = 0.0;
  for (const auto& t : terms) b_exp = std::max(b_exp, t.rho.real());
  double beyond = 0.0;
  if (!terms.empty()) {
    double D = 0.0;
    for (double x = construct::growth_window_start(X); 2.0 * x <= X; x *= 2.0) {
      double mass = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > x && p[i] <= 2.0 * x) mass += lp[i];
      D = std::max(D, mass / std::pow(x, b_exp));
    }
    if (!(2.0 * sigma > b_exp)) throw PrecisionError("approx_meansquare: support density too high for sigma");
    beyond = D * std::pow(X, b_exp - 2.0 * sigma) / (std::log(X) * (1.0 - std::pow(2.0, b_exp - 2.0 * sigma)));
  }
  r.remainder = 2.0 * beyond + 2.0 * trapezoid_mean(law_sq, g.h, T);
  if (r.target > 0 && r.remainder > 0.1 * r.target)
    throw PrecisionError("approx_meansquare: omitted mean square " + fmt(r.remainder) + " exceeds 10% of the target " +
                         fmt(r.target) + "; a larger X_max is needed");
  r.ratio = r.target > 0 ? r.empirical / r.target : 0.0;
  return r;
}

SteinhausTail sample_steinhaus(std::uint64_t seed, const std::vector<std::uint64_t>& primes) {
  SteinhausTail out;
  out.seed = seed;
  SplitMix64 rng(seed);
  for (auto p : primes) out.entries.emplace_back(p, std::numbers::pi - 2.0 * std::numbers::pi * rng.uniform());
  return out;
}

double steinhaus_target(const std::vector<std::uint64_t>& primes, double sigma, double x_cut) {
  double total = 0.0;
  for (auto p : primes) {
    if (static_cast<double>(p) <= x_cut) continue;
    const double r = std::pow(static_cast<double>(p), -2.0 * sigma);
    double rj = r;
    for (int j = 1; rj > 1e-20 * r; ++j, rj *= r) total += rj / (static_cast<double>(j) * j);
  }
  return total;
}

MeanSquareResult steinhaus_tail(std::uint64_t seed, const std::vector<std::uint64_t>& primes, double sigma,
                                double x_cut, double T) {
  if (!(sigma > 0.5)) throw ArgumentError("steinhaus_tail needs sigma > 1/2");
  MeanSquareResult r;
  r.sigma = sigma;
  r.x_cut = x_cut;
  r.T = T;
  const auto tail = sample_steinhaus(seed, primes);
  std::vector<double> freqs;
  std::vector<cplx> b;
  double p_max = 1.0;
  for (const auto& [p, angle] : tail.entries) {
    const double pd = static_cast<double>(p);
    if (pd <= x_cut) continue;
    p_max = std::max(p_max, pd);
    const double lp = std::log(pd);
    // log of 1/(1 - z) = sum z^j / j, kept while the coefficient is above 1e-17
    for (int j = 1;; ++j) {
      const double mag = std::exp(-j * sigma * lp) / j;
      if (mag < 1e-17) break;
      freqs.push_back(j * lp);
      b.push_back(std::polar(mag, j * angle));
    }
  }
  r.target = steinhaus_target(primes, sigma, x_cut);
  if (freqs.empty()) return r;
  const auto g = symmetric_grid(T, nyquist_step(p_max) / 2);
  r.samples = g.count;
  r.empirical = trapezoid_mean(squared_samples(freqs, b, g, T), g.h, T);
  r.ratio = r.target > 0 ? r.empirical / r.target : 0.0;
  return r;
}

std::vector<BohrLandauRow> bohr_landau_diag(const multisets::SignedMultiset& Z, const std::vector<double>& sigmas,
                                            double threshold) {
  std::vector<double> heights;
  for (const auto& pt : Z.points()) heights.push_back(std::max(1.0, std::abs(pt.gamma)));
  std::sort(heights.begin(), heights.end());
  heights.erase(std::unique(heights.begin(), heights.end()), heights.end());
  std::vector<BohrLandauRow> out;
  for (double sigma : sigmas) {
    BohrLandauRow row;
    row.sigma = sigma;
    for (double T : heights) {
      const double v = static_cast<double>(multisets::counting(Z, sigma, T)) / T;
      if (v > row.slope) {
        row.slope = v;
        row.at_T = T;
      }
    }
    if (!heights.empty())
      row.final_slope = static_cast<double>(multisets::counting(Z, sigma, heights.back())) / heights.back();
    row.flagged = row.final_slope >= threshold;
    out.push_back(row);
  }
  return out;
}

namespace {

cplx log_euler(const std::vector<std::pair<std::uint64_t, double>>& support, cplx s) {
  cplx acc = 0.0;
  for (const auto& [p, angle] : support)
    acc -= std::log(1.0 - construct::EulerSupport::unit(angle) * std::exp(-s * std::log(static_cast<double>(p))));
  return acc;
}

}  // namespace

double translate_distance(const std::vector<std::pair<std::uint64_t, double>>& support,
                          const std::vector<TargetSample>& target, double tau) {
  if (target.empty()) throw ArgumentError("translate_distance needs a nonempty target grid");
  std::vector<cplx> diff(target.size());
  parallel_for(target.size(), [&](std::size_t k) {
    diff[k] = log_euler(support, target[k].s + cplx(0.0, tau)) - std::log(target[k].value);
  });
  const double n = std::round(diff[0].imag() / (2.0 * std::numbers::pi));
  double worst = 0.0;
  for (const auto& d : diff) worst = std::max(worst, std::abs(d - cplx(0.0, 2.0 * std::numbers::pi * n)));
  return worst;
}

SearchResult translate_search(const std::vector<std::pair<std::uint64_t, double>>& support,
                              const std::vector<TargetSample>& target, double tau_lo, double tau_hi,
                              std::size_t budget) {
  if (!(tau_hi > tau_lo)) throw ArgumentError("translate_search needs tau_lo < tau_hi");
  if (budget == 0) throw ArgumentError("translate_search needs a positive budget");
  if (target.empty()) throw ArgumentError("translate_search needs a nonempty target grid");
  for (const auto& t : target) {
    if (!(t.s.real() > 0.5 && t.s.real() < 1.0)) throw ArgumentError("target grid must lie in 1/2 < Re s < 1");
    if (t.value == cplx(0.0)) throw ArgumentError("target vanishes on the grid; universality needs zero-free targets");
  }

  SearchResult r;
  r.best_distance = std::numeric_limits<double>::infinity();
  auto eval = [&](double tau) {
    if (r.trace.size() >= budget) return std::numeric_limits<double>::infinity();
    const double d = translate_distance(support, target, tau);
    if (d < r.best_distance) {
      r.best_distance = d;
      r.best_tau = tau;
    }
    r.trace.push_back(r.best_distance);
    return d;
  };

  eval(tau_lo <= 0.0 && 0.0 <= tau_hi ? 0.0 : tau_lo);
  eval(tau_lo);
  eval(tau_hi);
  const double width = tau_hi - tau_lo;
  constexpr double kGolden = 0.6180339887498949;
  for (int level = 1; r.trace.size() < budget && level < 60; ++level) {
    const double h = width / std::ldexp(1.0, level);
    const std::uint64_t n = std::uint64_t{1} << (level - 1);
    for (std::uint64_t i = 0; i < n && r.trace.size() < budget; ++i) eval(tau_lo + static_cast<double>(2 * i + 1) * h);
    if (level < 3) continue;
    // golden-section refinement on [best - h, best + h]
    double a = std::max(tau_lo, r.best_tau - h), b = std::min(tau_hi, r.best_tau + h);
    double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
    double fc = eval(c), fd = eval(d);
    for (int it = 0; it < 8 && r.trace.size() < budget; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kGolden * (b - a);
        fc = eval(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kGolden * (b - a);
        fd = eval(d);
      }
    }
  }
  return r;
}

}  // namespace helson::meansquare
