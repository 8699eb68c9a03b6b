#include "helson/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "helson/error.hpp"

namespace helson::construct {

namespace {

constexpr double kPi = std::numbers::pi;

cplx term_integral(const QTerm& t, double x) {
  if (x <= t.cutoff) return 0.0;
  return static_cast<double>(t.mult) * (std::pow(cplx(x), t.rho) - std::pow(cplx(t.cutoff), t.rho)) / t.rho;
}

double log_u(std::uint64_t x) { return std::log(static_cast<double>(x)); }

struct Builder {
  EulerSupport support;
  ConstructionLedger ledger;
  std::vector<std::uint64_t> pool;  // candidate primes, ascending
  cplx psi = 0.0;

  cplx target(double x) const {
    cplx t = -q_integral(support.q, x);
    return t;
  }

  void record(int k, std::uint64_t x, std::uint64_t used) {
    LedgerRow row;
    row.k = k;
    row.x_k = static_cast<double>(x);
    row.target = target(row.x_k);
    row.achieved = psi;
    row.residual = psi - row.target;
    row.primes_used = used;
    ledger.blocks.push_back(row);
  }

  void run(double X_max) {
    if (!(X_max >= 2)) throw ArgumentError("X_max must be >= 2");
    const auto cap = primes::configured_cap();
    if (X_max > static_cast<double>(cap)) throw ResourceError("X_max exceeds the sieve cap");
    const bool real_only = support.mode == Mode::Pnu || support.q.real_valued;
    ledger.complex_valued = !real_only;

    support.entries.push_back({2, 0.0, 0});
    psi = std::log(2.0);
    std::uint64_t x = 2;
    int k = 1;
    record(k, x, 1);
    const auto limit = static_cast<std::uint64_t>(std::floor(X_max));
    std::uint64_t last_selected = 2;
    while (true) {
      const std::uint64_t nx = next_boundary(x, support.params);
      if (nx > limit) break;
      const auto lo = std::upper_bound(pool.begin(), pool.end(), x);
      const auto hi = std::upper_bound(lo, pool.end(), nx);
      const std::size_t K = static_cast<std::size_t>(hi - lo);
      cplx r = target(static_cast<double>(nx)) - psi;
      double angle = 0.0;
      double need = 0.0;
      if (support.mode == Mode::Pnu) {
        need = r.real();
      } else if (real_only) {
        need = std::abs(r.real());
        angle = r.real() < 0 ? kPi : 0.0;
      } else {
        need = std::abs(r);
        angle = std::arg(r);
      }
      const double stop = std::log(static_cast<double>(nx));
      double sum = 0.0;
      std::uint64_t used = 0;
      if (need >= stop && K > 0) {
        const double per = log_u(x + 1);
        const auto need_est = static_cast<std::size_t>(std::ceil(need / per));
        const std::size_t stride = std::max<std::size_t>(1, K / std::max<std::size_t>(1, need_est));
        std::vector<char> taken(K, 0);
        std::vector<std::uint64_t> chosen;
        auto try_take = [&](std::size_t i) {
          const std::uint64_t p = *(lo + static_cast<std::ptrdiff_t>(i));
          const std::uint64_t prev = chosen.empty() ? last_selected : chosen.back();
          if (support.params.separation_floor > 0 && p > prev) {
            const double pd = static_cast<double>(p);
            const double floor_gap = support.params.separation_floor * std::pow(pd, 1.0 - support.params.alpha) / std::log(pd);
            if (static_cast<double>(p - prev) < floor_gap) return;
          }
          taken[i] = 1;
          chosen.push_back(p);
          sum += std::log(static_cast<double>(p));
        };
        for (std::size_t i = stride - 1; i < K && need - sum >= stop; i += stride) try_take(i);
        for (std::size_t i = 0; i < K && need - sum >= stop; ++i)
          if (!taken[i]) try_take(i);
        std::sort(chosen.begin(), chosen.end());
        // summed again in ascending order so replay reproduces psi bit for bit
        sum = 0.0;
        for (auto p : chosen) {
          support.entries.push_back({p, angle, k});
          sum += std::log(static_cast<double>(p));
        }
        used = chosen.size();
        if (!chosen.empty()) last_selected = chosen.back();
      }
      psi += EulerSupport::unit(angle) * sum;
      ++k;
      x = nx;
      record(k, x, used);
      if (std::abs(ledger.blocks.back().residual) > kCarryLimit * stop)
        throw ConstructionError("block " + std::to_string(k - 1) + " ending at x=" + std::to_string(x) +
                                    " cannot meet its target from the available primes",
                                k - 1);
    }
    support.X_end = static_cast<double>(x);
    std::sort(support.entries.begin(), support.entries.end(),
              [](const SupportEntry& a, const SupportEntry& b) { return a.p < b.p; });
    finish();
  }

  void finish() {
    double worst = 0.0;
    for (const auto& row : ledger.blocks) worst = std::max(worst, std::abs(row.residual) / std::log(row.x_k));
    support.C_led = worst;
    double sep = std::numeric_limits<double>::infinity();
    const auto& e = support.entries;
    for (std::size_t i = 1; i < e.size(); ++i) {
      const double p = static_cast<double>(e[i - 1].p);
      const double gap = static_cast<double>(e[i].p - e[i - 1].p);
      double v = 0.0;
      switch (support.mode) {
        case Mode::Pnu: v = gap * std::pow(p, support.params.nu - 1.0); break;
        case Mode::PChi: v = gap * std::log(p) / std::pow(p, 1.0 - support.params.alpha); break;
        case Mode::ZerosOnly: v = gap * std::log(p) / std::sqrt(p); break;
      }
      sep = std::min(sep, v);
    }
    support.c_sep = std::isinf(sep) ? 0.0 : sep;
    support.growth_constant = measure_growth_constant(support, support.growth_exponent, growth_window_start(support.X_end));
  }
};

std::vector<std::uint64_t> prime_pool(double X_max) {
  const auto limit = static_cast<std::uint64_t>(std::floor(X_max));
  if (limit < 3) return {};
  auto t = primes::sieve_range(3, limit);
  return std::move(t.primes);
}

}  // namespace

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::Pnu: return "pnu";
    case Mode::PChi: return "pchi";
    case Mode::ZerosOnly: return "zeros";
  }
  return "unknown";
}

Mode parse_mode(const std::string& s) {
  if (s == "pnu") return Mode::Pnu;
  if (s == "pchi") return Mode::PChi;
  if (s == "zeros") return Mode::ZerosOnly;
  throw FormatError("unknown support mode: " + s);
}

cplx EulerSupport::unit(double angle) {
  if (angle == 0.0) return 1.0;
  if (angle == kPi) return -1.0;
  return std::polar(1.0, angle);
}

cplx q_eval(const QFunction& q, double x) {
  cplx s = 0.0;
  for (const auto& t : q.terms)
    if (x >= t.cutoff) s += static_cast<double>(t.mult) * std::pow(cplx(x), t.rho - 1.0);
  return q.real_valued ? cplx(s.real(), 0.0) : s;
}

cplx q_integral(const QFunction& q, double x) {
  cplx s = 0.0;
  for (const auto& t : q.terms) s += term_integral(t, x);
  return q.real_valued ? cplx(s.real(), 0.0) : s;
}

double q_variation(const QFunction& q, double a, double b) {
  double v = 0.0;
  for (const auto& t : q.terms) {
    const double lo = std::max(a, t.cutoff);
    if (b <= lo) continue;
    const double beta = t.rho.real();
    v += std::abs(t.mult) * (std::pow(b, beta) - std::pow(lo, beta)) / beta;
  }
  return v;
}

double growth_window_start(double X_end) { return std::max(2.0, std::pow(X_end, 2.0 / 3.0)); }

std::uint64_t next_boundary(std::uint64_t x, const Params& p) {
  const double xd = static_cast<double>(x);
  double len = 0.0;
  switch (p.schedule) {
    case Schedule::Power: return x + primes::window_length(x, p.theta);
    case Schedule::Cramer: len = std::ceil(p.block_C * std::pow(std::log(xd), 2.0 + p.eps)); break;
    case Schedule::SqrtLog: len = std::ceil(2.0 * std::sqrt(xd) * std::log(xd)); break;
  }
  return x + static_cast<std::uint64_t>(std::max(1.0, len));
}

cplx psi_chi(const EulerSupport& s, double x) {
  cplx v = 0.0;
  for (const auto& e : s.entries) {
    if (static_cast<double>(e.p) > x) break;
    v += EulerSupport::unit(e.angle) * std::log(static_cast<double>(e.p));
  }
  return v;
}

double measure_growth_constant(const EulerSupport& s, double g, double x_from) {
  // E is continuous between breakpoints (support primes and term cutoffs), with |E'| = |q| <= sum |m| a^{beta-1}
  // on [a, b]. Sample each interval densely enough that the Lipschitz slack stays below 5% of a^g.
  std::vector<double> cuts{x_from, s.X_end};
  for (const auto& e : s.entries) {
    const double p = static_cast<double>(e.p);
    if (p > x_from && p < s.X_end) cuts.push_back(p);
  }
  for (const auto& t : s.q.terms)
    if (t.cutoff > x_from && t.cutoff < s.X_end) cuts.push_back(t.cutoff);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  cplx psi = psi_chi(s, x_from);
  std::size_t next_entry = 0;
  while (next_entry < s.entries.size() && static_cast<double>(s.entries[next_entry].p) <= x_from) ++next_entry;
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    while (next_entry < s.entries.size() && static_cast<double>(s.entries[next_entry].p) <= a) {
      psi += EulerSupport::unit(s.entries[next_entry].angle) * std::log(static_cast<double>(s.entries[next_entry].p));
      ++next_entry;
    }
    double lip = 0.0;
    for (const auto& t : s.q.terms)
      if (t.cutoff <= a) lip += std::abs(t.mult) * std::pow(a, t.rho.real() - 1.0);
    const double scale = std::pow(a, g);
    const double width = b - a;
    const double n = std::clamp(std::ceil(lip * width / (0.1 * scale)), 1.0, 4096.0);
    const double h = width / n;
    double peak = 0.0;
    for (int j = 0; j <= static_cast<int>(n); ++j) {
      const double x = j == static_cast<int>(n) ? b : a + h * j;
      peak = std::max(peak, std::abs(q_integral(s.q, x) + psi));
    }
    best = std::max(best, (peak + lip * h / 2.0) / scale);
  }
  const double e_end = std::abs(q_integral(s.q, s.X_end) + psi_chi(s, s.X_end));
  return std::max(best, e_end / std::pow(s.X_end, g));
}

ConstructionLedger replay(const EulerSupport& s) {
  ConstructionLedger out;
  out.complex_valued = !(s.mode == Mode::Pnu || s.q.real_valued);
  std::uint64_t x = 2;
  int k = 1;
  std::size_t idx = 0;
  cplx psi = 0.0;
  const auto end = static_cast<std::uint64_t>(s.X_end);
  while (true) {
    std::uint64_t used = 0;
    double sum = 0.0;
    double angle = 0.0;
    while (idx < s.entries.size() && s.entries[idx].p <= x) {
      if (used > 0 && s.entries[idx].angle != angle) {
        psi += EulerSupport::unit(angle) * sum;
        sum = 0.0;
      }
      angle = s.entries[idx].angle;
      sum += std::log(static_cast<double>(s.entries[idx].p));
      ++idx;
      ++used;
    }
    if (used > 0) psi += EulerSupport::unit(angle) * sum;
    LedgerRow row;
    row.k = k;
    row.x_k = static_cast<double>(x);
    row.target = -q_integral(s.q, row.x_k);
    row.achieved = psi;
    row.residual = psi - row.target;
    row.primes_used = used;
    out.blocks.push_back(row);
    if (x >= end) break;
    x = next_boundary(x, s.params);
    ++k;
    if (x > end) throw FormatError("support X_end is not a block boundary of its schedule");
  }
  return out;
}

BuildResult build_p_nu(double nu, int m, primes::Rational theta, double X_max) {
  if (m <= 0) throw ArgumentError("build_p_nu: multiplicity m must be positive");
  if (theta.num <= 0 || theta.den <= 0 || theta.num > theta.den) throw ArgumentError("build_p_nu: theta must lie in (0, 1]");
  // Mean-square convergence needs nu <= (2 - theta)/2, which is 59/80 at theta = 21/40.
  const double nu_max = static_cast<double>(2 * theta.den - theta.num) / static_cast<double>(2 * theta.den);
  if (!(nu > 0.5 && nu <= nu_max))
    throw ArgumentError("build_p_nu: nu must lie in (0.5, " + std::to_string(nu_max) + "]");
  Builder b;
  b.support.mode = Mode::Pnu;
  b.support.params.nu = nu;
  b.support.params.m = m;
  b.support.params.theta = theta;
  b.support.params.schedule = Schedule::Power;
  b.support.q.mode = Mode::Pnu;
  b.support.q.real_valued = true;
  b.support.q.terms.push_back({cplx(nu, 0.0), -m, 1.0});
  b.support.growth_exponent = nu + theta.value() - 1.0;
  b.pool = prime_pool(X_max);
  b.run(X_max);
  return {std::move(b.support), std::move(b.ledger)};
}

BuildResult build_p_chi(const multisets::SignedMultiset& Z, const ChiMode& mode, double X_max, const EulerSupport* base) {
  Builder b;
  b.support.mode = Mode::PChi;
  b.support.q.mode = Mode::PChi;
  b.support.q.real_valued = Z.conjugate_symmetric();
  auto& P = b.support.params;
  P.separation_floor = mode.separation_floor;
  P.block_C = mode.block_C;
  if (mode.kind == ChiMode::Kind::thm_main) {
    const auto report = multisets::gate_thm_main(Z, mode.alpha, mode.C_b, mode.C_c, mode.gate_eps);
    if (!report.passed()) throw ArgumentError("multiset fails the density gate");
    P.alpha = mode.alpha;
    P.theta = mode.theta;
    P.schedule = Schedule::Power;
    for (const auto& p : Z.points()) {
      const double cut = std::pow(std::abs(p.gamma) + 1.0, 1.0 / (mode.alpha + p.beta - 1.0));
      b.support.q.terms.push_back({p.rho(), p.mult, cut});
    }
    b.support.growth_exponent = mode.alpha + mode.theta.value() - 1.0;
  } else {
    const auto report = multisets::gate_thm_main3(Z, mode.lambda, mode.kappa, mode.C);
    if (!report.passed()) throw ArgumentError("multiset fails the density gate");
    P.lambda = mode.lambda;
    P.kappa = mode.kappa;
    P.eps = mode.eps > 0 ? mode.eps : std::min(0.5, (mode.lambda - mode.kappa) / 2.0);
    P.schedule = Schedule::Cramer;
    double amax = 0.5;
    for (const auto& p : Z.points()) {
      b.support.q.terms.push_back({p.rho(), p.mult, std::abs(p.gamma)});
      amax = std::max(amax, p.beta);
    }
    P.alpha = amax;
    b.support.growth_exponent = 0.1;
  }
  if (base != nullptr) {
    if (base->mode != Mode::Pnu) throw ArgumentError("base support must be a P_nu build");
    for (const auto& e : base->entries)
      if (e.p > 2 && static_cast<double>(e.p) <= X_max) b.pool.push_back(e.p);
  } else {
    b.pool = prime_pool(X_max);
  }
  b.run(X_max);
  return {std::move(b.support), std::move(b.ledger)};
}

BuildResult build_zeros_only(const multisets::SignedMultiset& Zplus, const multisets::DyadicAssignment& assignment,
                             multisets::ZerosMode mode, double X_max) {
  if (!multisets::gate_thm_nonuniversal(Zplus, mode).passed()) throw ArgumentError("multiset fails the zeros-only gate");
  if (assignment.tags.size() != Zplus.size() || assignment.mode != mode)
    throw ArgumentError("dyadic assignment does not match the multiset");
  Builder b;
  b.support.mode = Mode::ZerosOnly;
  b.support.q.mode = Mode::ZerosOnly;
  b.support.q.real_valued = Zplus.conjugate_symmetric();
  auto& P = b.support.params;
  P.rh = mode == multisets::ZerosMode::rh;
  P.schedule = P.rh ? Schedule::SqrtLog : Schedule::Power;
  P.theta = {21, 40};

  const auto& pts = Zplus.points();
  int jmax = 0;
  for (const auto& t : assignment.tags) jmax = std::max(jmax, t.j);
  std::vector<double> u(static_cast<std::size_t>(jmax + 1), 1.0);
  for (int j = 2; j <= jmax; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (assignment.tags[i].region == multisets::Region::U && assignment.tags[i].j == j) total += std::abs(pts[i].mult);
    u[static_cast<std::size_t>(j)] = std::exp(static_cast<double>(j) + total);
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& tag = assignment.tags[i];
    if (tag.region == multisets::Region::U) {
      b.support.q.terms.push_back({pts[i].rho(), pts[i].mult, u[static_cast<std::size_t>(tag.j)]});
    } else {
      const double v = std::ldexp(1.0, tag.j);
      b.support.q.terms.push_back({pts[i].rho(), pts[i].mult, v});
      b.support.q.terms.push_back({cplx(tag.beta_prime, pts[i].gamma), -pts[i].mult, v});
    }
  }
  b.support.growth_exponent = 0.55;
  b.pool = prime_pool(X_max);
  b.run(X_max);
  return {std::move(b.support), std::move(b.ledger)};
}

}  // namespace helson::construct
