#include "helson/multisets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "helson/error.hpp"
#include "helson/rng.hpp"

namespace helson::multisets {

namespace {

std::string describe(const Point& p) {
  std::ostringstream os;
  os.precision(17);
  os << "beta=" << p.beta << " gamma=" << p.gamma << " mult=" << p.mult;
  return os.str();
}

bool point_less(const Point& a, const Point& b) {
  const double ga = std::abs(a.gamma), gb = std::abs(b.gamma);
  if (ga != gb) return ga < gb;
  if (a.beta != b.beta) return a.beta < b.beta;
  return a.gamma < b.gamma;
}

double density_exponent(double alpha, double sigma) { return (alpha - sigma) / (alpha + sigma - 1.0); }

// Largest count N(sigma, T) over sigma just below beta_level: points with beta >= level and |gamma| <= T.
std::uint64_t count_at_least(const std::vector<Point>& pts, double level, double T) {
  std::uint64_t n = 0;
  for (const auto& p : pts) {
    if (std::abs(p.gamma) > T) break;
    if (p.beta >= level) n += static_cast<std::uint64_t>(std::abs(p.mult));
  }
  return n;
}

struct CheckBuilder {
  DensityCheck check;
  explicit CheckBuilder(Condition id) {
    check.id = id;
    check.margin = std::numeric_limits<double>::infinity();
  }
  void observe(double bound, double value, const std::string& where) {
    const double slack = bound - value;
    if (slack < check.margin) check.margin = slack;
    if (slack < 0 && check.passed) {
      check.passed = false;
      check.witness = where;
    }
  }
  DensityCheck done() {
    if (std::isinf(check.margin)) check.margin = 0.0;
    return check;
  }
};

std::string window_text(double sigma, double T, double value, double bound) {
  std::ostringstream os;
  os.precision(17);
  os << "sigma=" << sigma << " T=" << T << " count=" << value << " bound=" << bound;
  return os.str();
}

// Condition (c) style check at the worst sigma levels and heights of the data.
void check_counting_power(const std::vector<Point>& pts, double alpha, double C_c, CheckBuilder& b) {
  std::set<double> levels;
  for (const auto& p : pts) levels.insert(p.beta);
  for (const auto& p : pts) {
    const double T = std::max(1.0, std::abs(p.gamma));
    {
      const double value = static_cast<double>(count_at_least(pts, std::nextafter(0.5, 1.0), T));
      const double bound = C_c * T;
      b.observe(bound, value, window_text(0.5, T, value, bound));
    }
    for (double level : levels) {
      const double value = static_cast<double>(count_at_least(pts, level, T));
      if (value == 0) continue;
      const double bound = C_c * std::pow(T, density_exponent(alpha, level));
      b.observe(bound, value, window_text(level, T, value, bound));
    }
  }
}

}  // namespace

SignedMultiset::SignedMultiset(std::vector<Point> points) : points_(std::move(points)) {
  for (const auto& p : points_) {
    if (!std::isfinite(p.beta) || !std::isfinite(p.gamma)) throw ArgumentError("multiset point is not finite");
    if (!(p.beta > 0.5)) throw ArgumentError("multiset point needs beta > 1/2: " + describe(p));
    if (p.mult == 0) throw ArgumentError("multiset point has zero multiplicity: " + describe(p));
  }
  std::sort(points_.begin(), points_.end(), point_less);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i].beta == points_[i - 1].beta && points_[i].gamma == points_[i - 1].gamma)
      throw ArgumentError("repeated multiset point: " + describe(points_[i]));
  }
}

bool SignedMultiset::conjugate_symmetric() const {
  std::map<std::pair<double, double>, int> m;
  for (const auto& p : points_) m[{p.beta, p.gamma}] = p.mult;
  for (const auto& p : points_) {
    auto it = m.find({p.beta, -p.gamma});
    if (it == m.end() || it->second != p.mult) return false;
  }
  return true;
}

std::string condition_name(Condition c) {
  switch (c) {
    case Condition::main_a: return "main(a)";
    case Condition::main_b: return "main(b)";
    case Condition::main_c: return "main(c)";
    case Condition::main3_a: return "main3(a)";
    case Condition::main3_b: return "main3(b)";
    case Condition::nonuniversal_i: return "nonuniversal(i)";
    case Condition::nonuniversal_ii: return "nonuniversal(ii)";
  }
  return "unknown";
}

bool DensityReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const DensityCheck& c) { return c.passed; });
}

std::uint64_t counting(const SignedMultiset& Z, double sigma, double T) {
  std::uint64_t n = 0;
  for (const auto& p : Z.points()) {
    if (std::abs(p.gamma) > T) break;
    if (p.beta > sigma) n += static_cast<std::uint64_t>(std::abs(p.mult));
  }
  return n;
}

DensityReport gate_thm_main(const SignedMultiset& Z, double alpha, double C_b, double C_c, double eps) {
  if (!(alpha > 0.5 && alpha < kAlphaMax))
    throw ArgumentError("alpha must lie in the admissible interval (0.5, 0.7375)");
  if (!(C_b > 0 && C_c > 0 && eps >= 0)) throw ArgumentError("gate constants must be positive");
  const auto& pts = Z.points();

  CheckBuilder a(Condition::main_a);
  for (const auto& p : pts) a.observe(alpha - p.beta, 0.0, describe(p));

  CheckBuilder b(Condition::main_b);
  for (const auto& p : pts) {
    const double T = std::max(1.0, std::abs(p.gamma) - 1.0);
    const double value =
        static_cast<double>(counting(Z, 0.5, T + 1.0)) - static_cast<double>(counting(Z, 0.5, T));
    const double bound = C_b * std::pow(T, eps);
    b.observe(bound, value, window_text(0.5, T, value, bound));
  }

  CheckBuilder c(Condition::main_c);
  check_counting_power(pts, alpha, C_c, c);

  return DensityReport{{a.done(), b.done(), c.done()}};
}

DensityReport gate_thm_main3(const SignedMultiset& Z, double lambda, double kappa, double C) {
  if (!(kappa > 1.0) || !(lambda > kappa)) throw ArgumentError("need lambda > kappa > 1");
  if (!(C > 0)) throw ArgumentError("gate constant must be positive");
  const double min_height = std::exp(std::exp(1.0));

  CheckBuilder a(Condition::main3_a);
  for (const auto& p : Z.points()) {
    const double g = std::abs(p.gamma);
    if (g < min_height) {
      a.observe(g - min_height, 0.0, describe(p) + " below height e^e");
      continue;
    }
    const double bound = 1.0 - lambda * std::log(std::log(g)) / std::log(g);
    a.observe(bound, p.beta, describe(p));
  }

  CheckBuilder b(Condition::main3_b);
  for (const auto& p : Z.points()) {
    const double T = std::abs(p.gamma);
    if (T <= std::exp(1.0)) continue;
    const double value = static_cast<double>(counting(Z, 0.5, T));
    const double bound = C * std::pow(std::log(T), kappa - 1.0);
    b.observe(bound, value, window_text(0.5, T, value, bound));
  }
  return DensityReport{{a.done(), b.done()}};
}

DensityReport gate_thm_nonuniversal(const SignedMultiset& Zplus, ZerosMode mode) {
  for (const auto& p : Zplus.points())
    if (p.mult < 0) throw ArgumentError("zeros-only construction takes positive multiplicities: " + describe(p));
  if (mode == ZerosMode::unconditional) {
    CheckBuilder a(Condition::nonuniversal_i);
    for (const auto& p : Zplus.points()) a.observe(39.0 / 40.0 - p.beta, 0.0, describe(p));
    return DensityReport{{a.done()}};
  }
  CheckBuilder a(Condition::nonuniversal_ii);
  for (const auto& p : Zplus.points()) {
    const double slack = 1.0 - p.beta;
    a.observe(slack > 0 ? slack : -1.0, 0.0, describe(p));
  }
  return DensityReport{{a.done()}};
}

DyadicTag classify(const Point& p) {
  if (!(p.beta > 0.5 && p.beta < 1.0)) throw ArgumentError("dyadic partition needs 1/2 < beta < 1: " + describe(p));
  int jb = 1;
  while (!(p.beta >= 0.5 + std::ldexp(1.0, -(jb + 1)))) ++jb;
  const double g = std::abs(p.gamma);
  DyadicTag tag;
  if (g <= std::ldexp(1.0, jb)) {
    tag.region = Region::U;
    tag.j = jb;
    return tag;
  }
  int jg = jb;
  while (!(g <= std::ldexp(1.0, jg + 1))) ++jg;
  tag.region = Region::V;
  tag.j = jg;
  return tag;
}

DyadicAssignment assign_dyadic(const SignedMultiset& Zplus, double beta_gap_budget, ZerosMode mode) {
  if (!gate_thm_nonuniversal(Zplus, mode).passed()) throw ArgumentError("multiset fails the zeros-only gate");
  const auto& pts = Zplus.points();
  DyadicAssignment out;
  out.mode = mode;
  out.tags.reserve(pts.size());
  int jmax = 0;
  for (const auto& p : pts) {
    out.tags.push_back(classify(p));
    jmax = std::max(jmax, out.tags.back().j);
  }
  std::vector<double> sum_m(static_cast<std::size_t>(jmax), 0.0);
  std::vector<double> beta_j(static_cast<std::size_t>(jmax), 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (out.tags[i].region != Region::V) continue;
    const auto j = static_cast<std::size_t>(out.tags[i].j - 1);
    sum_m[j] += pts[i].mult;
    beta_j[j] = std::max(beta_j[j], pts[i].beta);
  }
  out.delta.assign(static_cast<std::size_t>(jmax), 0.0);
  for (std::size_t j = 0; j < out.delta.size(); ++j) {
    if (sum_m[j] == 0) continue;
    double d = 1.0 / sum_m[j];
    if (mode == ZerosMode::rh) {
      const double jj = static_cast<double>(j + 1);
      d = std::min(d, (1.0 - beta_j[j]) / (jj * jj * sum_m[j]));
    }
    out.delta[j] = d;
  }

  std::set<std::pair<double, double>> taken;
  for (const auto& p : pts) taken.insert({p.beta, p.gamma});
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto& tag = out.tags[i];
    if (tag.region != Region::V) continue;
    const double delta = out.delta[static_cast<std::size_t>(tag.j - 1)];
    double gap = beta_gap_budget > 0 ? std::min(beta_gap_budget, delta) : std::ldexp(delta, -tag.j);
    double bp = pts[i].beta - gap;
    while (bp <= 0.5 || taken.count({bp, pts[i].gamma}) != 0) {
      gap *= 0.5;
      bp = pts[i].beta - gap;
      if (gap < 1e-15) throw ArgumentError("cannot place a paired point for " + describe(pts[i]));
    }
    tag.beta_prime = bp;
    taken.insert({bp, pts[i].gamma});
  }
  return out;
}

SignedMultiset sample_admissible(std::uint64_t seed, std::size_t n, double alpha, double Tmax,
                                 const SampleOptions& options) {
  if (n == 0) return SignedMultiset{};
  if (!(alpha > 0.5 && alpha < 1.0)) throw ArgumentError("sample_admissible: alpha must lie in (1/2, 1)");
  if (!(options.C_c > 0)) throw ArgumentError("sample_admissible: C_c must be positive");
  const double lo = std::max(options.gamma_min, 1.0);
  const double min_sep = 0.1;
  const double room = Tmax - lo - min_sep * static_cast<double>(n - 1);
  if (!(room >= 0)) throw ArgumentError("sample_admissible: too many points for the height range");
  const double floor = std::max(options.beta_floor, 0.5);
  if (!(floor < alpha)) throw ArgumentError("sample_admissible: beta_floor must lie below alpha");

  SplitMix64 rng(seed);
  std::vector<double> heights(n);
  for (auto& h : heights) h = rng.uniform() * room;
  std::sort(heights.begin(), heights.end());
  for (std::size_t i = 0; i < n; ++i) heights[i] += lo + min_sep * static_cast<double>(i);

  std::vector<Point> pts;
  pts.reserve(n);
  double cum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Point p;
    p.gamma = rng.uniform() < 0.5 ? -heights[i] : heights[i];
    p.mult = rng.uniform() < 0.75 ? 1 : 2;
    if (!options.positive_only && rng.uniform() < 0.5) p.mult = -p.mult;
    cum += std::abs(p.mult);
    const double T = std::max(1.0, heights[i]);
    const double r = std::log(cum / options.C_c) / std::log(std::max(T, 1.0 + 1e-12));
    if (r > 1.0 || !(cum <= options.C_c * T)) throw ArgumentError("sample_admissible: infeasible at point " + std::to_string(i));
    double upper = r <= 0 ? alpha : (alpha + r * (1.0 - alpha)) / (1.0 + r);
    upper = std::min(upper, alpha);
    const double u = rng.uniform();
    bool placed = false;
    for (int attempt = 0; attempt < 60 && !placed; ++attempt) {
      if (!(upper > floor)) break;
      p.beta = floor + (upper - floor) * (attempt == 0 ? (1.0 - u) : 0.5);
      if (!(p.beta > floor)) break;
      pts.push_back(p);
      std::vector<Point> sorted = pts;
      std::sort(sorted.begin(), sorted.end(), point_less);
      CheckBuilder c(Condition::main_c);
      check_counting_power(sorted, alpha, options.C_c, c);
      if (c.done().passed) {
        placed = true;
      } else {
        pts.pop_back();
        upper = p.beta;
      }
    }
    if (!placed) throw ArgumentError("sample_admissible: infeasible at point " + std::to_string(i));
  }
  return SignedMultiset(std::move(pts));
}

}  // namespace helson::multisets
