#include "helson/primes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "helson/error.hpp"
#include "helson/parallel.hpp"

namespace helson::primes {

namespace {

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::vector<std::uint32_t> base_primes(std::uint64_t limit) {
  std::vector<char> composite(limit + 1, 0);
  std::vector<std::uint32_t> out;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
  }
  return out;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

std::uint64_t configured_cap() {
  const char* env = std::getenv("HELSON_CAP");
  if (env == nullptr || *env == '\0') return kDefaultCap;
  try {
    return std::stoull(env);
  } catch (...) {
    throw ArgumentError(std::string("HELSON_CAP is not an integer: ") + env);
  }
}

std::size_t PrimeTable::count_upto(std::uint64_t x) const {
  return static_cast<std::size_t>(std::upper_bound(primes.begin(), primes.end(), x) - primes.begin());
}

std::size_t PrimeTable::first_above(std::uint64_t x) const { return count_upto(x); }

PrimeTable sieve_range(std::uint64_t lo, std::uint64_t hi, std::uint64_t cap) {
  if (lo < 2) throw ArgumentError("sieve_range: lo must be >= 2");
  if (lo > hi) throw ArgumentError("sieve_range: lo > hi");
  if (hi > cap) throw ResourceError("sieve_range: hi=" + std::to_string(hi) + " exceeds cap " + std::to_string(cap));

  const auto small = base_primes(isqrt(hi));
  const std::uint64_t span = hi - lo + 1;
  const std::size_t segments = static_cast<std::size_t>((span + kSegmentSize - 1) / kSegmentSize);
  std::vector<std::vector<std::uint64_t>> found(segments);

  parallel_for(segments, [&](std::size_t seg) {
    const std::uint64_t a = lo + seg * kSegmentSize;
    const std::uint64_t b = std::min(hi, a + kSegmentSize - 1);
    std::vector<char> composite(b - a + 1, 0);
    for (std::uint32_t p : small) {
      const std::uint64_t pp = static_cast<std::uint64_t>(p) * p;
      if (pp > b) break;
      std::uint64_t start = std::max(pp, (a + p - 1) / p * p);
      for (std::uint64_t j = start; j <= b; j += p) composite[j - a] = 1;
    }
    auto& out = found[seg];
    for (std::uint64_t v = a; v <= b; ++v)
      if (!composite[v - a]) out.push_back(v);
  });

  PrimeTable table;
  table.segment_lo = lo;
  table.segment_hi = hi;
  std::size_t total = 0;
  for (const auto& f : found) total += f.size();
  table.primes.reserve(total);
  for (const auto& f : found) table.primes.insert(table.primes.end(), f.begin(), f.end());
  return table;
}

std::uint64_t window_length(std::uint64_t x, Rational theta) {
  const double len = std::ceil(std::pow(static_cast<double>(x), theta.value()));
  if (!(len < 1.8e19)) throw ResourceError("window length x^theta overflows");
  return static_cast<std::uint64_t>(len);
}

std::uint64_t count_window(const PrimeTable& table, std::uint64_t x, Rational theta) {
  const std::uint64_t end = x + window_length(x, theta);
  return table.count_upto(end) - table.count_upto(x);
}

std::uint64_t count_window(std::uint64_t x, Rational theta, std::uint64_t cap) {
  if (x < 2) throw ArgumentError("count_window: x must be >= 2");
  if (theta.den <= 0 || theta.num <= 0 || theta.num > theta.den)
    throw ArgumentError("count_window: theta must lie in (0, 1]");
  const std::uint64_t len = window_length(x, theta);
  if (x + len > cap) throw ResourceError("count_window: window end exceeds cap");
  return sieve_range(x + 1, x + len, cap).primes.size();
}

std::uint64_t max_gap_below(std::uint64_t X, std::uint64_t cap) {
  if (X < 3) throw ArgumentError("max_gap_below: X must be >= 3");
  const auto table = sieve_range(2, X, cap);
  std::uint64_t best = 0;
  for (std::size_t i = 1; i < table.primes.size(); ++i)
    best = std::max(best, table.primes[i] - table.primes[i - 1]);
  return best;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

std::uint64_t next_prime(std::uint64_t x) {
  if (x < 2) return 2;
  std::uint64_t n = x + 1;
  while (!is_prime(n)) {
    if (n == std::numeric_limits<std::uint64_t>::max()) throw ResourceError("next_prime: overflow");
    ++n;
  }
  return n;
}

GapReport gap_scan(std::uint64_t x_min, std::uint64_t x_max, std::size_t points, Rational theta, std::uint64_t cap) {
  if (x_min < 2 || x_max < x_min) throw ArgumentError("gap_scan: need 2 <= x_min <= x_max");
  if (points == 0) throw ArgumentError("gap_scan: need at least one point");
  if (theta.den <= 0 || theta.num <= 0 || theta.num > theta.den)
    throw ArgumentError("gap_scan: theta must lie in (0, 1]");
  const std::uint64_t reach = x_max + window_length(x_max, theta);
  if (reach > cap) throw ResourceError("gap_scan: scan reach exceeds cap");
  // Room for the next prime after the last window end; prime gaps below 2^32 are < 400.
  const auto table = sieve_range(2, std::min(cap, reach + 2000), cap);

  GapReport report;
  report.theta = theta;
  const double la = std::log(static_cast<double>(x_min));
  const double lb = std::log(static_cast<double>(x_max));
  for (std::size_t i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    auto x = static_cast<std::uint64_t>(std::llround(std::exp(la + f * (lb - la))));
    x = std::clamp(x, x_min, x_max);
    if (!report.x_grid.empty() && report.x_grid.back() == x) continue;
    const std::size_t idx = table.first_above(x);
    const std::uint64_t np = idx < table.primes.size() ? table.primes[idx] : next_prime(x);
    report.x_grid.push_back(x);
    report.gap_at_x.push_back(np - x);
    report.window_counts.push_back(count_window(table, x, theta));
  }
  return report;
}

double normalized_window_minimum(const GapReport& report) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < report.x_grid.size(); ++i) {
    const double x = static_cast<double>(report.x_grid[i]);
    const double v = static_cast<double>(report.window_counts[i]) * std::log(x) / std::pow(x, report.theta.value());
    best = std::min(best, v);
  }
  return best;
}

}  // namespace helson::primes
