#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <set>

#include "helson/error.hpp"
#include "helson/primes.hpp"

using namespace helson;
using namespace helson::primes;

namespace {

bool trial_division(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::uint64_t> trial_range(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = lo; n <= hi; ++n)
    if (trial_division(n)) out.push_back(n);
  return out;
}

}  // namespace

TEST_CASE("sieve small ranges") {
  CHECK(sieve_range(2, 10).primes == std::vector<std::uint64_t>{2, 3, 5, 7});
  CHECK(sieve_range(100, 120).primes == trial_range(100, 120));
  CHECK(sieve_range(100, 120).primes == std::vector<std::uint64_t>{101, 103, 107, 109, 113});
  CHECK(sieve_range(14, 16).primes.empty());
}

TEST_CASE("sieve errors") {
  CHECK_THROWS_AS(sieve_range(20, 10), ArgumentError);
  CHECK_THROWS_AS(sieve_range(1, 10), ArgumentError);
  CHECK_THROWS_AS(sieve_range(2, 2000, 1000), ResourceError);
}

TEST_CASE("sieve agrees with trial division across segment boundaries") {
  const std::uint64_t lo = kSegmentSize - 500;
  const std::uint64_t hi = 2 * kSegmentSize + 500;
  const auto table = sieve_range(lo, hi);
  const auto oracle = trial_range(lo, hi);
  CHECK(table.primes == oracle);
}

TEST_CASE("union of adjacent ranges equals the joined range") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    std::uniform_int_distribution<std::uint64_t> d(2, 10'000'000);
    std::uint64_t v[3] = {d(rng), d(rng), d(rng)};
    std::sort(v, v + 3);
    if (v[0] == v[1] || v[1] == v[2]) continue;
    auto left = sieve_range(v[0], v[1]).primes;
    const auto right = sieve_range(v[1] + 1, v[2]).primes;
    left.insert(left.end(), right.begin(), right.end());
    CHECK(left == sieve_range(v[0], v[2]).primes);
  }
}

TEST_CASE("every sieved prime passes Miller-Rabin and trial division") {
  const auto table = sieve_range(999'000'000 - 20'000, 999'000'000);
  for (auto p : table.primes) {
    CHECK(is_prime(p));
    CHECK(trial_division(p));
  }
  std::size_t mr_count = 0;
  for (std::uint64_t n = 999'000'000 - 20'000; n <= 999'000'000; ++n) mr_count += is_prime(n);
  CHECK(mr_count == table.primes.size());
  CHECK(is_prime(18446744073709551557ULL));
  CHECK_FALSE(is_prime(3215031751ULL));
}

TEST_CASE("count_window") {
  CHECK(count_window(2, Rational{1, 1}) == 1);
  const std::uint64_t len = static_cast<std::uint64_t>(std::ceil(std::pow(10.0, 0.525)));
  CHECK(len == 4);
  CHECK(count_window(10, Rational{21, 40}) == trial_range(11, 10 + len).size());
  CHECK_THROWS_AS(count_window(1, Rational{1, 2}), ArgumentError);
  CHECK_THROWS_AS(count_window(1000, Rational{1, 2}, 1010), ResourceError);
}

TEST_CASE("max_gap_below") {
  CHECK(max_gap_below(10) == 2);
  CHECK(max_gap_below(100) == 8);
  CHECK(max_gap_below(1'000'000) == 114);
}

TEST_CASE("window availability scan") {
  const auto report = gap_scan(1000, 1'000'000, 60, Rational{21, 40});
  REQUIRE(report.x_grid.size() > 10);
  for (std::size_t i = 0; i < report.x_grid.size(); ++i) {
    CHECK(report.gap_at_x[i] >= 1);
    CHECK(report.window_counts[i] >= 1);
    CHECK(report.gap_at_x[i] == next_prime(report.x_grid[i]) - report.x_grid[i]);
  }
  CHECK(normalized_window_minimum(report) > 0.0);
}

TEST_CASE("HELSON_CAP is honoured") {
  setenv("HELSON_CAP", "5000", 1);
  CHECK(configured_cap() == 5000);
  CHECK_THROWS_AS(sieve_range(2, 6000), ResourceError);
  unsetenv("HELSON_CAP");
  CHECK(configured_cap() == kDefaultCap);
}
