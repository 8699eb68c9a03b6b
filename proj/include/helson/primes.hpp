#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace helson::primes {

/// Exponent carried exactly so block boundaries are reproducible integers.
struct Rational {
  std::int64_t num = 21;
  std::int64_t den = 40;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Every prime in [segment_lo, segment_hi], ascending. Immutable once built.
struct PrimeTable {
  std::uint64_t segment_lo = 2;
  std::uint64_t segment_hi = 2;
  std::vector<std::uint64_t> primes;

  /// Number of listed primes <= x.
  std::size_t count_upto(std::uint64_t x) const;
  /// Index of the first listed prime > x (primes.size() if none).
  std::size_t first_above(std::uint64_t x) const;
};

struct GapReport {
  std::vector<std::uint64_t> x_grid;
  std::vector<std::uint64_t> gap_at_x;       ///< next_prime(x) - x
  std::vector<std::uint64_t> window_counts;  ///< pi(x + ceil(x^theta)) - pi(x)
  Rational theta;
};

inline constexpr std::uint64_t kDefaultCap = 1'000'000'000ULL;
inline constexpr std::size_t kSegmentSize = std::size_t{1} << 20;

/// Sieve cap from HELSON_CAP, defaulting to kDefaultCap.
std::uint64_t configured_cap();

/// Primes in [lo, hi] by a segmented sieve with 2^20-element segments.
/// Throws ArgumentError when lo < 2 or lo > hi, ResourceError when hi > cap.
PrimeTable sieve_range(std::uint64_t lo, std::uint64_t hi, std::uint64_t cap = configured_cap());

/// pi(x + ceil(x^theta)) - pi(x).
std::uint64_t count_window(std::uint64_t x, Rational theta, std::uint64_t cap = configured_cap());

/// Same count, read from a table that covers (x, x + ceil(x^theta)].
std::uint64_t count_window(const PrimeTable& table, std::uint64_t x, Rational theta);

/// ceil(x^theta) computed in double, as used for every block length.
std::uint64_t window_length(std::uint64_t x, Rational theta);

/// Largest gap p' - p between consecutive primes p < p' <= X.
std::uint64_t max_gap_below(std::uint64_t X, std::uint64_t cap = configured_cap());

/// Smallest prime strictly greater than x.
std::uint64_t next_prime(std::uint64_t x);

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(std::uint64_t n);

/// Gap and window scan on `points` log-spaced x values in [x_min, x_max].
GapReport gap_scan(std::uint64_t x_min, std::uint64_t x_max, std::size_t points, Rational theta,
                   std::uint64_t cap = configured_cap());

/// min over the scan of window_count * log x / x^theta (the empirical constant).
double normalized_window_minimum(const GapReport& report);

}  // namespace helson::primes
