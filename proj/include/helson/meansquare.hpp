#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "helson/continuation.hpp"
#include "helson/multisets.hpp"

namespace helson::meansquare {

using cplx = std::complex<double>;

struct MeanSquareResult {
  double sigma = 0.0;
  double x_cut = 0.0;
  double T = 0.0;
  std::size_t samples = 0;
  double empirical = 0.0;  ///< (1/2T) times the trapezoid integral over [-T, T]
  double target = 0.0;
  double ratio = 0.0;      ///< empirical / target, 0 when the target is 0
  /// Bound on |empirical - target| (dirichlet_meansquare) or on the mean square of what the evaluator omits
  /// (approx_meansquare); 0 where not applicable.
  double remainder = 0.0;
};

/// One term a * n^{-s}.
struct Term {
  double n = 1.0;
  cplx a = 1.0;
};

/// Largest step that keeps the fastest phasor n^{-it} below the Nyquist limit.
double nyquist_step(double n_max);

/// S(t_k) = sum b_j e^{-i t_k w_j} at t_k = t0 + k dt, by one complex multiply per term per step. The phasors are
/// recomputed from scratch every 2^16 steps.
std::vector<cplx> phasor_series(const std::vector<double>& freqs, const std::vector<cplx>& b, double t0, double dt,
                                std::size_t count);

/// Trapezoid samples t_k = -T + k h covering [-T, T] with h <= dt.
struct Grid {
  double h = 0.0;
  std::size_t count = 0;
};
Grid symmetric_grid(double T, double dt);

/// (1/2T) int_{-T}^{T} |sum a n^{-sigma-it}|^2 dt. target = sum |a|^2 n^{-2 sigma}; remainder is the
/// Montgomery-Vaughan error 3 pi sum |a|^2 n^{-2 sigma} / delta_n plus the trapezoid error, both over 2T, where
/// delta_n is the distance from log n to the nearest other log n'.
MeanSquareResult dirichlet_meansquare(const std::vector<Term>& terms, double sigma, double T, double dt);

/// Mean square over t in [-T, T] of D(sigma+it) - sum_{p <= x_cut} chi(p) p^{-sigma-it}, using the continuation.
/// target = sum over support primes in (x_cut, X_end] of p^{-2 sigma}. remainder estimates the mean square of the
/// part beyond X_end the continuation replaces by its law; a PrecisionError is raised when it exceeds 10% of the
/// target. dt <= 0 selects half the Nyquist step.
MeanSquareResult approx_meansquare(const continuation::ErrorProfile& E, double sigma, double x_cut, double T,
                                   double dt = 0.0);

/// Independent uniform angles in (-pi, pi] for the listed primes, drawn in order from SplitMix64(seed).
struct SteinhausTail {
  std::uint64_t seed = 0;
  std::vector<std::pair<std::uint64_t, double>> entries;
};
SteinhausTail sample_steinhaus(std::uint64_t seed, const std::vector<std::uint64_t>& primes);

/// sum_{p > x} sum_{j >= 1} j^{-2} p^{-2 j sigma}.
double steinhaus_target(const std::vector<std::uint64_t>& primes, double sigma, double x_cut);

/// Mean square of log of the sampled Euler product over primes > x_cut, against steinhaus_target.
MeanSquareResult steinhaus_tail(std::uint64_t seed, const std::vector<std::uint64_t>& primes, double sigma,
                                double x_cut, double T);

struct BohrLandauRow {
  double sigma = 0.0;
  double slope = 0.0;       ///< sup over data heights T >= 1 of N(sigma, T) / T
  double at_T = 0.0;        ///< height attaining the sup
  double final_slope = 0.0; ///< N(sigma, T_max) / T_max at the largest data height
  bool flagged = false;     ///< final_slope >= threshold: the data shows no sign of o(T) growth
};

std::vector<BohrLandauRow> bohr_landau_diag(const multisets::SignedMultiset& Z, const std::vector<double>& sigmas,
                                            double threshold = 0.25);

struct TargetSample {
  cplx s;
  cplx value;
};

struct SearchResult {
  double best_tau = 0.0;
  double best_distance = 0.0;
  std::vector<double> trace;  ///< best distance after each evaluation
};

/// max over the grid of |log P(s + i tau) - log f(s) - 2 pi i n|, with P the finite Euler product over
/// (p, angle) and n the integer closest to aligning the first sample.
double translate_distance(const std::vector<std::pair<std::uint64_t, double>>& support,
                          const std::vector<TargetSample>& target, double tau);

/// Budgeted search over tau in [tau_lo, tau_hi]: tau = 0 (or tau_lo) first, then dyadic refinement levels, each
/// followed by golden-section steps around the best point. The evaluation sequence does not depend on the budget,
/// so a larger budget never does worse.
SearchResult translate_search(const std::vector<std::pair<std::uint64_t, double>>& support,
                              const std::vector<TargetSample>& target, double tau_lo, double tau_hi,
                              std::size_t budget);

}  // namespace helson::meansquare
