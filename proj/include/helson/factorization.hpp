#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "helson/continuation.hpp"
#include "helson/multisets.hpp"

namespace helson::factorization {

using cplx = std::complex<double>;

/// Half-plane Blaschke factor for Re s > alpha vanishing at rho, normalized to be positive at s = 1 + alpha.
struct BlaschkeAtom {
  cplx rho;
  double alpha = 0.5;
};

/// (s - rho)/(s - 2 alpha + conj rho) * (1 - alpha + conj rho)/(1 + alpha - rho) * |(1 + alpha - rho)/(1 - alpha + conj rho)|.
/// Throws ArgumentError for Re rho <= alpha or rho = 1 + alpha, PoleError at s = 2 alpha - conj rho.
cplx atom_eval(const BlaschkeAtom& atom, cplx s);

/// Counting bound N(alpha, T) <= C_c T^{(alpha_c - alpha)/(alpha_c + alpha - 1)} used to bound the sum beyond the data.
struct DensityModel {
  double C_c = 1.0;
  double alpha_c = 0.73;
};

struct BlaschkeReport {
  double finite_sum = 0.0;
  std::optional<double> tail;           ///< bound on the sum over |gamma| > T_max, from the density model
  std::vector<double> partial_sums;     ///< after each point in stored order
  bool diverging = false;               ///< the second half of the points adds at least as much as the first half
  bool passed() const { return !diverging; }
};

/// sum |m| (beta - alpha)/(1 + gamma^2). Points must satisfy beta > alpha.
BlaschkeReport blaschke_condition(const multisets::SignedMultiset& Z, double alpha,
                                  const std::optional<DensityModel>& model = std::nullopt);

/// Product over |gamma| <= trunc_T of atoms raised to their multiplicities, with (s-1-alpha)/(s+1-alpha) for a point
/// at 1 + alpha, evaluated as the exponential of summed principal logarithms. tail_bound covers the excluded data
/// points exactly and, with a density model, the unseen points beyond the data.
continuation::ContinuedValue blaschke_product(const multisets::SignedMultiset& Z, double alpha, cplx s, double trunc_T,
                                              const std::optional<DensityModel>& model = std::nullopt);

/// Samples of log|h(alpha + i x)| on increasing x, with decay log|h| ~ A |x|^{-decay} assumed past both ends.
struct BoundaryData {
  double alpha = 0.5;
  std::vector<double> x;
  std::vector<double> log_modulus;
  double decay = 2.0;
};

/// Symmetric geometric grid: -hi ... -lo, 0, lo ... hi with per_decade points per decade.
std::vector<double> geometric_grid(double lo, double hi, int per_decade);

/// exp((1/pi) int [1/(s - alpha - ix) - ix/(1 + x^2)] log|h(alpha + ix)| dx) by trapezoid over the samples plus the
/// analytic tails. Throws PrecisionError when the tails exceed 10% of the sampled integral.
cplx outer_eval(const BoundaryData& data, cplx s);

}  // namespace helson::factorization
