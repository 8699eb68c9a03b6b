#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace helson::multisets {

struct Point {
  double beta = 0.0;
  double gamma = 0.0;
  int mult = 0;

  std::complex<double> rho() const { return {beta, gamma}; }
};

/// Prescribed zeros (mult > 0) and poles (mult < 0), stored sorted by |gamma| then beta.
class SignedMultiset {
 public:
  SignedMultiset() = default;
  /// Throws ArgumentError on beta <= 1/2, mult == 0, non-finite input or a repeated (beta, gamma).
  explicit SignedMultiset(std::vector<Point> points);

  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  /// True when every point has a partner at the conjugate location with equal multiplicity.
  bool conjugate_symmetric() const;

 private:
  std::vector<Point> points_;
};

enum class Condition { main_a, main_b, main_c, main3_a, main3_b, nonuniversal_i, nonuniversal_ii };

std::string condition_name(Condition c);

struct DensityCheck {
  Condition id;
  bool passed = true;
  std::optional<std::string> witness;
  /// Smallest slack (bound minus observed) over the tested cases; negative when failed.
  double margin = 0.0;
};

struct DensityReport {
  std::vector<DensityCheck> checks;
  bool passed() const;
};

/// N(sigma, T): sum of |mult| over points with beta > sigma and |gamma| <= T.
std::uint64_t counting(const SignedMultiset& Z, double sigma, double T);

/// Upper limit of alpha for the unconditional construction (theta = 21/40).
inline constexpr double kAlphaMax = 59.0 / 80.0;

DensityReport gate_thm_main(const SignedMultiset& Z, double alpha, double C_b, double C_c, double eps);
DensityReport gate_thm_main3(const SignedMultiset& Z, double lambda, double kappa, double C);

enum class ZerosMode { unconditional, rh };

DensityReport gate_thm_nonuniversal(const SignedMultiset& Zplus, ZerosMode mode);

enum class Region { U, V };

struct DyadicTag {
  Region region = Region::U;
  int j = 1;
  /// Real part of the paired point (same gamma); only meaningful for V points.
  double beta_prime = 0.0;
};

struct DyadicAssignment {
  ZerosMode mode = ZerosMode::unconditional;
  std::vector<DyadicTag> tags;  ///< parallel to Zplus.points()
  std::vector<double> delta;    ///< delta[j-1] for j = 1..delta.size(); 0 when V_j is empty
};

/// Region index pair for one point: U_j or V_j.
DyadicTag classify(const Point& p);

/// Dyadic partition and paired points. beta_gap_budget <= 0 selects the default 2^-j * delta_j.
DyadicAssignment assign_dyadic(const SignedMultiset& Zplus, double beta_gap_budget, ZerosMode mode);

struct SampleOptions {
  double C_c = 1.0;
  bool positive_only = false;
  double beta_floor = 0.5;
  double gamma_min = 1.0;
};

/// Deterministic fixture of n points in 1/2 < beta <= alpha, |gamma| <= Tmax that satisfies the
/// counting bound N(sigma, T) <= C_c T^{(alpha-sigma)/(alpha+sigma-1)}.
SignedMultiset sample_admissible(std::uint64_t seed, std::size_t n, double alpha, double Tmax,
                                 const SampleOptions& options = {});

}  // namespace helson::multisets
