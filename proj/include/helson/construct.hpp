#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "helson/multisets.hpp"
#include "helson/primes.hpp"

namespace helson::construct {

using cplx = std::complex<double>;

enum class Mode { Pnu, PChi, ZerosOnly };

std::string mode_name(Mode m);
Mode parse_mode(const std::string& s);

/// One summand mult * x^{rho-1}, switched on for x >= cutoff.
struct QTerm {
  cplx rho;
  int mult = 0;
  double cutoff = 1.0;
};

struct QFunction {
  Mode mode = Mode::PChi;
  std::vector<QTerm> terms;
  /// Set when the terms come in conjugate pairs; q and its integral are then returned as reals.
  bool real_valued = false;
};

cplx q_eval(const QFunction& q, double x);
/// Closed form of the integral of q over [1, x].
cplx q_integral(const QFunction& q, double x);
/// Total variation bound of the integral of q over [a, b]: sum |m| (b^beta - a^beta)/beta over active terms.
double q_variation(const QFunction& q, double a, double b);

/// Block-length rule. `Power` is x + ceil(x^theta); `Cramer` is x + ceil(C (log x)^{2+eps});
/// `SqrtLog` is x + ceil(2 sqrt(x) log x).
enum class Schedule { Power, Cramer, SqrtLog };

struct Params {
  double nu = 0.0;
  int m = 0;
  primes::Rational theta{21, 40};
  double alpha = 0.0;
  double lambda = 0.0;
  double kappa = 0.0;
  double block_C = 1.0;
  double eps = 0.0;
  Schedule schedule = Schedule::Power;
  bool rh = false;
  double separation_floor = 0.0;
};

std::uint64_t next_boundary(std::uint64_t x, const Params& p);

struct SupportEntry {
  std::uint64_t p = 0;
  double angle = 0.0;
  int block = 0;
};

/// Selected primes with their character angles, plus everything needed to rebuild q.
struct EulerSupport {
  Mode mode = Mode::PChi;
  Params params;
  QFunction q;
  std::vector<SupportEntry> entries;
  double c_sep = 0.0;
  double C_led = 0.0;
  double growth_exponent = 0.0;
  double growth_constant = 0.0;
  double X_end = 2.0;

  /// chi(p) as a complex unit; angles 0 and pi map to exactly +1 and -1.
  static cplx unit(double angle);
};

struct LedgerRow {
  int k = 0;
  double x_k = 0.0;
  cplx target;
  cplx achieved;
  cplx residual;  ///< achieved - target
  std::uint64_t primes_used = 0;
};

struct ConstructionLedger {
  std::vector<LedgerRow> blocks;
  bool complex_valued = false;
};

struct BuildResult {
  EulerSupport support;
  ConstructionLedger ledger;
};

/// Largest |residual| allowed to carry into the next block, in units of log x.
inline constexpr double kCarryLimit = 3.0;

BuildResult build_p_nu(double nu, int m, primes::Rational theta, double X_max);

struct ChiMode {
  enum class Kind { thm_main, thm_main3 } kind = Kind::thm_main;
  double alpha = 0.0;
  double lambda = 0.0;
  double kappa = 0.0;
  double C = 1.0;
  double eps = -1.0;  ///< negative selects min(0.5, (lambda - kappa)/2)
  /// Gate constants for conditions (b), (c).
  double C_b = 10.0;
  double C_c = 10.0;
  double gate_eps = 0.5;
  double block_C = 1.0;
  double separation_floor = 0.0;
  primes::Rational theta{21, 40};
};

BuildResult build_p_chi(const multisets::SignedMultiset& Z, const ChiMode& mode, double X_max,
                        const EulerSupport* base = nullptr);

BuildResult build_zeros_only(const multisets::SignedMultiset& Zplus, const multisets::DyadicAssignment& assignment,
                             multisets::ZerosMode mode, double X_max);

/// psi_chi(x) = sum over support primes p <= x of chi(p) log p.
cplx psi_chi(const EulerSupport& s, double x);

/// sup over [x_from, X_end] of |E(x)| / x^g with E = Q + psi_chi, using per-interval variation bounds.
double measure_growth_constant(const EulerSupport& s, double g, double x_from);

/// Left end X^{2/3} of the range over which the growth constant is measured.
double growth_window_start(double X_end);

/// Recompute the ledger from the support alone.
ConstructionLedger replay(const EulerSupport& s);

}  // namespace helson::construct
