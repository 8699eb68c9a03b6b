#pragma once

#include <cstdint>
#include <exception>
#include <string>
#include <vector>

#include "helson/construct.hpp"
#include "helson/io.hpp"
#include "helson/multisets.hpp"

namespace helson::cli {

enum class Theorem { pnu, main, main3, zeros };

std::string theorem_name(Theorem t);
Theorem parse_theorem(const std::string& s);

/// `key = value` lines, `#` comments. Unknown or repeated keys are FormatErrors.
struct RunConfig {
  Theorem theorem = Theorem::main;
  std::string multiset;  ///< path, relative to the config file; empty means no points
  double nu = 0.7;
  int m = 1;
  std::int64_t theta_num = 21;
  std::int64_t theta_den = 40;
  double alpha = 0.73;
  double lambda = 0.0;
  double kappa = 0.0;
  double C3 = 1.0;        ///< counting constant of the main3 gate
  double C_b = 10.0;
  double C_c = 10.0;
  double gate_eps = 0.5;
  bool rh = false;        ///< zeros-only mode
  double beta_gap = 0.0;  ///< zeros-only pairing budget; 0 selects the default
  double X_max = 1e6;
  std::uint64_t seed = 1;
  std::vector<double> T{1000.0, 2000.0, 4000.0};
  std::vector<double> sigma{0.8};  ///< empty skips the mean-square suite
  double x_cut = 1e3;
  double radius = 0.02;
  int nodes = 1024;
  std::string out_dir = "out";
  std::string base_dir = ".";  ///< where relative paths resolve; not serialized
};

RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
std::string format_config(const RunConfig& c);
/// Reads, parses and re-validates the parameter gates against the multiset. Gate failure is an ArgumentError.
RunConfig load_config(const std::string& path);
void validate_config(const RunConfig& c);

multisets::SignedMultiset config_multiset(const RunConfig& c);
construct::BuildResult build_from_config(const RunConfig& c);

struct CheckRecord {
  std::string id;
  std::string anchor;  ///< what was checked, in words
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
};

struct VerificationReport {
  std::vector<CheckRecord> records;
  bool passed() const;
};

/// Flat `key: value` lines in record order.
std::string format_report(const VerificationReport& r);
VerificationReport parse_report(const std::string& text);

/// gate, construct, residues, replay, mean square; every artifact lands in out_dir. A failing stage
/// rethrows with the stage name and the artifacts already written.
VerificationReport run_pipeline(const RunConfig& config);

struct GridRegion {
  double sigma_lo = 0.6;
  double sigma_hi = 1.0;
  double t_lo = 0.0;
  double t_hi = 1.0;
};

/// log zeta_chi on an n_sigma x n_t grid, sigma-major. Points that cannot be evaluated come back as flagged rows.
std::vector<io::ValueRow> export_grid(const construct::EulerSupport& support, const GridRegion& region, int n_sigma,
                                      int n_t);

/// Recomputes every ledger row from the support and checks it against the stored ledger.
VerificationReport replay_ledger(const construct::EulerSupport& support, const construct::ConstructionLedger& ledger);
VerificationReport replay_ledger(const std::string& support_path, const std::string& ledger_path);

/// 2 usage/config, 3 resource/precision, 1 anything else that stops a verification.
int exit_code(const std::exception& e);

}  // namespace helson::cli
