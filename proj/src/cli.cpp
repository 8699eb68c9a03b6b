#include "helson/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <sstream>

#include "helson/continuation.hpp"
#include "helson/error.hpp"
#include "helson/meansquare.hpp"
#include "helson/parallel.hpp"

namespace helson::cli {

namespace fs = std::filesystem;
using construct::cplx;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw FormatError("config key " + key + ": not an integer: " + v);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    return io::parse_double(v);
  } catch (const FormatError&) {
    throw FormatError("config key " + key + ": not a number: " + v);
  }
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (v.empty()) return out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) out.push_back(to_double(key, trim(item)));
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + io::num(v[i]);
  return out;
}

std::string resolve(const RunConfig& c, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? path : (fs::path(c.base_dir) / p).string();
}

construct::ChiMode chi_mode(const RunConfig& c) {
  construct::ChiMode m;
  m.kind = c.theorem == Theorem::main3 ? construct::ChiMode::Kind::thm_main3 : construct::ChiMode::Kind::thm_main;
  m.alpha = c.alpha;
  m.lambda = c.lambda;
  m.kappa = c.kappa;
  m.C = c.C3;
  m.C_b = c.C_b;
  m.C_c = c.C_c;
  m.gate_eps = c.gate_eps;
  m.theta = {c.theta_num, c.theta_den};
  return m;
}

multisets::ZerosMode zeros_mode(const RunConfig& c) {
  return c.rh ? multisets::ZerosMode::rh : multisets::ZerosMode::unconditional;
}

CheckRecord gate_record(const RunConfig& c, const multisets::SignedMultiset& Z) {
  CheckRecord r{"gate", "", true, 0.0, 0.0};
  if (c.theorem == Theorem::pnu) {
    const double nu_max = static_cast<double>(2 * c.theta_den - c.theta_num) / static_cast<double>(2 * c.theta_den);
    r.anchor = "nu in (1/2, (2 - theta)/2]";
    r.measured = c.nu;
    r.threshold = nu_max;
    r.passed = c.nu > 0.5 && c.nu <= nu_max && c.m > 0;
    return r;
  }
  multisets::DensityReport d;
  switch (c.theorem) {
    case Theorem::main:
      d = multisets::gate_thm_main(Z, c.alpha, c.C_b, c.C_c, c.gate_eps);
      r.anchor = "density conditions of the unconditional construction";
      break;
    case Theorem::main3:
      d = multisets::gate_thm_main3(Z, c.lambda, c.kappa, c.C3);
      r.anchor = "density conditions of the short-gap construction";
      break;
    default:
      d = multisets::gate_thm_nonuniversal(Z, zeros_mode(c));
      r.anchor = "zeros-only admissibility";
      break;
  }
  r.passed = d.passed();
  r.measured = std::numeric_limits<double>::infinity();
  for (const auto& ch : d.checks) r.measured = std::min(r.measured, ch.margin);
  if (d.checks.empty()) r.measured = 0.0;
  return r;
}

class Stages {
 public:
  explicit Stages(std::string dir) : dir_(std::move(dir)) {}

  std::string write(const std::string& name, const std::string& text) {
    const auto path = (fs::path(dir_) / name).string();
    io::write_file(path, text);
    written_.push_back(path);
    return path;
  }

  template <class F>
  auto run(const std::string& stage, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const Error& e) {
      std::string msg = "stage " + stage + " failed: " + e.what() + "; completed artifacts:";
      if (written_.empty()) msg += " none";
      for (const auto& w : written_) msg += " " + w;
      throw Error(e.kind(), msg);
    }
  }

 private:
  std::string dir_;
  std::vector<std::string> written_;
};

// short form for record ids and anchors; measured values keep 17 digits
std::string label(double v) {
  std::ostringstream o;
  o << v;
  return o.str();
}

double contour_radius(const RunConfig& c, cplx rho, const std::vector<cplx>& others) {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& o : others)
    if (o != rho) gap = std::min(gap, std::abs(o - rho));
  return std::min({c.radius, gap / 2.5, (rho.real() - 0.5) / 2.0});
}

}  // namespace

std::string theorem_name(Theorem t) {
  switch (t) {
    case Theorem::pnu: return "pnu";
    case Theorem::main: return "main";
    case Theorem::main3: return "main3";
    case Theorem::zeros: return "zeros";
  }
  return "unknown";
}

Theorem parse_theorem(const std::string& s) {
  if (s == "pnu") return Theorem::pnu;
  if (s == "main") return Theorem::main;
  if (s == "main3") return Theorem::main3;
  if (s == "zeros") return Theorem::zeros;
  throw FormatError("unknown theorem: " + s + " (pnu, main, main3, zeros)");
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("config line " + std::to_string(lineno) + " has no '='");
    const std::string k = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (seen[k]++) throw FormatError("config key repeated: " + k);
    if (k == "theorem") c.theorem = parse_theorem(v);
    else if (k == "multiset") c.multiset = v;
    else if (k == "nu") c.nu = to_double(k, v);
    else if (k == "m") c.m = to_int<int>(k, v);
    else if (k == "theta_num") c.theta_num = to_int<std::int64_t>(k, v);
    else if (k == "theta_den") c.theta_den = to_int<std::int64_t>(k, v);
    else if (k == "alpha") c.alpha = to_double(k, v);
    else if (k == "lambda") c.lambda = to_double(k, v);
    else if (k == "kappa") c.kappa = to_double(k, v);
    else if (k == "C3") c.C3 = to_double(k, v);
    else if (k == "C_b") c.C_b = to_double(k, v);
    else if (k == "C_c") c.C_c = to_double(k, v);
    else if (k == "gate_eps") c.gate_eps = to_double(k, v);
    else if (k == "rh") c.rh = to_int<int>(k, v) != 0;
    else if (k == "beta_gap") c.beta_gap = to_double(k, v);
    else if (k == "X_max") c.X_max = to_double(k, v);
    else if (k == "seed") c.seed = to_int<std::uint64_t>(k, v);
    else if (k == "T") c.T = to_list(k, v);
    else if (k == "sigma") c.sigma = to_list(k, v);
    else if (k == "x_cut") c.x_cut = to_double(k, v);
    else if (k == "radius") c.radius = to_double(k, v);
    else if (k == "nodes") c.nodes = to_int<int>(k, v);
    else if (k == "out_dir") c.out_dir = v;
    else throw FormatError("unknown config key: " + k);
  }
  return c;
}

std::string format_config(const RunConfig& c) {
  std::ostringstream o;
  o << "theorem = " << theorem_name(c.theorem) << "\n"
    << "multiset = " << c.multiset << "\n"
    << "nu = " << io::num(c.nu) << "\n"
    << "m = " << c.m << "\n"
    << "theta_num = " << c.theta_num << "\n"
    << "theta_den = " << c.theta_den << "\n"
    << "alpha = " << io::num(c.alpha) << "\n"
    << "lambda = " << io::num(c.lambda) << "\n"
    << "kappa = " << io::num(c.kappa) << "\n"
    << "C3 = " << io::num(c.C3) << "\n"
    << "C_b = " << io::num(c.C_b) << "\n"
    << "C_c = " << io::num(c.C_c) << "\n"
    << "gate_eps = " << io::num(c.gate_eps) << "\n"
    << "rh = " << (c.rh ? 1 : 0) << "\n"
    << "beta_gap = " << io::num(c.beta_gap) << "\n"
    << "X_max = " << io::num(c.X_max) << "\n"
    << "seed = " << c.seed << "\n"
    << "T = " << list_text(c.T) << "\n"
    << "sigma = " << list_text(c.sigma) << "\n"
    << "x_cut = " << io::num(c.x_cut) << "\n"
    << "radius = " << io::num(c.radius) << "\n"
    << "nodes = " << c.nodes << "\n"
    << "out_dir = " << c.out_dir << "\n";
  return o.str();
}

multisets::SignedMultiset config_multiset(const RunConfig& c) {
  if (c.multiset.empty()) return {};
  return io::parse_multiset(io::read_file(resolve(c, c.multiset)));
}

void validate_config(const RunConfig& c) {
  if (!(c.X_max >= 2)) throw ArgumentError("X_max must be at least 2");
  if (c.theta_num <= 0 || c.theta_den <= 0 || c.theta_num > c.theta_den) throw ArgumentError("theta must lie in (0, 1]");
  if (!(c.radius > 0) || c.nodes < 8) throw ArgumentError("contour needs radius > 0 and at least 8 nodes");
  for (double s : c.sigma)
    if (!(s > 0.5)) throw ArgumentError("mean-square sigma must exceed 1/2");
  for (double t : c.T)
    if (!(t > 0)) throw ArgumentError("mean-square T must be positive");
  if (!(c.x_cut >= 2 && c.x_cut <= c.X_max)) throw ArgumentError("x_cut must lie in [2, X_max]");
  const auto Z = config_multiset(c);
  if (c.theorem == Theorem::pnu && !Z.empty()) throw ArgumentError("pnu runs take no multiset");
  const auto g = gate_record(c, Z);
  if (!g.passed) throw ArgumentError("parameter gate rejects the configuration: " + g.anchor);
}

RunConfig load_config(const std::string& path) {
  const auto dir = fs::path(path).parent_path();
  auto c = parse_config(io::read_file(path), dir.empty() ? "." : dir.string());
  validate_config(c);
  return c;
}

construct::BuildResult build_from_config(const RunConfig& c) {
  const auto Z = config_multiset(c);
  switch (c.theorem) {
    case Theorem::pnu: return construct::build_p_nu(c.nu, c.m, {c.theta_num, c.theta_den}, c.X_max);
    case Theorem::main:
    case Theorem::main3: return construct::build_p_chi(Z, chi_mode(c), c.X_max);
    case Theorem::zeros: {
      const auto a = multisets::assign_dyadic(Z, c.beta_gap, zeros_mode(c));
      return construct::build_zeros_only(Z, a, zeros_mode(c), c.X_max);
    }
  }
  throw ArgumentError("unknown theorem");
}

bool VerificationReport::passed() const {
  return std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.passed; });
}

std::string format_report(const VerificationReport& r) {
  std::ostringstream o;
  o << "report: helson-verification v1\n"
    << "overall: " << (r.passed() ? "pass" : "fail") << "\n"
    << "checks: " << r.records.size() << "\n";
  for (const auto& c : r.records) {
    o << c.id << ".anchor: " << c.anchor << "\n"
      << c.id << ".result: " << (c.passed ? "pass" : "fail") << "\n"
      << c.id << ".measured: " << io::num(c.measured) << "\n"
      << c.id << ".threshold: " << io::num(c.threshold) << "\n";
  }
  return o.str();
}

VerificationReport parse_report(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<std::string, std::string>> kv;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto colon = line.find(": ");
    if (colon == std::string::npos) throw FormatError("report line without ': '");
    kv.emplace_back(line.substr(0, colon), line.substr(colon + 2));
  }
  if (kv.size() < 3 || kv[0] != std::pair<std::string, std::string>{"report", "helson-verification v1"} ||
      kv[1].first != "overall" || kv[2].first != "checks")
    throw FormatError("not a verification report");
  const auto n = to_int<std::size_t>("checks", kv[2].second);
  if (kv.size() != 3 + 4 * n) throw FormatError("report has the wrong number of lines");
  VerificationReport r;
  for (std::size_t i = 0; i < n; ++i) {
    const auto* b = &kv[3 + 4 * i];
    const auto suffix = std::string(".anchor");
    if (b[0].first.size() <= suffix.size() || b[0].first.compare(b[0].first.size() - suffix.size(), suffix.size(), suffix))
      throw FormatError("report record does not start with an anchor");
    CheckRecord c;
    c.id = b[0].first.substr(0, b[0].first.size() - suffix.size());
    c.anchor = b[0].second;
    if (b[1].first != c.id + ".result" || b[2].first != c.id + ".measured" || b[3].first != c.id + ".threshold")
      throw FormatError("report record " + c.id + " is incomplete");
    if (b[1].second != "pass" && b[1].second != "fail") throw FormatError("report result must be pass or fail");
    c.passed = b[1].second == "pass";
    c.measured = io::parse_double(b[2].second);
    c.threshold = io::parse_double(b[3].second);
    r.records.push_back(c);
  }
  if (kv[1].second != (r.passed() ? "pass" : "fail")) throw FormatError("report overall verdict disagrees with its records");
  return r;
}

VerificationReport replay_ledger(const construct::EulerSupport& support, const construct::ConstructionLedger& ledger) {
  VerificationReport rep;
  const auto fresh = construct::replay(support);
  rep.records.push_back({"replay.rows", "ledger has one row per block boundary", fresh.blocks.size() == ledger.blocks.size(),
                         static_cast<double>(ledger.blocks.size()), static_cast<double>(fresh.blocks.size())});
  const std::size_t n = std::min(fresh.blocks.size(), ledger.blocks.size());
  double worst_dev = 0.0, worst_tol = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = fresh.blocks[i];
    const auto& b = ledger.blocks[i];
    const double scale = std::max(1.0, std::abs(a.target) + std::abs(a.achieved));
    const double dev = std::max({std::abs(a.achieved - b.achieved), std::abs(a.target - b.target),
                                 std::abs(b.residual - (b.achieved - b.target))}) / scale;
    const bool row_ok = a.k == b.k && a.x_k == b.x_k && a.primes_used == b.primes_used && dev <= 1e-12;
    worst_dev = std::max(worst_dev, dev);
    const double tol = std::abs(b.residual) / std::log(b.x_k);
    worst_tol = std::max(worst_tol, tol);
    if (!row_ok)
      rep.records.push_back({"replay.block." + std::to_string(b.k), "stored row matches the recomputed row", false, dev, 1e-12});
    if (tol > support.C_led * (1.0 + 1e-12))
      rep.records.push_back({"replay.tolerance." + std::to_string(b.k), "|residual| <= C_led log x_k", false, tol, support.C_led});
  }
  rep.records.push_back({"replay.rows_match", "every row recomputes from the support", worst_dev <= 1e-12, worst_dev, 1e-12});
  rep.records.push_back({"replay.tolerance", "max |residual| / log x_k against C_led", worst_tol <= support.C_led * (1.0 + 1e-12),
                         worst_tol, support.C_led});
  return rep;
}

VerificationReport replay_ledger(const std::string& support_path, const std::string& ledger_path) {
  return replay_ledger(io::parse_support(io::read_file(support_path)), io::parse_ledger(io::read_file(ledger_path)));
}

std::vector<io::ValueRow> export_grid(const construct::EulerSupport& support, const GridRegion& region, int n_sigma,
                                      int n_t) {
  if (n_sigma < 1 || n_t < 1) throw ArgumentError("grid resolution must be positive");
  if (!(region.sigma_lo > 0.5) || region.sigma_hi < region.sigma_lo || region.t_hi < region.t_lo)
    throw ArgumentError("grid region must lie in Re s > 1/2 with lo <= hi");
  const continuation::ErrorProfile E(support);
  auto at = [](double lo, double hi, int n, int i) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); };
  std::vector<io::ValueRow> rows(static_cast<std::size_t>(n_sigma) * static_cast<std::size_t>(n_t));
  parallel_for(rows.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx / static_cast<std::size_t>(n_t));
    const int j = static_cast<int>(idx % static_cast<std::size_t>(n_t));
    auto& r = rows[idx];
    r.sigma = at(region.sigma_lo, region.sigma_hi, n_sigma, i);
    r.t = at(region.t_lo, region.t_hi, n_t, j);
    try {
      const auto v = continuation::log_zeta_chi(E, {r.sigma, r.t});
      r.value = v.value;
      r.tail_bound = v.tail_bound;
    } catch (const PrecisionError&) {
      r.value = {std::nan(""), std::nan("")};
      r.tail_bound = std::numeric_limits<double>::infinity();
    } catch (const PoleError&) {
      r.value = {std::nan(""), std::nan("")};
      r.tail_bound = std::numeric_limits<double>::infinity();
    }
  });
  return rows;
}

VerificationReport run_pipeline(const RunConfig& config) {
  const auto dir = resolve(config, config.out_dir);
  try {
    fs::create_directories(dir);
  } catch (const fs::filesystem_error& e) {
    throw ResourceError("cannot create output directory " + dir + ": " + e.what());
  }
  Stages st(dir);
  VerificationReport rep;

  const auto Z = st.run("gate", [&] {
    validate_config(config);
    auto z = config_multiset(config);
    rep.records.push_back(gate_record(config, z));
    st.write("config.txt", format_config(config));
    st.write("multiset.csv", io::format_multiset(z));
    return z;
  });

  const auto build = st.run("construct", [&] {
    auto b = build_from_config(config);
    st.write("support.txt", io::format_support(b.support));
    st.write("ledger.csv", io::format_ledger(b.ledger));
    double worst = 0.0;
    for (const auto& row : b.ledger.blocks) worst = std::max(worst, std::abs(row.residual) / std::log(row.x_k));
    rep.records.push_back({"ledger.carry", "max |residual_k| / log x_k", worst <= construct::kCarryLimit, worst,
                           construct::kCarryLimit});
    if (config.theorem == Theorem::pnu)
      rep.records.push_back({"ledger.separation", "min (p' - p) p^{nu - 1} over consecutive support primes",
                             b.support.c_sep > 0.0, b.support.c_sep, 0.0});
    return b;
  });

  const continuation::ErrorProfile E(build.support);

  st.run("residues", [&] {
    std::vector<cplx> others;
    for (const auto& t : build.support.q.terms) others.push_back(t.rho);
    std::string csv = "beta,gamma,mult,radius,winding\n";
    int i = 0;
    for (const auto& p : Z.points()) {
      ++i;
      const cplx rho = p.rho();
      const continuation::Contour c{rho, contour_radius(config, rho, others), config.nodes};
      continuation::validate_contour(c, others);
      const double w = continuation::winding_number([&](cplx s) { return continuation::dprime_continued(E, s); }, c);
      csv += io::num(p.beta) + "," + io::num(p.gamma) + "," + std::to_string(p.mult) + "," + io::num(c.radius) + "," +
             io::num(w) + "\n";
      rep.records.push_back({"winding." + std::to_string(i),
                             "winding around " + label(p.beta) + (p.gamma < 0 ? "" : "+") + label(p.gamma) +
                                 "i equals multiplicity " + std::to_string(p.mult),
                             std::abs(w - p.mult) <= 0.05, w, 0.05});
    }
    st.write("windings.csv", csv);
  });

  st.run("replay", [&] {
    for (auto& r : replay_ledger(build.support, build.ledger).records) rep.records.push_back(std::move(r));
  });

  st.run("meansquare", [&] {
    if (build.support.q.terms.empty() || config.sigma.empty() || config.T.empty()) return;
    std::string csv = "sigma,x_cut,T,samples,empirical,target,ratio,remainder\n";
    for (double sigma : config.sigma) {
      std::vector<double> devs;
      for (double T : config.T) {
        const auto m = meansquare::approx_meansquare(E, sigma, config.x_cut, T);
        csv += io::num(m.sigma) + "," + io::num(m.x_cut) + "," + io::num(m.T) + "," + std::to_string(m.samples) + "," +
               io::num(m.empirical) + "," + io::num(m.target) + "," + io::num(m.ratio) + "," + io::num(m.remainder) + "\n";
        rep.records.push_back({"meansquare.sigma=" + label(sigma) + ".T=" + label(T),
                               "empirical / target in [1/2, 2]", m.ratio >= 0.5 && m.ratio <= 2.0, m.ratio, 2.0});
        devs.push_back(std::abs(m.ratio - 1.0));
      }
      double rise = 0.0;
      for (std::size_t k = 1; k < devs.size(); ++k) rise = std::max(rise, devs[k] - devs[k - 1]);
      rep.records.push_back({"meansquare.sigma=" + label(sigma) + ".trend",
                             "largest increase of |ratio - 1| along increasing T", rise <= 0.0, rise, 0.0});
    }
    st.write("meansquare.csv", csv);
  });

  st.write("report.txt", format_report(rep));
  return rep;
}

int exit_code(const std::exception& e) {
  if (const auto* h = dynamic_cast<const Error*>(&e)) {
    switch (h->kind()) {
      case ErrorKind::argument:
      case ErrorKind::format: return 2;
      case ErrorKind::resource:
      case ErrorKind::precision:
      case ErrorKind::pole: return 3;
      case ErrorKind::construction:
      case ErrorKind::inconclusive: return 1;
    }
  }
  return 3;
}

}  // namespace helson::cli
