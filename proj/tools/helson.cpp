#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include "helson/cli.hpp"
#include "helson/continuation.hpp"
#include "helson/error.hpp"
#include "helson/factorization.hpp"
#include "helson/io.hpp"
#include "helson/meansquare.hpp"
#include "helson/multisets.hpp"
#include "helson/primes.hpp"

using namespace helson;
using construct::cplx;

namespace {

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    io::write_file(out, text);
}

std::vector<double> numbers(const std::string& s, std::size_t want, const char* what) {
  std::vector<double> v;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) v.push_back(io::parse_double(item));
  if (want && v.size() != want) throw ArgumentError(std::string(what) + " needs " + std::to_string(want) + " comma-separated numbers");
  return v;
}

cplx point(const std::string& s) {
  const auto v = numbers(s, 2, "--at");
  return {v[0], v[1]};
}

std::string kv(const std::string& k, const std::string& v) { return k + ": " + v + "\n"; }

std::string density_text(const multisets::DensityReport& r) {
  std::string out = kv("passed", r.passed() ? "1" : "0");
  for (const auto& c : r.checks) {
    const auto n = multisets::condition_name(c.id);
    out += kv(n + ".passed", c.passed ? "1" : "0");
    out += kv(n + ".margin", io::num(c.margin));
    if (c.witness) out += kv(n + ".witness", *c.witness);
  }
  return out;
}

std::string meansquare_csv(const std::vector<meansquare::MeanSquareResult>& rows) {
  std::string csv = "sigma,x_cut,T,samples,empirical,target,ratio,remainder\n";
  for (const auto& m : rows)
    csv += io::num(m.sigma) + "," + io::num(m.x_cut) + "," + io::num(m.T) + "," + std::to_string(m.samples) + "," +
           io::num(m.empirical) + "," + io::num(m.target) + "," + io::num(m.ratio) + "," + io::num(m.remainder) + "\n";
  return csv;
}

struct Status {
  int code = 0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constructive numerics for Helson zeta functions"};
  app.require_subcommand(1);
  Status status;
  std::string out;

  // primes
  auto* primes_cmd = app.add_subcommand("primes", "Prime tables and gap scans");
  primes_cmd->require_subcommand(1);
  std::uint64_t lo = 2, hi = 100;
  auto* sieve = primes_cmd->add_subcommand("sieve", "Primes in [lo, hi]");
  sieve->add_option("--lo", lo)->required();
  sieve->add_option("--hi", hi)->required();
  sieve->add_option("--out", out);
  sieve->callback([&] { emit(out, io::format_primes(primes::sieve_range(lo, hi))); });

  std::uint64_t xmax = 1000000, xmin = 1000;
  std::int64_t theta_num = 21, theta_den = 40;
  std::size_t points = 64;
  auto* gapscan = primes_cmd->add_subcommand("gapscan", "Gaps and window counts on a log-spaced grid");
  gapscan->add_option("--xmax", xmax)->required();
  gapscan->add_option("--xmin", xmin);
  gapscan->add_option("--theta-num", theta_num);
  gapscan->add_option("--theta-den", theta_den);
  gapscan->add_option("--points", points);
  gapscan->add_option("--out", out);
  gapscan->callback([&] {
    const auto r = primes::gap_scan(xmin, xmax, points, {theta_num, theta_den});
    std::string csv = "# gaps theta=" + std::to_string(theta_num) + "/" + std::to_string(theta_den) + "\nx,gap,window_count\n";
    for (std::size_t i = 0; i < r.x_grid.size(); ++i)
      csv += std::to_string(r.x_grid[i]) + "," + std::to_string(r.gap_at_x[i]) + "," + std::to_string(r.window_counts[i]) + "\n";
    emit(out, csv);
    std::cerr << "normalized window minimum: " << io::num(primes::normalized_window_minimum(r)) << "\n";
  });

  // multiset
  auto* ms_cmd = app.add_subcommand("multiset", "Signed multisets: gates and fixtures");
  ms_cmd->require_subcommand(1);
  std::string file, theorem = "main";
  double alpha = 0.73, C_b = 10.0, C_c = 10.0, eps = 0.5, lambda = 0.0, kappa = 0.0, C3 = 1.0;
  bool rh = false;
  auto* gate = ms_cmd->add_subcommand("gate", "Density report for a multiset");
  gate->add_option("--file", file)->required();
  gate->add_option("--theorem", theorem)->check(CLI::IsMember({"main", "main3", "nonuniversal"}));
  gate->add_option("--alpha", alpha);
  gate->add_option("--C-b", C_b);
  gate->add_option("--C-c", C_c);
  gate->add_option("--eps", eps);
  gate->add_option("--lambda", lambda);
  gate->add_option("--kappa", kappa);
  gate->add_option("--C", C3);
  gate->add_flag("--rh", rh);
  gate->add_option("--out", out);
  gate->callback([&] {
    const auto Z = io::parse_multiset(io::read_file(file));
    multisets::DensityReport r;
    if (theorem == "main") r = multisets::gate_thm_main(Z, alpha, C_b, C_c, eps);
    else if (theorem == "main3") r = multisets::gate_thm_main3(Z, lambda, kappa, C3);
    else r = multisets::gate_thm_nonuniversal(Z, rh ? multisets::ZerosMode::rh : multisets::ZerosMode::unconditional);
    emit(out, density_text(r));
    if (!r.passed()) status.code = 1;
  });

  std::uint64_t seed = 1;
  std::size_t n_points = 10;
  double tmax = 100.0, beta_floor = 0.5, gamma_min = 1.0;
  bool positive_only = false;
  auto* sample = ms_cmd->add_subcommand("sample", "Deterministic admissible fixture");
  sample->add_option("--seed", seed);
  sample->add_option("--n", n_points);
  sample->add_option("--alpha", alpha);
  sample->add_option("--tmax", tmax);
  sample->add_option("--C-c", C_c);
  sample->add_option("--beta-floor", beta_floor);
  sample->add_option("--gamma-min", gamma_min);
  sample->add_flag("--positive-only", positive_only);
  sample->add_option("--out", out);
  sample->callback([&] {
    multisets::SampleOptions o;
    o.C_c = C_c;
    o.positive_only = positive_only;
    o.beta_floor = beta_floor;
    o.gamma_min = gamma_min;
    emit(out, io::format_multiset(multisets::sample_admissible(seed, n_points, alpha, tmax, o)));
  });

  // construct
  auto* con = app.add_subcommand("construct", "Build an Euler support and its ledger");
  con->require_subcommand(1);
  std::string ledger_out, multiset_file;
  double nu = 0.7, X_max = 1e6, beta_gap = 0.0;
  int m = 1;
  auto add_common = [&](CLI::App* c) {
    c->add_option("--X-max", X_max);
    c->add_option("--out", out)->required();
    c->add_option("--ledger", ledger_out)->required();
  };
  auto write_build = [&](const construct::BuildResult& b) {
    io::write_file(out, io::format_support(b.support));
    io::write_file(ledger_out, io::format_ledger(b.ledger));
    std::cout << kv("blocks", std::to_string(b.ledger.blocks.size())) << kv("primes", std::to_string(b.support.entries.size()))
              << kv("C_led", io::num(b.support.C_led)) << kv("c_sep", io::num(b.support.c_sep))
              << kv("growth_constant", io::num(b.support.growth_constant));
  };
  auto* pnu = con->add_subcommand("pnu", "Prime set with sum log p tracking x^nu/nu");
  add_common(pnu);
  pnu->add_option("--nu", nu);
  pnu->add_option("--m", m);
  pnu->add_option("--theta-num", theta_num);
  pnu->add_option("--theta-den", theta_den);
  pnu->callback([&] { write_build(construct::build_p_nu(nu, m, {theta_num, theta_den}, X_max)); });

  std::string mode = "main";
  auto* pchi = con->add_subcommand("pchi", "Character with prescribed zeros and poles");
  add_common(pchi);
  pchi->add_option("--multiset", multiset_file)->required();
  pchi->add_option("--mode", mode)->check(CLI::IsMember({"main", "main3"}));
  pchi->add_option("--alpha", alpha);
  pchi->add_option("--lambda", lambda);
  pchi->add_option("--kappa", kappa);
  pchi->add_option("--C", C3);
  pchi->add_option("--C-b", C_b);
  pchi->add_option("--C-c", C_c);
  pchi->add_option("--eps", eps);
  pchi->callback([&] {
    cli::RunConfig c;
    c.theorem = mode == "main" ? cli::Theorem::main : cli::Theorem::main3;
    c.multiset = multiset_file;
    c.alpha = alpha;
    c.lambda = lambda;
    c.kappa = kappa;
    c.C3 = C3;
    c.C_b = C_b;
    c.C_c = C_c;
    c.gate_eps = eps;
    c.X_max = X_max;
    write_build(cli::build_from_config(c));
  });

  auto* zeros = con->add_subcommand("zeros", "Character with prescribed zeros only");
  add_common(zeros);
  zeros->add_option("--multiset", multiset_file)->required();
  zeros->add_flag("--rh", rh);
  zeros->add_option("--beta-gap", beta_gap);
  zeros->callback([&] {
    cli::RunConfig c;
    c.theorem = cli::Theorem::zeros;
    c.multiset = multiset_file;
    c.rh = rh;
    c.beta_gap = beta_gap;
    c.X_max = X_max;
    write_build(cli::build_from_config(c));
  });

  // eval
  std::string support_file, at, grid_file, region = "0.6,1,0,1", res = "1,1";
  auto* ev = app.add_subcommand("eval", "log zeta_chi with tail bounds");
  ev->add_option("--support", support_file)->required();
  ev->add_option("--at", at, "sigma,t");
  ev->add_option("--grid", grid_file, "CSV of sigma,t rows");
  ev->add_option("--region", region, "sigma_lo,sigma_hi,t_lo,t_hi");
  ev->add_option("--res", res, "n_sigma,n_t");
  ev->add_option("--out", out);
  ev->callback([&] {
    const auto S = io::parse_support(io::read_file(support_file));
    std::vector<io::ValueRow> rows;
    if (!at.empty() || !grid_file.empty()) {
      std::vector<cplx> pts;
      if (!at.empty()) pts.push_back(point(at));
      if (!grid_file.empty()) {
        std::stringstream in(io::read_file(grid_file));
        std::string line;
        while (std::getline(in, line))
          if (!line.empty() && line[0] != '#' && line != "sigma,t") pts.push_back(point(line));
      }
      const continuation::ErrorProfile E(S);
      for (const auto& s : pts) {
        io::ValueRow r{s.real(), s.imag(), {std::nan(""), std::nan("")}, INFINITY};
        try {
          const auto v = continuation::log_zeta_chi(E, s);
          r.value = v.value;
          r.tail_bound = v.tail_bound;
        } catch (const PrecisionError& e) {
          std::cerr << "flagged " << io::num(s.real()) << "," << io::num(s.imag()) << ": " << e.what() << "\n";
        } catch (const PoleError& e) {
          std::cerr << "flagged " << io::num(s.real()) << "," << io::num(s.imag()) << ": " << e.what() << "\n";
        }
        rows.push_back(r);
      }
    } else {
      const auto g = numbers(region, 4, "--region");
      const auto n = numbers(res, 2, "--res");
      rows = cli::export_grid(S, {g[0], g[1], g[2], g[3]}, static_cast<int>(n[0]), static_cast<int>(n[1]));
    }
    emit(out, io::format_values(rows));
  });

  // verify
  auto* ver = app.add_subcommand("verify", "Verification suites");
  ver->require_subcommand(1);
  double radius = 0.02;
  int nodes = 1024;
  auto* residues = ver->add_subcommand("residues", "Winding number around every prescribed point");
  residues->add_option("--support", support_file)->required();
  residues->add_option("--multiset", multiset_file)->required();
  residues->add_option("--radius", radius);
  residues->add_option("--nodes", nodes);
  residues->add_option("--out", out);
  residues->callback([&] {
    const auto S = io::parse_support(io::read_file(support_file));
    const auto Z = io::parse_multiset(io::read_file(multiset_file));
    const continuation::ErrorProfile E(S);
    std::vector<cplx> others;
    for (const auto& t : S.q.terms) others.push_back(t.rho);
    cli::VerificationReport rep;
    int i = 0;
    for (const auto& p : Z.points()) {
      ++i;
      double r = std::min(radius, (p.beta - 0.5) / 2.0);
      for (const auto& o : others)
        if (o != p.rho()) r = std::min(r, std::abs(o - p.rho()) / 2.5);
      const continuation::Contour c{p.rho(), r, nodes};
      continuation::validate_contour(c, others);
      const double w = continuation::winding_number([&](cplx s) { return continuation::dprime_continued(E, s); }, c);
      rep.records.push_back({"winding." + std::to_string(i), "winding equals multiplicity " + std::to_string(p.mult),
                             std::abs(w - p.mult) <= 0.05, w, 0.05});
    }
    emit(out, cli::format_report(rep));
    if (!rep.passed()) status.code = 1;
  });

  // meansquare
  double sigma = 0.8, xcut = 1e3;
  std::string Ts = "1000,2000,4000";
  std::optional<std::uint64_t> ms_seed;
  auto* msq = app.add_subcommand("meansquare", "Mean square of the tail beyond x_cut");
  msq->add_option("--support", support_file)->required();
  msq->add_option("--sigma", sigma);
  msq->add_option("--xcut", xcut);
  msq->add_option("--T", Ts, "comma-separated list");
  msq->add_option("--seed", ms_seed, "Steinhaus angles on the support primes instead of the built ones");
  msq->add_option("--out", out);
  msq->callback([&] {
    const auto S = io::parse_support(io::read_file(support_file));
    std::vector<meansquare::MeanSquareResult> rows;
    if (ms_seed) {
      std::vector<std::uint64_t> ps;
      for (const auto& e : S.entries) ps.push_back(e.p);
      for (double T : numbers(Ts, 0, "--T")) rows.push_back(meansquare::steinhaus_tail(*ms_seed, ps, sigma, xcut, T));
    } else {
      const continuation::ErrorProfile E(S);
      for (double T : numbers(Ts, 0, "--T")) rows.push_back(meansquare::approx_meansquare(E, sigma, xcut, T));
    }
    emit(out, meansquare_csv(rows));
  });

  // search
  auto* search = app.add_subcommand("search", "Vertical translate searches");
  search->require_subcommand(1);
  std::string target_file;
  double tau_max = 1000.0;
  std::size_t budget = 256;
  auto* translate = search->add_subcommand("translate", "Best tau for log P(s + i tau) ~ log f(s)");
  translate->add_option("--support", support_file)->required();
  translate->add_option("--target", target_file, "CSV rows sigma,t,re,im of log f")->required();
  translate->add_option("--tau-max", tau_max);
  translate->add_option("--budget", budget);
  translate->add_option("--out", out);
  translate->callback([&] {
    const auto S = io::parse_support(io::read_file(support_file));
    std::vector<std::pair<std::uint64_t, double>> sup;
    for (const auto& e : S.entries) sup.emplace_back(e.p, e.angle);
    std::vector<meansquare::TargetSample> target;
    for (const auto& r : io::parse_values(io::read_file(target_file))) target.push_back({{r.sigma, r.t}, r.value});
    const auto res = meansquare::translate_search(sup, target, 0.0, tau_max, budget);
    std::string text = kv("best_tau", io::num(res.best_tau)) + kv("best_distance", io::num(res.best_distance)) +
                       kv("evaluations", std::to_string(res.trace.size()));
    emit(out, text);
  });

  // blaschke
  auto* bl = app.add_subcommand("blaschke", "Half-plane Blaschke factors");
  bl->require_subcommand(1);
  std::string rho_s;
  double trunc = 1e300, alpha_c = 0.0;
  auto* bl_eval = bl->add_subcommand("eval", "One atom");
  bl_eval->add_option("--rho", rho_s, "beta,gamma")->required();
  bl_eval->add_option("--alpha", alpha)->required();
  bl_eval->add_option("--at", at)->required();
  bl_eval->callback([&] {
    const auto b = factorization::atom_eval({point(rho_s), alpha}, point(at));
    std::cout << kv("re", io::num(b.real())) << kv("im", io::num(b.imag())) << kv("abs", io::num(std::abs(b)));
  });
  auto model = [&]() -> std::optional<factorization::DensityModel> {
    if (alpha_c > 0.0) return factorization::DensityModel{C_c, alpha_c};
    return std::nullopt;
  };
  auto* bl_cond = bl->add_subcommand("condition", "Blaschke sum and divergence trend");
  bl_cond->add_option("--multiset", multiset_file)->required();
  bl_cond->add_option("--alpha", alpha)->required();
  bl_cond->add_option("--C-c", C_c);
  bl_cond->add_option("--alpha-c", alpha_c, "density model exponent; 0 disables the tail estimate");
  bl_cond->callback([&] {
    const auto r = factorization::blaschke_condition(io::parse_multiset(io::read_file(multiset_file)), alpha, model());
    std::cout << kv("finite_sum", io::num(r.finite_sum)) << kv("diverging", r.diverging ? "1" : "0");
    if (r.tail) std::cout << kv("tail", io::num(*r.tail));
    if (!r.passed()) status.code = 1;
  });
  auto* bl_prod = bl->add_subcommand("product", "Blaschke product at a point");
  bl_prod->add_option("--multiset", multiset_file)->required();
  bl_prod->add_option("--alpha", alpha)->required();
  bl_prod->add_option("--at", at)->required();
  bl_prod->add_option("--trunc", trunc);
  bl_prod->add_option("--C-c", C_c);
  bl_prod->add_option("--alpha-c", alpha_c);
  bl_prod->callback([&] {
    const auto v = factorization::blaschke_product(io::parse_multiset(io::read_file(multiset_file)), alpha, point(at),
                                                   trunc, model());
    std::cout << kv("re", io::num(v.value.real())) << kv("im", io::num(v.value.imag()))
              << kv("tail_bound", io::num(v.tail_bound));
  });

  // run / replay
  std::string config_file;
  auto* run = app.add_subcommand("run", "Full pipeline from a config file");
  run->add_option("--config", config_file)->required();
  run->callback([&] {
    const auto rep = cli::run_pipeline(cli::load_config(config_file));
    std::cout << cli::format_report(rep);
    if (!rep.passed()) status.code = 1;
  });
  auto* replay = app.add_subcommand("replay", "Recompute a ledger from its support");
  replay->add_option("--support", support_file)->required();
  replay->add_option("--ledger", ledger_out)->required();
  replay->add_option("--out", out);
  replay->callback([&] {
    const auto rep = cli::replay_ledger(support_file, ledger_out);
    emit(out, cli::format_report(rep));
    if (!rep.passed()) status.code = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "helson: " << e.what() << "\n";
    return cli::exit_code(e);
  }
  return status.code;
}
