#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "helson/cli.hpp"
#include "helson/error.hpp"
#include "helson/io.hpp"

using namespace helson;
using namespace helson::cli;
namespace fs = std::filesystem;

namespace {

const std::string kData = HELSON_TEST_DATA;

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("helson_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunConfig demo(const fs::path& out) {
  auto c = load_config(kData + "/main_demo.cfg");
  c.out_dir = out.string();
  return c;
}

const construct::BuildResult& demo_build() {
  static const auto b = build_from_config(demo(fs::temp_directory_path()));
  return b;
}

std::string slurp(const fs::path& p) { return io::read_file(p.string()); }

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config("# comment\ntheorem = pnu\nnu = 0.71\n\nT = 10, 20\nsigma =\nout_dir = x\n");
  CHECK(c.theorem == Theorem::pnu);
  CHECK(c.nu == 0.71);
  CHECK(c.T == std::vector<double>{10.0, 20.0});
  CHECK(c.sigma.empty());
  CHECK(c.out_dir == "x");
  CHECK(format_config(parse_config(format_config(c))) == format_config(c));

  CHECK_THROWS_AS(parse_config("colour = red\n"), FormatError);
  CHECK_THROWS_AS(parse_config("nu = 0.7\nnu = 0.71\n"), FormatError);
  CHECK_THROWS_AS(parse_config("nu = seven\n"), FormatError);
  CHECK_THROWS_AS(parse_config("theorem = other\n"), FormatError);
  CHECK_THROWS_AS(parse_config("nodes\n"), FormatError);
}

TEST_CASE("config gates re-run at load") {
  const auto dir = scratch("gates");
  io::write_file((dir / "bad_nu.cfg").string(), "theorem = pnu\nnu = 0.75\n");
  CHECK_THROWS_AS(load_config((dir / "bad_nu.cfg").string()), ArgumentError);
  io::write_file((dir / "ok_nu.cfg").string(), "theorem = pnu\nnu = 0.7375\n");
  CHECK_NOTHROW(load_config((dir / "ok_nu.cfg").string()));
  io::write_file((dir / "missing.cfg").string(), "multiset = nowhere.csv\n");
  CHECK_THROWS_AS(load_config((dir / "missing.cfg").string()), ArgumentError);
  io::write_file((dir / "far.csv").string(), "# signed-multiset v1\n0.9,10,1\n");
  io::write_file((dir / "far.cfg").string(), "multiset = far.csv\nalpha = 0.73\n");
  CHECK_THROWS_AS(load_config((dir / "far.cfg").string()), ArgumentError);
  io::write_file((dir / "xcut.cfg").string(), "x_cut = 1\n");
  CHECK_THROWS_AS(load_config((dir / "xcut.cfg").string()), ArgumentError);
  fs::remove_all(dir);
}

TEST_CASE("report text") {
  VerificationReport r;
  r.records.push_back({"a", "first thing", true, 0.1, 1.0});
  r.records.push_back({"b.c", "second: with colon", false, -2.5, 0.0});
  const auto text = format_report(r);
  CHECK(text.rfind("report: helson-verification v1\noverall: fail\nchecks: 2\na.anchor: first thing\n", 0) == 0);
  CHECK(format_report(parse_report(text)) == text);
  CHECK_FALSE(parse_report(text).passed());
  CHECK(format_report(VerificationReport{}) == "report: helson-verification v1\noverall: pass\nchecks: 0\n");

  auto lied = text;
  lied.replace(lied.find("overall: fail"), 13, "overall: pass");
  CHECK_THROWS_AS(parse_report(lied), FormatError);
  CHECK_THROWS_AS(parse_report("hello\n"), FormatError);
}

TEST_CASE("pipeline on an empty multiset passes vacuously") {
  const auto dir = scratch("empty");
  RunConfig c;
  c.X_max = 1e4;
  c.sigma.clear();
  c.out_dir = dir.string();
  const auto rep = run_pipeline(c);
  CHECK(rep.passed());
  for (const auto& r : rep.records) CHECK(r.id.rfind("winding", 0) != 0);
  for (const char* f : {"config.txt", "multiset.csv", "support.txt", "ledger.csv", "windings.csv", "report.txt"})
    CHECK(fs::exists(dir / f));
  CHECK(slurp(dir / "report.txt") == format_report(rep));
  fs::remove_all(dir);
}

TEST_CASE("pipeline on the two-point demo") {
  const auto d1 = scratch("demo1");
  const auto d2 = scratch("demo2");
  const auto rep = run_pipeline(demo(d1));
  CHECK(rep.passed());
  int windings = 0;
  for (const auto& r : rep.records) {
    if (r.id == "winding.1") CHECK(std::abs(r.measured - 1.0) <= 0.05);
    if (r.id == "winding.2") CHECK(std::abs(r.measured + 2.0) <= 0.05);
    windings += r.id.rfind("winding.", 0) == 0;
  }
  CHECK(windings == 2);

  run_pipeline(demo(d2));
  for (const char* f : {"report.txt", "support.txt", "ledger.csv", "windings.csv", "meansquare.csv"})
    CHECK(slurp(d1 / f) == slurp(d2 / f));
  // every artifact reads back to the same bytes
  CHECK(io::format_support(io::parse_support(slurp(d1 / "support.txt"))) == slurp(d1 / "support.txt"));
  CHECK(io::format_ledger(io::parse_ledger(slurp(d1 / "ledger.csv"))) == slurp(d1 / "ledger.csv"));
  CHECK(io::format_multiset(io::parse_multiset(slurp(d1 / "multiset.csv"))) == slurp(d1 / "multiset.csv"));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("pipeline stage failures name the stage and the finished artifacts") {
  const auto dir = scratch("coarse");
  auto c = demo(dir);
  c.X_max = 1e3;
  c.x_cut = 100;
  try {
    run_pipeline(c);
    FAIL("expected the residue stage to fail on a coarse build");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(e.kind() == ErrorKind::precision);
    CHECK(what.find("stage residues") != std::string::npos);
    CHECK(what.find("support.txt") != std::string::npos);
    CHECK(what.find("windings.csv") == std::string::npos);
    CHECK(exit_code(e) == 3);
  }
  fs::remove_all(dir);
}

TEST_CASE("replay_ledger") {
  const auto& b = demo_build();
  CHECK(replay_ledger(b.support, b.ledger).passed());

  auto bad = b.ledger;
  bad.blocks[41].residual += construct::cplx(1e-6, 0.0);
  const auto rep = replay_ledger(b.support, bad);
  CHECK_FALSE(rep.passed());
  bool named = false;
  for (const auto& r : rep.records) named |= r.id == "replay.block." + std::to_string(bad.blocks[41].k) && !r.passed;
  CHECK(named);

  auto short_ledger = b.ledger;
  short_ledger.blocks.pop_back();
  CHECK_FALSE(replay_ledger(b.support, short_ledger).passed());

  const auto pnu = construct::build_p_nu(0.7, 1, {21, 40}, 1e6);
  const auto pr = replay_ledger(pnu.support, pnu.ledger);
  CHECK(pr.passed());
  for (const auto& row : pnu.ledger.blocks)
    CHECK(std::abs(row.residual) <= pnu.support.C_led * std::log(row.x_k) * (1.0 + 1e-12));

  const auto dir = scratch("replay");
  io::write_file((dir / "s.txt").string(), io::format_support(b.support));
  io::write_file((dir / "l.csv").string(), io::format_ledger(b.ledger));
  CHECK(replay_ledger((dir / "s.txt").string(), (dir / "l.csv").string()).passed());
  fs::remove_all(dir);
}

TEST_CASE("export_grid") {
  const auto& S = demo_build().support;
  const auto one = export_grid(S, {0.8, 0.8, 5.0, 5.0}, 1, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].sigma == 0.8);
  CHECK(one[0].t == 5.0);
  CHECK(std::isfinite(one[0].tail_bound));
  CHECK(export_grid(S, {0.7, 0.9, 0.0, 3.0}, 7, 3).size() == 21);
  CHECK_THROWS_AS(export_grid(S, {0.4, 0.9, 0.0, 3.0}, 2, 2), ArgumentError);

  // |zeta_chi| is smallest at the cell holding the prescribed zero 0.7 + 10i
  const GridRegion around{0.6, 0.8, 9.9, 10.1};
  const int n = 100;
  const auto rows = export_grid(S, around, n, n);
  REQUIRE(rows.size() == static_cast<std::size_t>(n * n));
  std::size_t best = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (std::isfinite(rows[i].value.real()) && rows[i].value.real() < rows[best].value.real()) best = i;
  const double ds = (around.sigma_hi - around.sigma_lo) / (n - 1);
  const double dt = (around.t_hi - around.t_lo) / (n - 1);
  CHECK(std::abs(rows[best].sigma - 0.7) <= ds);
  CHECK(std::abs(rows[best].t - 10.0) <= dt);
}

TEST_CASE("exit codes") {
  CHECK(exit_code(ArgumentError("x")) == 2);
  CHECK(exit_code(FormatError("x")) == 2);
  CHECK(exit_code(ResourceError("x")) == 3);
  CHECK(exit_code(PrecisionError("x")) == 3);
  CHECK(exit_code(ConstructionError("x", 3)) == 1);
  CHECK(exit_code(std::runtime_error("x")) == 3);
}
