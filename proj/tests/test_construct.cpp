#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "helson/construct.hpp"
#include "helson/error.hpp"
#include "oracles.hpp"

using namespace helson;
using namespace helson::construct;
using multisets::Point;
using multisets::SignedMultiset;

namespace {

ChiMode main_mode(double alpha) {
  ChiMode m;
  m.alpha = alpha;
  return m;
}

}  // namespace

TEST_CASE("q_eval") {
  QFunction empty;
  CHECK(q_eval(empty, 10.0) == cplx(0.0));
  QFunction one;
  one.terms.push_back({cplx(0.7, 0.0), 1, 1.0});
  for (double x : {1.0, 2.5, 1e4}) CHECK(std::abs(q_eval(one, x) - std::pow(x, -0.3)) < 1e-14);

  QFunction pair;
  pair.mode = Mode::ZerosOnly;
  pair.terms.push_back({cplx(0.8, 3.0), 1, 2.0});
  pair.terms.push_back({cplx(0.75, 3.0), -1, 2.0});
  for (double x = 2.0; x < 1e6; x *= 1.37) {
    const cplx direct = std::pow(cplx(x), cplx(-0.2, 3.0)) - std::pow(cplx(x), cplx(-0.25, 3.0));
    CHECK(std::abs(q_eval(pair, x) - direct) < 1e-13);
    CHECK(std::abs(q_eval(pair, x)) <= std::pow(x, -0.2) * 0.05 * std::log(x) + 1e-15);
  }
  CHECK(q_eval(pair, 1.5) == cplx(0.0));
}

TEST_CASE("q_integral closed form") {
  QFunction empty;
  CHECK(q_integral(empty, 50.0) == cplx(0.0));
  QFunction one;
  one.terms.push_back({cplx(0.7, 0.0), 1, 1.0});
  CHECK(std::abs(q_integral(one, 300.0) - (std::pow(300.0, 0.7) - 1) / 0.7) < 1e-11);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> b(0.51, 0.95), g(-40, 40), c(1, 500);
  QFunction q;
  for (int i = 0; i < 20; ++i) q.terms.push_back({cplx(b(rng), g(rng)), (i % 5) - 2 == 0 ? 3 : (i % 5) - 2, c(rng)});
  std::vector<double> cuts{1.0, 1000.0};
  for (const auto& t : q.terms) cuts.push_back(t.cutoff);
  std::sort(cuts.begin(), cuts.end());
  cplx quad = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    // integrate in u = log x on each smooth piece
    const double a = std::log(cuts[i]), bb = std::log(cuts[i + 1]);
    const double mid = (cuts[i] + cuts[i + 1]) / 2;
    QFunction active = q;
    std::erase_if(active.terms, [&](const QTerm& t) { return t.cutoff > mid; });
    quad += oracle::gauss_legendre([&](double u) { return q_eval(active, std::exp(u)) * std::exp(u); }, a, bb, 400);
  }
  const cplx closed = q_integral(q, 1000.0);
  CHECK(std::abs(closed - quad) <= 1e-9 * std::abs(closed));
}

TEST_CASE("build_p_nu preconditions") {
  CHECK_THROWS_AS(build_p_nu(0.7, 0, {21, 40}, 1e4), ArgumentError);
  CHECK_THROWS_AS(build_p_nu(0.75, 1, {21, 40}, 1e4), ArgumentError);
  CHECK_THROWS_AS(build_p_nu(0.5, 1, {21, 40}, 1e4), ArgumentError);
  CHECK_NOTHROW(build_p_nu(0.7375 - 1e-6, 1, {21, 40}, 1e4));
}

TEST_CASE("build_p_nu ledger, separation and replay") {
  const auto r = build_p_nu(0.7, 1, {21, 40}, 2e5);
  const auto& s = r.support;
  REQUIRE(r.ledger.blocks.size() > 100);
  CHECK(s.entries.front().p == 2);
  for (std::size_t i = 1; i < s.entries.size(); ++i) CHECK(s.entries[i].p > s.entries[i - 1].p);
  for (const auto& e : s.entries) CHECK(e.angle == 0.0);
  for (const auto& row : r.ledger.blocks) {
    const double sum = psi_chi(s, row.x_k).real();
    CHECK(std::abs(sum - std::pow(row.x_k, 0.7) / 0.7) <= 3 * std::log(row.x_k));
    CHECK(std::abs(row.residual) <= s.C_led * std::log(row.x_k) * (1 + 1e-12));
  }
  CHECK(s.c_sep > 0);
  double sep = 1e300;
  for (std::size_t i = 1; i < s.entries.size(); ++i)
    sep = std::min(sep, static_cast<double>(s.entries[i].p - s.entries[i - 1].p) *
                            std::pow(static_cast<double>(s.entries[i - 1].p), -0.3));
  CHECK(sep == doctest::Approx(s.c_sep).epsilon(1e-12));

  const auto again = replay(s);
  REQUIRE(again.blocks.size() == r.ledger.blocks.size());
  for (std::size_t k = 0; k < again.blocks.size(); ++k) {
    CHECK(again.blocks[k].x_k == r.ledger.blocks[k].x_k);
    CHECK(std::abs(again.blocks[k].achieved - r.ledger.blocks[k].achieved) <=
          1e-9 * std::max(1.0, std::abs(r.ledger.blocks[k].achieved)));
  }
  // order of magnitude of the prime count: x^nu / (nu log x)
  const double X = s.X_end;
  const double expect = std::pow(X, 0.7) / (0.7 * std::log(X));
  CHECK(static_cast<double>(s.entries.size()) > 0.5 * expect);
  CHECK(static_cast<double>(s.entries.size()) < 2.0 * expect);
}

TEST_CASE("build_p_chi on empty multiset keeps only the seed prime") {
  const auto r = build_p_chi(SignedMultiset{}, main_mode(0.73), 1e4);
  REQUIRE(r.support.entries.size() == 1);
  CHECK(r.support.entries[0].p == 2);
  CHECK(r.support.entries[0].angle == 0.0);
  for (const auto& row : r.ledger.blocks) CHECK(row.target == cplx(0.0));
}

TEST_CASE("build_p_chi single point replay") {
  const auto r = build_p_chi(SignedMultiset({{0.7, 10, 1}}), main_mode(0.73), 1e6);
  const auto& s = r.support;
  CHECK(s.q.terms.size() == 1);
  CHECK(s.q.terms[0].cutoff == doctest::Approx(std::pow(11.0, 1.0 / 0.43)));
  for (const auto& row : r.ledger.blocks) {
    const cplx E = psi_chi(s, row.x_k) + q_integral(s.q, row.x_k);
    CHECK(std::abs(E) <= s.C_led * std::log(row.x_k) * (1 + 1e-12));
  }
  for (const auto& e : s.entries) CHECK(std::abs(e.angle) <= std::numbers::pi);
}

TEST_CASE("conjugate-symmetric data gives real residuals and angles 0 or pi") {
  const SignedMultiset z({{0.7, 10, 1}, {0.7, -10, 1}, {0.62, 4, -1}, {0.62, -4, -1}});
  const auto r = build_p_chi(z, main_mode(0.73), 3e5);
  for (const auto& row : r.ledger.blocks) CHECK(row.residual.imag() == 0.0);
  bool saw_pi = false;
  for (const auto& e : r.support.entries) {
    CHECK((e.angle == 0.0 || e.angle == std::numbers::pi));
    saw_pi |= e.angle == std::numbers::pi;
  }
  CHECK(saw_pi);
  CHECK_FALSE(r.ledger.complex_valued);
}

TEST_CASE("global growth bound at random points") {
  const auto r = build_p_chi(SignedMultiset({{0.7, 10, 1}, {0.65, 35, -2}}), main_mode(0.73), 1e6);
  const auto& s = r.support;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(std::log(2.0), std::log(s.X_end));
  for (int i = 0; i < 200; ++i) {
    const double x = std::exp(u(rng));
    const cplx E = psi_chi(s, x) + q_integral(s.q, x);
    CHECK(std::abs(E) <= s.growth_constant * std::pow(x, s.growth_exponent) * std::log(x));
  }
}

TEST_CASE("constructions are deterministic") {
  const SignedMultiset z({{0.7, 10, 1}, {0.65, 35, -2}});
  const auto a = build_p_chi(z, main_mode(0.73), 2e5);
  const auto b = build_p_chi(z, main_mode(0.73), 2e5);
  REQUIRE(a.support.entries.size() == b.support.entries.size());
  for (std::size_t i = 0; i < a.support.entries.size(); ++i) {
    CHECK(a.support.entries[i].p == b.support.entries[i].p);
    CHECK(a.support.entries[i].angle == b.support.entries[i].angle);
  }
  for (std::size_t k = 0; k < a.ledger.blocks.size(); ++k) CHECK(a.ledger.blocks[k].residual == b.ledger.blocks[k].residual);
  CHECK(a.support.growth_constant == b.support.growth_constant);
}

TEST_CASE("gate failure is an argument error") {
  CHECK_THROWS_AS(build_p_chi(SignedMultiset({{0.74, 10, 1}}), main_mode(0.73), 1e4), ArgumentError);
}

TEST_CASE("selection from a P_nu base draws only base primes") {
  const auto base = build_p_nu(0.73, 1, {21, 40}, 2e5);
  const SignedMultiset z({{0.6, 5, 1}, {0.6, -5, 1}});
  const auto r = build_p_chi(z, main_mode(0.62), 2e5, &base.support);
  std::vector<std::uint64_t> pool;
  for (const auto& e : base.support.entries) pool.push_back(e.p);
  for (const auto& e : r.support.entries) CHECK(std::binary_search(pool.begin(), pool.end(), e.p));
  CHECK(r.support.C_led <= kCarryLimit);
}

TEST_CASE("an exhausted base raises a construction error naming the block") {
  const auto base = build_p_nu(0.55, 1, {21, 40}, 1e5);
  const SignedMultiset z({{0.7, 5, 3}, {0.7, -5, 3}});
  try {
    build_p_chi(z, main_mode(0.73), 1e5, &base.support);
    FAIL("expected a construction error");
  } catch (const ConstructionError& e) {
    CHECK(e.block() > 0);
  }
}

TEST_CASE("Cramer-mode block schedule") {
  ChiMode m;
  m.kind = ChiMode::Kind::thm_main3;
  m.lambda = 1.5;
  m.kappa = 1.2;
  m.C = 1.0;
  const auto r = build_p_chi(SignedMultiset({{0.501, 100, 1}}), m, 1e5);
  CHECK(r.support.params.eps == doctest::Approx(0.15));
  CHECK(r.support.q.terms[0].cutoff == 100.0);
  for (std::size_t k = 1; k < r.ledger.blocks.size(); ++k) {
    const double x = r.ledger.blocks[k - 1].x_k;
    CHECK(r.ledger.blocks[k].x_k == x + std::max(1.0, std::ceil(std::pow(std::log(x), 2.15))));
  }
}

TEST_CASE("zeros-only construction") {
  const auto empty = multisets::assign_dyadic(SignedMultiset{}, 1e-4, multisets::ZerosMode::unconditional);
  const auto r0 = build_zeros_only(SignedMultiset{}, empty, multisets::ZerosMode::unconditional, 1e4);
  CHECK(r0.support.entries.size() == 1);
  CHECK(r0.support.q.terms.empty());

  const SignedMultiset z({{0.9, 5, 1}});
  const auto a = multisets::assign_dyadic(z, 1e-2, multisets::ZerosMode::unconditional);
  CHECK(a.tags[0].region == multisets::Region::V);
  CHECK(a.tags[0].j == 2);
  const auto r = build_zeros_only(z, a, multisets::ZerosMode::unconditional, 1e6);
  REQUIRE(r.support.q.terms.size() == 2);
  CHECK(r.support.q.terms[1].mult == -1);
  CHECK(r.support.q.terms[1].cutoff == 4.0);
  const double gap = 0.9 - a.tags[0].beta_prime;
  for (double x = 4.0; x < 1e6; x *= 1.5)
    CHECK(std::abs(q_eval(r.support.q, x)) <= std::pow(x, -0.1) * gap * std::log(x) + 1e-15);
  for (const auto& row : r.ledger.blocks)
    CHECK(std::abs(row.residual) <= r.support.growth_constant * std::pow(row.x_k, 0.55) + 3 * std::log(row.x_k));

  const auto rh = multisets::assign_dyadic(z, 1e-2, multisets::ZerosMode::rh);
  const auto rr = build_zeros_only(z, rh, multisets::ZerosMode::rh, 1e5);
  for (std::size_t k = 1; k < rr.ledger.blocks.size(); ++k) {
    const double x = rr.ledger.blocks[k - 1].x_k;
    CHECK(rr.ledger.blocks[k].x_k == x + std::ceil(2 * std::sqrt(x) * std::log(x)));
  }
}
