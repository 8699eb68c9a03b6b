#include <doctest.h>

#include <cmath>
#include <random>

#include "helson/error.hpp"
#include "helson/multisets.hpp"

using namespace helson;
using namespace helson::multisets;

namespace {

SignedMultiset two_points() { return SignedMultiset({{0.8, 20, 1}, {0.65, 35, -2}}); }

const DensityCheck& find(const DensityReport& r, Condition c) {
  for (const auto& x : r.checks)
    if (x.id == c) return x;
  FAIL("missing condition");
  return r.checks.front();
}

SignedMultiset random_multiset(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> b(0.5001, 0.99), g(-60, 60);
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back({b(rng), g(rng), (i % 3) - 1 == 0 ? 2 : (i % 3) - 1});
  return SignedMultiset(pts);
}

}  // namespace

TEST_CASE("multiset validation and ordering") {
  CHECK_THROWS_AS(SignedMultiset({{0.5, 1, 1}}), ArgumentError);
  CHECK_THROWS_AS(SignedMultiset({{0.7, 1, 0}}), ArgumentError);
  CHECK_THROWS_AS(SignedMultiset({{0.7, 1, 1}, {0.7, 1, 2}}), ArgumentError);
  const SignedMultiset z({{0.9, -5, 1}, {0.6, 2, 1}, {0.7, 5, 1}});
  CHECK(z.points()[0].gamma == 2);
  CHECK(z.points()[1].beta == 0.7);
  CHECK(z.points()[2].beta == 0.9);
  CHECK_FALSE(z.conjugate_symmetric());
  CHECK(SignedMultiset({{0.7, 5, 2}, {0.7, -5, 2}}).conjugate_symmetric());
}

TEST_CASE("counting") {
  CHECK(counting(SignedMultiset{}, 0.6, 100) == 0);
  CHECK(counting(two_points(), 0.7, 30) == 1);
  CHECK(counting(two_points(), 0.6, 40) == 3);
}

TEST_CASE("counting is monotone in sigma and T") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto z = random_multiset(rng, 40);
    std::uniform_real_distribution<double> s(0.5, 1.0), t(0.1, 80);
    double s1 = s(rng), s2 = s(rng), t1 = t(rng), t2 = t(rng);
    if (s1 > s2) std::swap(s1, s2);
    if (t1 > t2) std::swap(t1, t2);
    CHECK(counting(z, s1, t1) >= counting(z, s2, t1));
    CHECK(counting(z, s1, t1) <= counting(z, s1, t2));
  }
}

TEST_CASE("gate_thm_main") {
  CHECK(gate_thm_main(SignedMultiset({{0.7, 10, 1}}), 0.73, 10, 10, 0.1).passed());
  const auto r = gate_thm_main(SignedMultiset({{0.74, 10, 1}}), 0.73, 10, 10, 0.1);
  CHECK_FALSE(r.passed());
  CHECK_FALSE(find(r, Condition::main_a).passed);
  CHECK(find(r, Condition::main_a).witness.has_value());
  CHECK_THROWS_AS(gate_thm_main(SignedMultiset{}, 0.74, 1, 1, 0), ArgumentError);
  CHECK_THROWS_AS(gate_thm_main(SignedMultiset{}, 0.5, 1, 1, 0), ArgumentError);

  std::vector<Point> crowd;
  for (int i = 1; i <= 1000; ++i) crowd.push_back({0.73, static_cast<double>(i), 1});
  const auto rc = gate_thm_main(SignedMultiset(crowd), 0.73, 1e6, 1, 0.1);
  CHECK_FALSE(find(rc, Condition::main_c).passed);
  CHECK(1000.0 > std::pow(1000.0, 0.01 / 0.45));
}

TEST_CASE("gate_thm_main3") {
  const auto r1 = gate_thm_main3(SignedMultiset({{0.6, 100, 1}}), 1.5, 1.2, 10);
  CHECK_FALSE(find(r1, Condition::main3_a).passed);
  const double bound = 1 - 1.5 * std::log(std::log(100.0)) / std::log(100.0);
  CHECK(bound == doctest::Approx(0.5026).epsilon(1e-3));
  const auto r2 = gate_thm_main3(SignedMultiset({{0.52, 1e6, 1}}), 1.5, 1.2, 10);
  CHECK(find(r2, Condition::main3_a).passed);
  const auto r3 = gate_thm_main3(SignedMultiset({{0.51, 10, 1}}), 1.5, 1.2, 10);
  CHECK_FALSE(find(r3, Condition::main3_a).passed);
  CHECK(find(r3, Condition::main3_a).witness.has_value());
  CHECK_THROWS_AS(gate_thm_main3(SignedMultiset{}, 1.1, 1.2, 1), ArgumentError);
  CHECK_THROWS_AS(gate_thm_main3(SignedMultiset{}, 1.5, 1.0, 1), ArgumentError);
}

TEST_CASE("gate_thm_nonuniversal") {
  CHECK(gate_thm_nonuniversal(SignedMultiset({{0.975, 50, 1}}), ZerosMode::unconditional).passed());
  CHECK_FALSE(gate_thm_nonuniversal(SignedMultiset({{0.976, 50, 1}}), ZerosMode::unconditional).passed());
  CHECK_FALSE(gate_thm_nonuniversal(SignedMultiset({{0.98, 50, 1}}), ZerosMode::unconditional).passed());
  CHECK(gate_thm_nonuniversal(SignedMultiset({{0.98, 50, 1}}), ZerosMode::rh).passed());
  CHECK_THROWS_AS(gate_thm_nonuniversal(SignedMultiset({{0.9, 50, -1}}), ZerosMode::unconditional), ArgumentError);
}

TEST_CASE("dyadic classification") {
  auto u = classify({0.8, 0, 1});
  CHECK(u.region == Region::U);
  CHECK(u.j == 1);
  auto v = classify({0.8, 3, 1});
  CHECK(v.region == Region::V);
  CHECK(v.j == 1);
  auto v2 = classify({0.9, 5, 1});
  CHECK(v2.region == Region::V);
  CHECK(v2.j == 2);
  CHECK(classify({0.625, 4, 1}).region == Region::U);
  CHECK(classify({0.625, 4, 1}).j == 2);
}

TEST_CASE("dyadic regions partition the strip") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> b(0.5001, 0.9999), g(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const Point p{b(rng), g(rng), 1};
    int hits = 0;
    for (int j = 1; j < 40; ++j) {
      const double lo = 0.5 + std::ldexp(1.0, -(j + 1));
      const double a = std::abs(p.gamma);
      if (p.beta >= lo && p.beta < 0.5 + std::ldexp(1.0, -j) && a <= std::ldexp(1.0, j)) ++hits;
      if (p.beta >= lo && a > std::ldexp(1.0, j) && a <= std::ldexp(1.0, j + 1)) ++hits;
    }
    CHECK(hits == 1);
    const auto t = classify(p);
    const double lo = 0.5 + std::ldexp(1.0, -(t.j + 1));
    CHECK(p.beta >= lo);
  }
}

TEST_CASE("assign_dyadic deltas and pairs") {
  const SignedMultiset z({{0.8, 3, 1}, {0.9, 3.5, 2}, {0.8, 0.5, 1}});
  const auto a = assign_dyadic(z, 1e-4, ZerosMode::unconditional);
  REQUIRE(a.delta.size() >= 1);
  CHECK(a.delta[0] == doctest::Approx(1.0 / 3.0));
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (a.tags[i].region != Region::V) continue;
    CHECK(a.tags[i].beta_prime < z.points()[i].beta);
    CHECK(z.points()[i].beta - a.tags[i].beta_prime == doctest::Approx(1e-4));
  }
  const auto rh = assign_dyadic(z, 1.0, ZerosMode::rh);
  CHECK(rh.delta[0] == doctest::Approx((1 - 0.9) / 3.0));
  const auto def = assign_dyadic(z, 0.0, ZerosMode::unconditional);
  CHECK(z.points()[1].beta - def.tags[1].beta_prime == doctest::Approx(0.5 / 3.0));
}

TEST_CASE("sample_admissible") {
  CHECK(sample_admissible(1, 0, 0.7, 100).empty());
  const auto z = sample_admissible(1, 5, 0.7, 100);
  CHECK(z.size() == 5);
  CHECK(gate_thm_main(z, 0.7, 25, 1, 0).passed());
  const auto again = sample_admissible(1, 5, 0.7, 100);
  for (std::size_t i = 0; i < z.size(); ++i) {
    CHECK(z.points()[i].beta == again.points()[i].beta);
    CHECK(z.points()[i].gamma == again.points()[i].gamma);
    CHECK(z.points()[i].mult == again.points()[i].mult);
  }
  const auto big = sample_admissible(9, 60, 0.73, 200);
  CHECK(gate_thm_main(big, 0.73, 25, 1, 0).passed());
  CHECK_THROWS_AS(sample_admissible(1, 2000, 0.7, 100), ArgumentError);

  SampleOptions o;
  o.C_c = 100;
  o.positive_only = true;
  o.beta_floor = 0.7;
  o.gamma_min = 3;
  const auto zeros = sample_admissible(2, 100, 0.975, 50, o);
  CHECK(zeros.size() == 100);
  CHECK(gate_thm_nonuniversal(zeros, ZerosMode::unconditional).passed());
}

TEST_CASE("gates are pure") {
  const auto z = sample_admissible(4, 30, 0.72, 100);
  const auto a = gate_thm_main(z, 0.72, 3, 1, 0.2);
  const auto b = gate_thm_main(z, 0.72, 3, 1, 0.2);
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    CHECK(a.checks[i].passed == b.checks[i].passed);
    CHECK(a.checks[i].margin == b.checks[i].margin);
  }
}
