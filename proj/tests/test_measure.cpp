#include <doctest.h>

#include <cmath>
#include <memory>

#include "sslab/errors.hpp"
#include "sslab/measure.hpp"
#include "sslab/scaling.hpp"
#include "support.hpp"

using namespace sslab;

namespace {
std::shared_ptr<const FractalSystem> sys_of(SystemKind k, double lambda = 0.25) {
  return std::make_shared<const FractalSystem>(build_system(k, {.lambda = lambda}));
}

// Points distributed by mu: random address with digits drawn from p.
std::vector<Vec2> mu_sample(const SelfSimilarMeasure& mu, std::size_t n) {
  std::discrete_distribution<int> pick(mu.weights().values().begin(), mu.weights().values().end());
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 x = mu.system().hull[0];
    for (int k = 0; k < 45; ++k) x = mu.system().maps[static_cast<std::size_t>(pick(testing::rng()))](x);
    pts.push_back(x);
  }
  return pts;
}

// Brute force over all level-m cells.
std::pair<double, double> brute_ball(const SelfSimilarMeasure& mu, const Vec2& x, double r, std::size_t m) {
  double lo = 0, hi = 0;
  walk_level_cells(mu.system(), m, [&](const Word& w, const Similitude& f) {
    const auto h = map_hull(mu.system(), f);
    double far = 0, near = INFINITY;
    for (const auto& v : h) far = std::max(far, (v - x).norm());
    near = point_hull_distance(x, h);
    if (far < r) lo += mu.weight(w);
    if (near < r) hi += mu.weight(w);
  });
  return {lo, hi};
}

AddressStream random_address(int n) {
  return AddressStream(testing::random_word(6, n), testing::random_word(static_cast<std::size_t>(testing::uniform_int(1, 3)), n));
}
}  // namespace

TEST_CASE("measure construction") {
  auto k = sys_of(SystemKind::KLambda);
  CHECK_THROWS_AS(SelfSimilarMeasure(Tuple{0.3, 0.3, 0.3, 0.2}, k), DomainError);
  CHECK_THROWS_AS(SelfSimilarMeasure(Tuple{0.5, 0.5}, k), DomainError);
  SelfSimilarMeasure mu(Tuple{0.3, 0.3, 0.3, 0.1}, k);
  double s = 0;
  for (const auto& w : partition(k->ratios, 0.01).words) s += mu.weight(w);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cell measure bounds") {
  SelfSimilarMeasure sg(Tuple{1.0 / 3, 1.0 / 3, 1.0 / 3}, sys_of(SystemKind::Sierpinski));
  const auto e = cell_measure_bounds(sg, Word{});
  CHECK(e.lower == 1.0);
  CHECK(e.upper == 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    const auto w = testing::random_word(static_cast<std::size_t>(testing::uniform_int(1, 6)), 3);
    const auto b = cell_measure_bounds(sg, w);
    const double exact = std::pow(3.0, -static_cast<double>(w.size()));
    CHECK(b.lower == doctest::Approx(exact).epsilon(1e-14));
    CHECK(b.upper <= exact * (1 + 1e-4));
    CHECK(b.depth == 12);
  }

  SelfSimilarMeasure k(Tuple{0.3, 0.3, 0.3, 0.1}, sys_of(SystemKind::KLambda));
  const auto b4 = cell_measure_bounds(k, Word{4});
  CHECK(b4.lower == doctest::Approx(0.1));
  CHECK(b4.upper < 0.11);
  k.set_cell_constant(1.05);
  CHECK(cell_measure_bounds(k, Word{4}).upper <= 0.105 + 1e-15);

  // Overlapping interval fixture: the cap stops the deepening but the bound stays valid.
  auto iv = sys_of(SystemKind::Interval);
  SelfSimilarMeasure mi(Tuple{0.2, 0.5, 0.3}, iv);
  const auto bi = cell_measure_bounds(mi, Word{1, 2}, 12, 20000);
  CHECK(bi.depth < 12);
  const auto pts = mu_sample(mi, 20000);
  const auto hull = map_hull(*iv, cell_frame(*iv, Word{1, 2}).affine);
  double inside = 0;
  for (const auto& p : pts) inside += point_hull_distance(p, hull) <= 1e-12;
  const double est = inside / 20000, sd = std::sqrt(est * (1 - est) / 20000);
  CHECK(est >= bi.lower - 4 * sd);
  CHECK(est <= bi.upper + 4 * sd);
}

TEST_CASE("ball volume brackets the Monte Carlo and brute-force oracles") {
  for (auto kind : {SystemKind::Sierpinski, SystemKind::KLambda, SystemKind::Interval}) {
    auto sys = sys_of(kind);
    const auto p = testing::random_probability(sys->size());
    SelfSimilarMeasure mu(p, sys);
    const auto pts = mu_sample(mu, 40000);
    for (int rep = 0; rep < 12; ++rep) {
      const auto x = point_from_address(*sys, random_address(static_cast<int>(sys->size())));
      const double r = std::exp(testing::uniform(std::log(0.05), std::log(0.6)));
      const auto b = ball_volume(mu, x.coords, r);
      REQUIRE(b.lower > 0);
      REQUIRE(b.lower <= b.upper);
      double in = 0;
      for (const auto& q : pts) in += (q - x.coords).norm() < r;
      const double est = in / 40000, sd = std::sqrt(est * (1 - est) / 40000) + 1e-4;
      CHECK(est >= b.lower - 4 * sd);
      CHECK(est <= b.upper + 4 * sd);
      const auto [blo, bhi] = brute_ball(mu, x.coords, r, 7);
      CHECK(b.lower <= bhi + 1e-12);
      CHECK(blo <= b.upper + 1e-12);
    }
  }
}

TEST_CASE("ball volume at q1 of the gasket") {
  auto sys = sys_of(SystemKind::Sierpinski);
  SelfSimilarMeasure mu(Tuple{1.0 / 3, 1.0 / 3, 1.0 / 3}, sys);
  const Vec2 q1 = sys->hull[0];
  CHECK(ball_volume(mu, q1, 1.0).lower == 1.0);
  CHECK(ball_volume(mu, q1, 3.0).upper == 1.0);
  for (int n = 1; n <= 8; ++n) {
    const auto b = ball_volume(mu, q1, std::ldexp(1.0, -n));
    const double v = std::pow(3.0, -n);
    CHECK(b.lower >= v / 9);
    CHECK(b.upper <= 9 * v);
    const auto [blo, bhi] = brute_ball(mu, q1, std::ldexp(1.0, -n), static_cast<std::size_t>(n + 2));
    CHECK(b.lower >= blo - 1e-15);
    CHECK(b.upper <= bhi + 1e-15);
  }
}

TEST_CASE("ball volume is monotone and comparable to p_w and H_p") {
  for (double lambda : {0.25, 0.15}) {
    auto sys = sys_of(SystemKind::KLambda, lambda);
    const Tuple p{0.28, 0.28, 0.28, 0.16};
    SelfSimilarMeasure mu(p, sys);
    const ScalingFunction hp(sys->ratios, p, sys->diameter, sys);
    double lo_pw = INFINITY, hi_pw = 0, lo_h = INFINITY, hi_h = 0, bracket = 1;
    for (int rep = 0; rep < 500; ++rep) {
      const auto x = point_from_address(*sys, random_address(4));
      const double r = std::exp(testing::uniform(std::log(1e-4), std::log(0.9)));
      const auto b = ball_volume(mu, x.coords, r);
      const auto b2 = ball_volume(mu, x.coords, r * 1.3);
      CHECK(b2.lower >= b.lower - 1e-15);
      CHECK(b2.upper >= b.upper - 1e-15);
      double tw = 1, pw = 1;
      for (std::size_t n = 1; tw > r / sys->diameter; ++n) {
        tw *= sys->ratios(x.address.digit(n));
        pw *= p(x.address.digit(n));
      }
      lo_pw = std::min(lo_pw, b.lower / pw);
      hi_pw = std::max(hi_pw, b.upper / pw);
      const double h = hp(x, r);
      lo_h = std::min(lo_h, b.lower / h);
      hi_h = std::max(hi_h, b.upper / h);
      bracket = std::max(bracket, b.upper / b.lower);
    }
    MESSAGE("lambda=" << lambda << " V/p_w in [" << lo_pw << "," << hi_pw << "], V/H_p in [" << lo_h << "," << hi_h
                      << "], bracket " << bracket);
    CHECK(lo_pw > 1e-2);
    CHECK(hi_pw < 1e2);
    CHECK(hi_h / lo_h < 1e4);
    CHECK(bracket < 20);
  }
}

TEST_CASE("doubling verdicts") {
  auto sg = sys_of(SystemKind::Sierpinski);
  SelfSimilarMeasure usg(Tuple{1.0 / 3, 1.0 / 3, 1.0 / 3}, sg);
  const auto rsg = doubling_check(usg, doubling_samples(usg, 20, 2, 14));
  CHECK(rsg.verdict == Verdict::Pass);
  CHECK(*rsg.get("alpha_fit") == doctest::Approx(std::log2(3.0)).epsilon(0.02));

  auto k = sys_of(SystemKind::KLambda);
  SelfSimilarMeasure good(Tuple{0.3, 0.3, 0.3, 0.1}, k);
  CHECK(doubling_check(good, doubling_samples(good, 20, 2, 14)).verdict == Verdict::Pass);

  SelfSimilarMeasure bad(Tuple{0.2, 0.3, 0.3, 0.2}, k);
  const auto rb = doubling_check(bad, doubling_samples(bad, 20, 2, 14));
  CHECK(rb.verdict == Verdict::Fail);
  REQUIRE(rb.failure_witness);
  CHECK(rb.failure_witness->find("2111111") != std::string::npos);
  CHECK(rb.failure_witness->find("1222222") != std::string::npos);

  const auto s = doubling_samples(bad, 3, 2, 4, 20, 7);
  const auto t = doubling_samples(bad, 3, 2, 4, 20, 7);
  REQUIRE(s.size() == t.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i].x.coords == t[i].x.coords);
}
