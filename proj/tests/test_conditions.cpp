#include <doctest.h>

#include <cmath>
#include <deque>

#include "sslab/conditions.hpp"
#include "sslab/errors.hpp"
#include "support.hpp"

using namespace sslab;

namespace {
FractalSystem K(double l) { return build_system(SystemKind::KLambda, {.lambda = l}); }

// Zeta with the first three entries pairwise at least 15% apart.
Tuple separated_zeta() {
  for (;;) {
    std::vector<double> z{testing::uniform(0.05, 0.6), testing::uniform(0.05, 0.6), testing::uniform(0.05, 0.6),
                          testing::uniform(0.05, 0.6)};
    bool ok = true;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) ok = ok && std::max(z[i], z[j]) >= 1.15 * std::min(z[i], z[j]);
    if (ok) return Tuple(z);
  }
}

// All intersecting pairs of a partition via cells_intersect.
double brute_av(const FractalSystem& sys, const Tuple& theta, const Tuple& zeta, double r, std::size_t& pairs) {
  const auto words = partition(theta, r).words;
  double worst = 1;
  pairs = 0;
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = i + 1; j < words.size(); ++j)
      if (cells_intersect(sys, words[i], words[j])) {
        ++pairs;
        const double q = tuple_weight(words[i], zeta) / tuple_weight(words[j], zeta);
        worst = std::max({worst, q, 1 / q});
      }
  return worst;
}

// Shortest chain over the whole partition using exact cell intersections.
std::size_t brute_chain(const FractalSystem& sys, const Tuple& theta, const Vec2& x, const Vec2& y, double r) {
  const auto words = partition(theta, r).words;
  std::vector<std::vector<Vec2>> hulls;
  for (const auto& w : words) hulls.push_back(map_hull(sys, cell_frame(sys, w).affine));
  std::vector<std::size_t> dist(words.size(), 0);
  std::deque<std::size_t> q;
  for (std::size_t i = 0; i < words.size(); ++i)
    if (point_hull_distance(x, hulls[i]) < 1e-9) dist[i] = 1, q.push_back(i);
  while (!q.empty()) {
    const auto i = q.front();
    q.pop_front();
    if (point_hull_distance(y, hulls[i]) < 1e-9) return dist[i];
    for (std::size_t j = 0; j < words.size(); ++j)
      if (!dist[j] && cells_intersect(sys, words[i], words[j])) dist[j] = dist[i] + 1, q.push_back(j);
  }
  return 0;
}
}  // namespace

TEST_CASE("AV pair enumeration matches the brute-force oracle") {
  for (double lambda : {0.25, 0.1, 1.0 / std::sqrt(13.0)}) {
    const auto k = K(lambda);
    const Tuple zeta{0.2, 0.3, 0.25, 0.4};
    const auto rep = check_av(k, k.ratios, zeta, dyadic_ladder(2, 5));
    for (std::size_t i = 0; i < 4; ++i) {
      std::size_t pairs = 0;
      const double r = rep.samples[i].input[0];
      const double w = brute_av(k, k.ratios, zeta, r, pairs);
      CHECK(rep.samples[i].value == doctest::Approx(w).epsilon(1e-14));
      CHECK(rep.samples[i].input[1] == doctest::Approx(static_cast<double>(pairs)));
    }
  }
}

TEST_CASE("AV verdicts on K_lambda") {
  const auto k = K(0.25);
  const auto res = dyadic_ladder(3, 9);
  const Tuple eq{0.2, 0.2, 0.2, 0.5};
  const auto pass = check_av(k, k.ratios, eq, res);
  CHECK(pass.verdict == Verdict::Pass);
  CHECK(pass.witnessed_constant <= std::pow(eq.max() / eq.min(), 4));

  const auto fail = check_av(k, k.ratios, Tuple{0.2, 0.3, 0.2, 0.2}, res);
  CHECK(fail.verdict == Verdict::Fail);
  REQUIRE(fail.failure_witness);

  const auto self = check_av(k, k.ratios, k.ratios, res);
  CHECK(self.verdict == Verdict::Pass);
  CHECK(self.witnessed_constant <= 1 / k.ratios.min());

  for (int rep = 0; rep < 20; ++rep) {
    const double a = testing::uniform(0.05, 0.6);
    const Tuple same{a, a, a, testing::uniform(0.05, 0.6)};
    CHECK(check_av(k, k.ratios, same, res).verdict == Verdict::Pass);
    CHECK(check_av(k, k.ratios, separated_zeta(), res).verdict == Verdict::Fail);
  }
}

TEST_CASE("AV growth along the 12..2 / 21..1 contact") {
  const auto k = K(0.25);
  const Tuple zeta{0.2, 0.3, 0.2, 0.2};
  const auto rep = check_av(k, k.ratios, zeta, dyadic_ladder(3, 9));
  CHECK(rep.verdict == Verdict::Fail);
  REQUIRE(rep.failure_witness);
  for (std::size_t m = 1; m <= 9; ++m) {
    const Word a = Word{1} + Word::repeat(2, m), b = Word{2} + Word::repeat(1, m);
    REQUIRE(cells_intersect(k, a, b));
    CHECK(tuple_weight(a, zeta) / tuple_weight(b, zeta) == doctest::Approx(std::pow(1.5, m - 1.0)));
    // the reported maximum dominates this pair at the matching resolution
    if (m >= 3) CHECK(rep.samples[m - 3].value >= std::pow(1.5, m - 1.0) * (1 - 1e-12));
  }
}

TEST_CASE("WOC counts") {
  const auto sg = build_system(SystemKind::Sierpinski);
  const auto pts = default_point_samples(sg, 4, 40);
  const auto res = dyadic_ladder(2, 8);
  const auto r = check_woc(sg, sg.ratios, 0.25, res, pts);
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.witnessed_constant <= 10);
  for (const auto& s : r.samples) {
    double brute = 0;
    for (const auto& x : pts) {
      double n = 0;
      for (const auto& w : partition(sg.ratios, s.input[0]).words)
        n += point_hull_distance(x, map_hull(sg, cell_frame(sg, w).affine)) < 0.25 * s.input[0];
      brute = std::max(brute, n);
    }
    CHECK(s.value == brute);
  }

  // Monotone in c1.
  double prev = 0;
  for (double c1 : {0.1, 0.25, 0.5, 1.0}) {
    const double c = check_woc(sg, sg.ratios, c1, res, pts).witnessed_constant;
    CHECK(c >= prev);
    prev = c;
  }

  const auto iv = build_system(SystemKind::Interval);
  const auto half = check_woc(iv, iv.ratios, 0.25, dyadic_ladder(1, 12), {Vec2(0.5, 0)});
  CHECK(half.verdict == Verdict::Fail);
  REQUIRE(half.failure_witness);
  for (std::size_t n = 1; n <= 12; ++n) CHECK(half.samples[n - 1].value == 2.0 * n + 1);

  const auto k = K(0.25);
  CHECK(check_woc(k, k.ratios, 0.25, res, default_point_samples(k, 3, 40)).verdict == Verdict::Pass);
}

TEST_CASE("CP chains") {
  const auto k = K(0.25);
  const auto res = dyadic_ladder(2, 7);
  const auto samples = cp_samples(k, k.ratios, c0(0.25), default_point_samples(k, 3, 20), res);
  REQUIRE(samples.size() > 100);
  const auto rep = check_cp(k, k.ratios, c0(0.25), samples);
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.witnessed_constant <= 5);

  // Larger c2 forces multi-cell chains; compare with the global oracle at coarse r.
  const double c2 = 0.9;
  const auto wide = cp_samples(k, k.ratios, c2, default_point_samples(k, 2, 10), dyadic_ladder(2, 4));
  const auto wrep = check_cp(k, k.ratios, c2, wide);
  CHECK(wrep.verdict != Verdict::Fail);
  std::size_t longer = 0;
  for (std::size_t i = 0; i < wide.size(); ++i) {
    const auto L = brute_chain(k, k.ratios, wide[i].x, wide[i].y, wide[i].r);
    CHECK(wrep.samples[i].value == static_cast<double>(L));
    longer += L > 2;
  }
  CHECK(longer > 0);

  const auto cantor = build_system(SystemKind::Cantor);
  std::vector<double> cres;
  for (int n = 1; n <= 7; ++n) cres.push_back(1.01 * std::pow(3.0, -n));
  const auto cpts = default_point_samples(cantor, 4, 20);
  const auto big = check_cp(cantor, cantor.ratios, 2.5, cp_samples(cantor, cantor.ratios, 2.5, cpts, cres));
  CHECK(big.verdict == Verdict::Fail);
  CHECK(big.failure_witness);
  const auto small = check_cp(cantor, cantor.ratios, 1.0 / 16, cp_samples(cantor, cantor.ratios, 1.0 / 16, cpts, cres));
  CHECK(small.verdict == Verdict::Pass);
  CHECK(small.witnessed_constant == 1);
}

TEST_CASE("epsilon chains on the unit interval") {
  const auto iv = build_system(SystemKind::Interval, {.interval_maps = 2});
  for (double eps : {0.3, 0.2, 0.11, 0.05, 0.013}) {
    // Grid of mesh 2^-n <= eps/2; the longest admissible step is the largest grid multiple below eps.
    const int n = static_cast<int>(std::ceil(std::log2(2 / eps)));
    const double h = std::ldexp(1.0, -n);
    const double step = std::ceil(eps / h - 1) * h;
    const auto expect = static_cast<std::size_t>(std::ceil(1 / step));
    const auto N = chain_count(iv, Metric::Euclidean, Vec2(0, 0), Vec2(1, 0), eps);
    CHECK(N == expect);
    const auto truth = static_cast<std::size_t>(std::floor(1 / eps)) + 1;
    CHECK(N >= truth);
    CHECK(N <= 2 * truth);
  }
  CHECK(chain_count(iv, Metric::Snowflake, Vec2(0.3, 0), Vec2(0.3, 0), 0.01) == 1);
}

TEST_CASE("CH verdicts") {
  const auto k = K(0.25);
  const auto rk = check_ch(k, Metric::Euclidean, ch_pairs(k), dyadic_ladder(2, 6));
  CHECK(rk.verdict == Verdict::Pass);
  CHECK(rk.witnessed_constant <= *rk.get("C_CH_envelope"));

  const auto sg = build_system(SystemKind::Sierpinski);
  const auto rs = check_ch(sg, Metric::Snowflake, ch_pairs(sg, 2), dyadic_ladder(1, 5));
  CHECK(rs.verdict == Verdict::Fail);
  REQUIRE(rs.failure_witness);
  std::vector<double> per;
  double best = 0, e = -1;
  for (const auto& s : rs.samples) {
    if (e >= 0 && s.input[0] != e) per.push_back(best), best = 0;
    e = s.input[0];
    best = std::max(best, s.value);
  }
  per.push_back(best);
  REQUIRE(per.size() == 5);
  for (std::size_t i = 1; i < per.size(); ++i) CHECK(per[i] >= 1.5 * per[i - 1]);
}

TEST_CASE("WOC and CH passing implies CP passing") {
  for (const auto& sys : {K(0.25), build_system(SystemKind::Sierpinski), K(0.15)}) {
    const auto res = dyadic_ladder(2, 6);
    const auto pts = default_point_samples(sys, 3, 20);
    const bool woc = check_woc(sys, sys.ratios, 0.25, res, pts).passed();
    const bool ch = check_ch(sys, Metric::Euclidean, ch_pairs(sys, 2), dyadic_ladder(2, 6)).passed();
    const auto cp = check_cp(sys, sys.ratios, 0.25, cp_samples(sys, sys.ratios, 0.25, pts, res));
    CHECK(woc);
    CHECK(ch);
    CHECK(cp.passed());
    // CP at smaller c2 passes as well.
    CHECK(check_cp(sys, sys.ratios, 0.05, cp_samples(sys, sys.ratios, 0.05, pts, res)).passed());
  }
}
