// Acceptance run: one line per criterion, exit status 1 if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "sslab/conditions.hpp"
#include "sslab/geometry.hpp"
#include "sslab/heat.hpp"
#include "sslab/measure.hpp"
#include "sslab/network.hpp"
#include "sslab/scaling.hpp"
#include "sslab/words.hpp"

using namespace sslab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using SysPtr = std::shared_ptr<const FractalSystem>;

std::mt19937_64 rng(20240611);

double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
int uniform_int(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

Word random_word(std::size_t len, int n) {
  std::vector<Digit> d(len);
  for (auto& x : d) x = static_cast<Digit>(uniform_int(1, n));
  return Word(d);
}

Tuple random_probability(std::size_t n) {
  std::vector<double> w(n);
  double s = 0;
  for (auto& x : w) s += (x = uniform(0.2, 1.0));
  for (auto& x : w) x /= s;
  return Tuple(w);
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// Neumaier summation, so the check measures the partition rather than rounding.
double accurate_sum(const std::vector<double>& v) {
  double s = 0, c = 0;
  for (double x : v) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}

// Fixtures shared between criteria.
const SysPtr& sg() {
  static const SysPtr s = std::make_shared<const FractalSystem>(build_system(SystemKind::Sierpinski));
  return s;
}
const SysPtr& k14() {
  static const SysPtr s = std::make_shared<const FractalSystem>(build_system(SystemKind::KLambda, {.lambda = 0.25}));
  return s;
}

const Tuple kP{0.3, 0.3, 0.3, 0.1};
constexpr double kS = 0.5;

double k_b() {
  static const double b = solve_b(*k14(), kS, 5).b;
  return b;
}

const WFunction& k_w() {
  static const WFunction w = build_w(0.25, kS, k_b(), kP);
  return w;
}

ScalingFunction sg_w() { return ScalingFunction(sg()->ratios, Tuple{0.2, 0.2, 0.2}, sg()->diameter, sg()); }

std::shared_ptr<const SelfSimilarMeasure> uniform_measure(const SysPtr& sys) {
  const auto n = sys->size();
  return std::make_shared<const SelfSimilarMeasure>(Tuple(std::vector<double>(n, 1.0 / static_cast<double>(n))), sys);
}

const HeatSemigroup& sg_heat(std::size_t level) {
  static std::map<std::size_t, std::unique_ptr<HeatSemigroup>> cache;
  auto& slot = cache[level];
  if (!slot) slot = std::make_unique<HeatSemigroup>(build_network(*sg(), Tuple{0.6, 0.6, 0.6}, level), uniform_measure(sg()));
  return *slot;
}

const HeatSemigroup& k_heat(std::size_t level) {
  static std::map<std::size_t, std::unique_ptr<HeatSemigroup>> cache;
  auto& slot = cache[level];
  if (!slot)
    slot = std::make_unique<HeatSemigroup>(build_network(*k14(), resistance_tuple(*k14(), k_b(), kS), level),
                                           std::make_shared<const SelfSimilarMeasure>(kP, k14()));
  return *slot;
}

// Criteria ------------------------------------------------------------------

Outcome unit_triangle() {
  const auto net = make_network(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
  const auto t0 = std::chrono::steady_clock::now();
  const double r = effective_resistance(net, {0}, {1});
  const double ms = ms_since(t0);
  const double err = std::abs(r - 2.0 / 3);
  return {err <= 1e-12 && ms < 1.0, fmt::format("R(q1,q2)={:.17g} err={:.2e} time={:.3f} ms", r, err, ms)};
}

Outcome solve_b_gasket() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = solve_b(*sg(), 0.5, 5);
  double drift = 0;
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto net = build_network(*sg(), resistance_tuple(*sg(), res.b, 0.5), n);
    drift = std::max(drift, std::abs(corner_resistance(net) - 2.0 / 3));
  }
  const double ms = ms_since(t0);
  const bool ok = std::abs(res.b - 0.6) <= 1e-6 && drift <= 1e-6 && ms < 30e3;
  return {ok, fmt::format("b={:.10f} max|R_n-2/3|={:.2e} (n=1..5) time={:.0f} ms", res.b, drift, ms)};
}

Outcome closed_forms() {
  const double ls = lambda_star(0.25), c = c0(0.25);
  return {ls == 0.5 && c == 3.0 / 512, fmt::format("lambda*={:.17g} c0={:.17g} (3/512={:.17g})", ls, c, 3.0 / 512)};
}

Outcome partitions() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t words = 0, bad_bounds = 0;
  double worst_sum = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto n = static_cast<std::size_t>(uniform_int(2, 4));
    std::vector<double> th(n);
    double total = 0;
    for (auto& x : th) total += (x = uniform(0.2, 1.0));
    const double target = uniform(0.6, 1.2);
    for (auto& x : th) x = std::min(0.9, x * target / total);
    const Tuple theta(th);
    const double r = std::exp(uniform(std::log(1e-4), std::log(0.5)));
    for (const auto& w : partition(theta, r).words) {
      const double tw = tuple_weight(w, theta);
      if (!(theta.min() * r < tw && tw <= r)) ++bad_bounds;
      ++words;
    }
    const Tuple p = random_probability(n);
    std::vector<double> mass;
    for (const auto& w : partition(p, r).words) mass.push_back(tuple_weight(w, p));
    worst_sum = std::max(worst_sum, std::abs(accurate_sum(mass) - 1));
  }
  const double ms = ms_since(t0);
  return {bad_bounds == 0 && worst_sum <= 1e-12 && ms < 10e3,
          fmt::format("{} words, {} outside (theta_min r, r], max|sum p_w - 1|={:.2e} time={:.0f} ms", words, bad_bounds,
                      worst_sum, ms)};
}

// Ratio H(x,r)/zeta_w over every partition word w whose cell holds x.
double sandwich_worst(const ScalingFunction& sf, const SysPtr& sys, double c0, std::size_t& samples) {
  double worst = 1;
  const auto n = static_cast<int>(sys->size());
  for (int rep = 0; rep < 500; ++rep) {
    const AddressStream a(random_word(static_cast<std::size_t>(uniform_int(0, 6)), n),
                          random_word(static_cast<std::size_t>(uniform_int(1, 3)), n));
    const auto x = canonical_point(*sys, a);
    const double r = std::exp(uniform(-12, -0.01));
    for (const auto& w : gamma_cover(*sys, sf.theta(), x.coords, 1e-12, r)) {
      const double ratio = sf(x, r * sys->diameter) / tuple_weight(w, sf.zeta());
      worst = std::max({worst, ratio * (1 - 1e-12), 1 / ratio * (1 - 1e-12)});
      ++samples;
    }
  }
  return worst / c0;
}

Outcome scaling_sandwich() {
  std::string detail;
  bool ok = true;
  const auto res = dyadic_ladder(3, 9);
  const std::vector<std::pair<std::string, ScalingFunction>> fixtures{{"SG", sg_w()}, {"K", k_w().w}};
  for (const auto& [name, sf] : fixtures) {
    const auto& sys = name == "SG" ? sg() : k14();
    const double c_av = check_av(*sys, sf.theta(), sf.zeta(), res).witnessed_constant;
    const double c0 = c_av / sf.zeta().min();
    std::size_t samples = 0;
    const double used = sandwich_worst(sf, sys, c0, samples);
    ok = ok && used <= 1;
    detail += fmt::format("{}: worst/C0={:.3f} over {} (x,r,w) [C0={:.3g}]; ", name, used, samples, c0);
  }
  const auto inh = inhomogeneity_report(k_w(), dyadic_ladder(4, 12));
  const double e1 = std::abs(inh.slope_q1 - k_w().beta.beta1) / k_w().beta.beta1;
  const double e4 = std::abs(inh.slope_q4 - k_w().beta.beta4) / k_w().beta.beta4;
  ok = ok && e1 <= 0.02 && e4 <= 0.02;
  detail += fmt::format("slopes q1={:.4f} (beta1 {:.4f}, {:.2f}%) q4={:.4f} (beta4 {:.4f}, {:.2f}%)", inh.slope_q1,
                        k_w().beta.beta1, 100 * e1, inh.slope_q4, k_w().beta.beta4, 100 * e4);
  return {ok, detail};
}

Outcome walk_dimension() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& hs = sg_heat(6);
  const auto fit = fit_walk_dimension(hs, hs.network().corners, log_ladder(6.4e-4, 1e-2, 20), std::log2(3.0));
  const double ms = ms_since(t0);
  const double target = std::log2(5.0), err = std::abs(fit.beta - target) / target;
  return {fit.verdict == Verdict::Pass && err <= 0.05 && ms < 300e3,
          fmt::format("beta_hat={:.4f} vs log2 5={:.4f} ({:.2f}%) r2={:.5f} time={:.0f} ms", fit.beta, target, 100 * err,
                      fit.r2, ms)};
}

Outcome doubling_verdicts() {
  const auto k = k14();
  int equal_pass = 0, unequal_fail = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const double a = uniform(0.1, 0.3);
    const SelfSimilarMeasure eq(Tuple{a, a, a, 1 - 3 * a}, k);
    if (doubling_check(eq, doubling_samples(eq, 20, 2, 14)).verdict == Verdict::Pass) ++equal_pass;
    Tuple p = random_probability(4);
    const auto apart = [](double a, double b) { return std::abs(a - b) >= 0.15 * std::max(a, b); };
    while (!apart(p.at(0), p.at(1)) || !apart(p.at(1), p.at(2)) || !apart(p.at(0), p.at(2))) p = random_probability(4);
    const SelfSimilarMeasure ne(p, k);
    if (doubling_check(ne, doubling_samples(ne, 20, 2, 14)).verdict == Verdict::Fail) ++unequal_fail;
  }

  const auto iv = build_system(SystemKind::Interval);
  const auto woc = check_woc(iv, iv.ratios, 0.25, dyadic_ladder(1, 12), {Vec2(0.5, 0)});
  int exact = 0;
  for (std::size_t n = 1; n <= 12; ++n) exact += woc.samples.at(n - 1).value == 2.0 * static_cast<double>(n) + 1;

  const auto ch = check_ch(*sg(), Metric::Snowflake, ch_pairs(*sg(), 2), dyadic_ladder(1, 5));
  std::vector<double> per;
  double best = 0, e = -1;
  for (const auto& s : ch.samples) {
    if (e >= 0 && s.input[0] != e) per.push_back(best), best = 0;
    e = s.input[0];
    best = std::max(best, s.value);
  }
  per.push_back(best);
  double growth = INFINITY;
  for (std::size_t i = per.size() >= 5 ? per.size() - 4 : 1; i < per.size(); ++i) growth = std::min(growth, per[i] / per[i - 1]);
  const bool ok = equal_pass == 20 && unequal_fail == 20 && exact == 12 && woc.verdict == Verdict::Fail &&
                  per.size() >= 5 && growth >= 1.5 && ch.verdict == Verdict::Fail;
  return {ok, fmt::format("VD pass {}/20 (p1=p2=p3), fail {}/20 (unequal); WOC 2n+1 exact {}/12; CH min growth {:.3f} over 4 halvings",
                          equal_pass, unequal_fail, exact, growth)};
}

Outcome resistance_bands() {
  const std::vector<std::size_t> levels{3, 4, 5, 6};
  const Tuple rs{0.6, 0.6, 0.6};
  const auto s1 = resistance_level_sweep(*sg(), rs, ScalingFunction(sg()->ratios, rs, sg()->diameter, sg()), levels);
  const Tuple rk = resistance_tuple(*k14(), k_b(), kS);
  const auto s2 = resistance_level_sweep(*k14(), rk, ScalingFunction(k14()->ratios, rk, k14()->diameter, k14()), levels);
  const auto band = [](const LevelSweep& s) {
    return fmt::format("[{:.3f}, {:.3f}] width {:.3f}", *std::min_element(s.lo.begin(), s.lo.end()),
                       *std::max_element(s.hi.begin(), s.hi.end()), s.width);
  };
  return {s1.verdict == Verdict::Pass && s2.verdict == Verdict::Pass && s1.width <= 100 && s2.width <= 100,
          fmt::format("R/H levels 3-6: SG {}; K {}", band(s1), band(s2))};
}

Outcome two_sided_envelope() {
  const auto& w = k_w();
  const double b1 = w.beta.beta1, b4 = w.beta.beta4;
  std::vector<double> cp, cm;
  std::string detail = fmt::format("b={:.7f} beta1={:.4f} beta4={:.4f}; ", k_b(), b1, b4);
  bool ok = b1 >= b4;
  for (std::size_t n : {5, 6}) {
    const auto& hs = k_heat(n);
    const auto rep = check_two_sided(hs, w.w, b1, heat_pairs(hs, 8, 25), log_ladder(1e-3, 0.5, 10));
    const double plus = *rep.get("c_plus"), minus = *rep.get("c_minus");
    cp.push_back(plus);
    cm.push_back(minus);
    ok = ok && rep.verdict == Verdict::Pass && plus > 0 && minus > 0 && minus / plus <= 50;
    detail += fmt::format("level {}: c+={:.4f} c-={:.4f} ratio={:.3f}; ", n, plus, minus, minus / plus);
  }
  const double drift_p = std::max(cp[0], cp[1]) / std::min(cp[0], cp[1]);
  const double drift_m = std::max(cm[0], cm[1]) / std::min(cm[0], cm[1]);
  ok = ok && drift_p <= 2 && drift_m <= 2;
  detail += fmt::format("level drift c+ x{:.3f} c- x{:.3f}", drift_p, drift_m);
  return {ok, detail};
}

Outcome chain_costs() {
  bool ok = true;
  std::string detail;
  const auto k2 = build_w(0.25, 0.9, solve_b(*k14(), 0.9, 5).b, Tuple{0.2, 0.2, 0.2, 0.4});
  const std::vector<std::tuple<std::string, SysPtr, ScalingFunction>> cases{
      {"SG", sg(), sg_w()}, {"K(p=.3,.3,.3,.1)", k14(), k_w().w}, {"K(p=.2,.2,.2,.4)", k14(), k2.w}};
  for (const auto& [name, sys, w] : cases) {
    const double psi1 = w.zeta().at(0);
    double lo = INFINITY, hi = 0, ms10 = 0;
    bool reachable = true;
    for (std::size_t n = 3; n <= 10; ++n) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto g = build_network(*sys, sys->ratios, n, {.level_cap = 12});
      const auto c = minimax_chain_cost(g, *sys, w, g.corners[0], g.corners[1], std::size_t{2} << n);
      if (n == 10) ms10 = ms_since(t0);
      reachable = reachable && c.reachable;
      const double q = c.cost / std::pow(psi1, static_cast<double>(n));
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    ok = ok && reachable && hi / lo <= 10 && ms10 < 120e3;
    detail += fmt::format("{}: cost/psi1^n in [{:.3f}, {:.3f}] n=10 {:.0f} ms; ", name, lo, hi, ms10);
  }
  return {ok, detail};
}

Outcome semigroup_identities() {
  double sym = 0, ck = 0, cons = 0, dom = 0;
  std::size_t checked = 0;
  const auto probe = [&](const HeatSemigroup& hs) {
    for (int rep = 0; rep < 4; ++rep) {
      const auto x = static_cast<std::size_t>(uniform_int(0, static_cast<int>(hs.size()) - 1));
      const auto y = static_cast<std::size_t>(uniform_int(0, static_cast<int>(hs.size()) - 1));
      const double t = std::exp(uniform(std::log(1e-4), 0.0)), s = std::exp(uniform(std::log(1e-4), 0.0));
      const auto rx = hs.kernel_row(t, x), ry = hs.kernel_row(s, y), rxy = hs.kernel_row(t + s, x);
      const double pxy = rxy[static_cast<Eigen::Index>(y)];
      const double ptxy = hs.kernel(t, x, y), ptyx = hs.kernel(t, y, x);
      sym = std::max(sym, std::abs(ptxy - ptyx) / std::max(1.0, ptxy));
      ck = std::max(ck, std::abs((rx.array() * ry.array() * hs.measure().array()).sum() - pxy) / std::max(1.0, pxy));
      cons = std::max(cons, std::abs(rx.dot(hs.measure()) - 1));
      const auto d = hs.dirichlet_row(hs.ball(x, uniform(0.05, 0.6)), t, x);
      dom = std::max({dom, (d - rx).maxCoeff() / std::max(1.0, rx.maxCoeff()), -d.minCoeff()});
      ++checked;
    }
  };
  for (std::size_t n = 1; n <= 6; ++n) probe(sg_heat(n));
  for (std::size_t n = 1; n <= 6; ++n) probe(k_heat(n));
  const double worst = std::max({sym, ck, cons, dom});
  return {worst <= 1e-10, fmt::format("SG and K levels 1-6, {} probes: symmetry {:.1e} CK {:.1e} mass {:.1e} domination {:.1e}",
                                      checked, sym, ck, cons, dom)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"unit-triangle effective resistance", unit_triangle},
      {"renormalization b on the gasket", solve_b_gasket},
      {"K_1/4 closed forms", closed_forms},
      {"partition properties", partitions},
      {"scaling-function sandwich and slopes", scaling_sandwich},
      {"gasket walk dimension", walk_dimension},
      {"doubling, WOC and CH verdicts", doubling_verdicts},
      {"resistance comparability bands", resistance_bands},
      {"two-sided heat-kernel envelope", two_sided_envelope},
      {"minimax chain costs", chain_costs},
      {"semigroup identities", semigroup_identities},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failed += !o.pass;
    fmt::print("[{}] {:>2} {:<38} {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail,
               ms_since(t0) / 1000);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed ? 1 : 0;
}
