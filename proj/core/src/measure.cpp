#include "sslab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <fmt/format.h>

#include "sslab/errors.hpp"

namespace sslab {

SelfSimilarMeasure::SelfSimilarMeasure(Tuple weights, std::shared_ptr<const FractalSystem> sys)
    : p_(std::move(weights)), sys_(std::move(sys)) {
  if (!sys_) throw DomainError("measure: missing system");
  if (p_.size() != sys_->size())
    throw DomainError(fmt::format("measure: {} weights for {} maps", p_.size(), sys_->size()));
  if (!p_.is_probability(1e-12)) throw DomainError(fmt::format("measure: weights {} do not sum to 1", p_.str()));
}

namespace {

struct CellUpper {
  const FractalSystem& sys;
  const Tuple& p;
  const Word& w;
  std::vector<Vec2> hull_w;
  double tol;
  std::size_t max_len, cap, visited = 0;
  double upper = 0.0;

  bool run(Word& v, const Similitude& f, double pv) {
    for (Digit d = 1; d <= sys.size(); ++d) {
      v.push_back(d);
      const Similitude g = compose(f, sys.maps[d - 1]);
      const double pu = pv * p(d);
      bool ok = true;
      if (++visited > cap) ok = false;
      else if (v.size() <= w.size() && w.has_prefix(v)) {
        if (v.size() == w.size()) upper += pu;
        else ok = run(v, g, pu);
      } else if (hull_distance(map_hull(sys, g), hull_w) <= tol) {
        if (v.size() >= max_len) upper += pu;
        else ok = run(v, g, pu);
      }
      v.pop_back();
      if (!ok) return false;
    }
    return true;
  }
};

}  // namespace

VolumeBound cell_measure_bounds(const SelfSimilarMeasure& mu, const Word& w, std::size_t refine, std::size_t cell_cap) {
  const auto& sys = mu.system();
  check_digits(w, sys.size());
  const double pw = mu.weight(w);
  if (w.empty()) return {1.0, 1.0, 0};
  VolumeBound b{pw, 1.0, 0};
  const auto hull_w = map_hull(sys, cell_frame(sys, w).affine);
  // Deepen until the cap is hit; every completed depth is a valid certificate.
  for (std::size_t k = 1; k <= refine; ++k) {
    CellUpper walk{sys, mu.weights(), w, hull_w, 1e-12 * sys.diameter, w.size() + k, cell_cap};
    Word v;
    if (!walk.run(v, Similitude{}, 1.0)) break;
    b.upper = std::min(b.upper, walk.upper);
    b.depth = k;
  }
  if (auto c = mu.cell_constant()) b.upper = std::min(b.upper, *c * pw);
  b.upper = std::max(b.upper, b.lower);
  return b;
}

VolumeBound ball_volume(const SelfSimilarMeasure& mu, const Vec2& x, double r, const MeasureOptions& opt) {
  const auto& sys = mu.system();
  if (!(r > 0)) throw DomainError(fmt::format("ball_volume: radius {} not positive", r));
  if (r >= sys.diameter) return {1.0, 1.0, opt.refine};
  const double delta = r / (2 * sys.diameter) * std::pow(sys.ratios.max(), static_cast<double>(opt.refine));
  VolumeBound b{0.0, 0.0, opt.refine};
  std::size_t visited = 0;
  walk_partition_cells(
      sys, sys.ratios, delta,
      [&](const CellView& c, bool leaf) {
        if (++visited > opt.cell_cap)
          throw ResourceError(fmt::format("ball_volume: more than {} cells at r={}", opt.cell_cap, r));
        const auto hull = map_hull(sys, c.affine);
        if (point_hull_distance(x, hull) >= r) return false;
        // A convex hull lies in the open ball iff all its vertices do.
        if (hull_max_distance(x, hull) < r) {
          b.lower += c.aux_weight;
          b.upper += c.aux_weight;
          return false;
        }
        if (leaf) b.upper += c.aux_weight;
        return true;
      },
      &mu.weights());
  b.upper = std::min(b.upper, 1.0);
  return b;
}

std::vector<VolumeSample> doubling_samples(const SelfSimilarMeasure& mu, std::size_t points, int k_lo, int k_hi,
                                           int contact_depth, std::uint64_t seed) {
  const auto& sys = mu.system();
  const int n = static_cast<int>(sys.size());
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> digit(1, n), len(1, 3);
  auto word = [&](int l) {
    std::vector<Digit> d(static_cast<std::size_t>(l));
    for (auto& v : d) v = static_cast<Digit>(digit(gen));
    return Word(d);
  };
  std::vector<VolumeSample> out;
  for (std::size_t i = 0; i < points; ++i) {
    const auto x = point_from_address(sys, AddressStream(word(8), word(len(gen))));
    for (int k = k_lo; k <= k_hi; ++k)
      out.push_back({fmt::format("random {} k={}", i, k), x, sys.diameter * std::ldexp(1.0, -k), 0});
  }

  std::size_t series = 0;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      const auto contact = cells_intersect(sys, Word{i}, Word{j});
      if (!contact || contact->kind == ContactKind::Overlap) continue;
      const Vec2 c = contact->point;
      const auto depth = static_cast<std::size_t>(contact_depth) + 1;
      auto side = [&](int a) {
        const Vec2 y = sys.maps[static_cast<std::size_t>(a - 1)].inverse()(c);
        return Word{a} + canonical_address(sys, y).take(depth);
      };
      const Word wi = side(i), wj = side(j);
      for (const auto& [near, far] : {std::pair{wi, wj}, std::pair{wj, wi}}) {
        ++series;
        for (int m = 2; m <= contact_depth; ++m) {
          const Word pre = near.prefix(static_cast<std::size_t>(m));
          const auto f = cell_frame(sys, pre).affine;
          // Move off the contact within the cell K_pre as far as a fixed point allows.
          Digit best = 1;
          double dist = -1;
          for (Digit d = 1; d <= sys.size(); ++d) {
            const double e = (f(sys.maps[d - 1].fixed_point()) - c).norm();
            if (e > dist) dist = e, best = d;
          }
          auto x = point_from_address(sys, AddressStream(pre, Word{static_cast<int>(best)}));
          out.push_back({fmt::format("contact {}|{} m={}", pre.str(), far.prefix(static_cast<std::size_t>(m)).str(), m),
                         std::move(x), 0.75 * dist, series});
        }
      }
    }
  return out;
}

ConditionReport doubling_check(const SelfSimilarMeasure& mu, const std::vector<VolumeSample>& samples,
                               const DoublingOptions& opt) {
  const auto& sys = mu.system();
  ConditionReport rep;
  rep.condition = Condition::VD;
  std::map<std::size_t, std::vector<std::pair<std::string, double>>> series;
  std::map<double, double, std::greater<>> rung_max;  // series 0, coarse to fine
  std::vector<double> lr, lv;
  double worst = 0;
  for (const auto& s : samples) {
    if (!(2 * s.r < sys.diameter)) throw DomainError(fmt::format("doubling_check: 2r={} not below diameter", 2 * s.r));
    const auto v1 = ball_volume(mu, s.x.coords, s.r, opt.measure);
    const auto v2 = ball_volume(mu, s.x.coords, 2 * s.r, opt.measure);
    const double ratio = v2.upper / v1.lower;
    worst = std::max(worst, ratio);
    rep.samples.push_back({s.label, {s.x.coords.x(), s.x.coords.y(), s.r}, ratio});
    if (s.series == 0) {
      auto& m = rung_max[s.r];
      m = std::max(m, ratio);
      lr.push_back(std::log(s.r));
      lv.push_back(0.5 * std::log(v1.lower * v1.upper));
    } else {
      series[s.series].emplace_back(s.label, ratio);
    }
  }

  std::vector<Verdict> verdicts;
  if (!rung_max.empty()) {
    std::vector<double> v;
    for (const auto& [r, m] : rung_max) v.push_back(m);
    verdicts.push_back(classify_trend(v, opt.trend));
  }
  for (const auto& [id, seq] : series) {
    std::vector<double> v;
    for (const auto& e : seq) v.push_back(e.second);
    const Verdict vd = classify_trend(v, opt.trend);
    verdicts.push_back(vd);
    if (vd == Verdict::Fail && !rep.failure_witness) {
      rep.failure_witness = fmt::format("{}: V(x,2r)/V(x,r) grows from {:.6g} to {:.6g} over the last {} rungs",
                                        seq.back().first, v[v.size() - 1 - opt.trend.rungs], v.back(), opt.trend.rungs);
    }
  }
  if (verdicts.empty()) rep.verdict = Verdict::Inconclusive;
  else if (std::count(verdicts.begin(), verdicts.end(), Verdict::Fail)) rep.verdict = Verdict::Fail;
  else if (std::all_of(verdicts.begin(), verdicts.end(), [](Verdict v) { return v == Verdict::Pass; }))
    rep.verdict = Verdict::Pass;
  else rep.verdict = Verdict::Inconclusive;

  const auto e = exponents(sys.ratios, mu.weights());
  rep.witnessed_constant = worst;
  rep.set("max_ratio", worst);
  rep.set("alpha_lower", e.lower);
  rep.set("alpha_upper", e.upper);
  if (lr.size() >= 2) rep.set("alpha_fit", fit_line(lr, lv).slope);
  rep.notes.push_back(fmt::format("{} ladders, refine {}", verdicts.size(), opt.measure.refine));
  return rep;
}

}  // namespace sslab
