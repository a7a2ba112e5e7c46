#include "sslab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <random>

#include <fmt/format.h>

#include "sslab/errors.hpp"
#include "spatial_hash.hpp"

namespace sslab {

namespace {

std::vector<double> coarse_to_fine(std::vector<double> r) {
  for (double v : r)
    if (!(v > 0 && v < 1)) throw DomainError(fmt::format("resolution {} not in (0,1)", v));
  std::sort(r.begin(), r.end(), std::greater<>());
  return r;
}

double hull_diameter(const std::vector<Vec2>& h) {
  double d = 0;
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = i + 1; j < h.size(); ++j) d = std::max(d, (h[i] - h[j]).norm());
  return d;
}

// Partition-tree node for the dual walk over intersecting pairs.
struct AvNode {
  Word w;
  Similitude f;
  double theta_w, zeta_w;
  std::vector<Vec2> hull;
  bool leaf;
};

struct AvWalk {
  const FractalSystem& sys;
  const Tuple& theta;
  const Tuple& zeta;
  double r;
  std::size_t cap, pairs = 0;
  double worst = 1.0;
  Word worst_a, worst_b;

  std::vector<AvNode> children(const AvNode& a) const {
    std::vector<AvNode> out;
    for (Digit d = 1; d <= sys.size(); ++d) {
      Word w = a.w;
      w.push_back(d);
      Similitude f = compose(a.f, sys.maps[d - 1]);
      const double t = a.theta_w * theta(d);
      auto hull = map_hull(sys, f);
      out.push_back({std::move(w), f, t, a.zeta_w * zeta(d), std::move(hull), t <= r});
    }
    return out;
  }

  double tol(const AvNode& a, const AvNode& b) const {
    return 1e-9 * sys.diameter * std::min(a.f.ratio, b.f.ratio);
  }

  void self(const AvNode& a) {
    if (a.leaf) return;
    const auto c = children(a);
    for (std::size_t i = 0; i < c.size(); ++i) {
      self(c[i]);
      for (std::size_t j = i + 1; j < c.size(); ++j) pair(c[i], c[j]);
    }
  }

  void pair(const AvNode& a, const AvNode& b) {
    if (hull_distance(a.hull, b.hull) > tol(a, b)) return;
    if (a.leaf && b.leaf) {
      if (++pairs > cap) throw ResourceError(fmt::format("check_av: more than {} intersecting pairs at r={}", cap, r));
      const double q = std::max(a.zeta_w / b.zeta_w, b.zeta_w / a.zeta_w);
      if (q > worst) {
        worst = q;
        worst_a = a.zeta_w < b.zeta_w ? a.w : b.w;
        worst_b = a.zeta_w < b.zeta_w ? b.w : a.w;
      }
      return;
    }
    const bool split_a = !a.leaf && (b.leaf || a.theta_w >= b.theta_w);
    if (split_a)
      for (const auto& c : children(a)) pair(c, b);
    else
      for (const auto& c : children(b)) pair(a, c);
  }
};

// Visits level-n cells whose hulls meet the open ball B(center, radius).
void walk_local_level(const FractalSystem& sys, std::size_t level, const Vec2& center, double radius,
                      const std::function<void(const Word&, const std::vector<Vec2>&)>& visit) {
  Word w;
  std::function<void(const Similitude&)> rec = [&](const Similitude& f) {
    for (Digit d = 1; d <= sys.size(); ++d) {
      const Similitude g = compose(f, sys.maps[d - 1]);
      const auto hull = map_hull(sys, g);
      if (point_hull_distance(center, hull) >= radius) continue;
      w.push_back(d);
      if (w.size() >= level) visit(w, hull);
      else rec(g);
      w.pop_back();
    }
  };
  if (level == 0) {
    visit(w, sys.hull);
    return;
  }
  rec(Similitude{});
}

std::size_t mesh_level(const FractalSystem& sys, double mesh) {
  if (mesh >= sys.diameter) return 0;
  return static_cast<std::size_t>(std::ceil(std::log(mesh / sys.diameter) / std::log(sys.ratios.max()) - 1e-12));
}

struct RegionCells {
  std::vector<Word> words;
  std::vector<std::vector<Vec2>> hulls;
  double max_diam = 0, min_diam = INFINITY;
};

RegionCells region_cells(const FractalSystem& sys, const Tuple& theta, const Vec2& x, double radius, double r) {
  RegionCells rc;
  walk_partition_cells(sys, theta, r, [&](const CellView& c, bool leaf) {
    auto hull = map_hull(sys, c.affine);
    if (point_hull_distance(x, hull) >= radius) return false;
    if (leaf) {
      const double d = hull_diameter(hull);
      rc.max_diam = std::max(rc.max_diam, d);
      rc.min_diam = std::min(rc.min_diam, d);
      rc.words.push_back(c.word);
      rc.hulls.push_back(std::move(hull));
    }
    return true;
  });
  return rc;
}

}  // namespace

ConditionReport check_av(const FractalSystem& sys, const Tuple& theta, const Tuple& zeta,
                         const std::vector<double>& resolutions, const AvOptions& opt) {
  if (theta.size() != sys.size() || zeta.size() != sys.size()) throw DomainError("check_av: tuple length mismatch");
  ConditionReport rep;
  rep.condition = Condition::AV;
  std::vector<double> per_r;
  Word last_a, last_b;
  for (double r : coarse_to_fine(resolutions)) {
    AvWalk walk{sys, theta, zeta, r, opt.pair_cap, 0, 1.0, {}, {}};
    walk.self(AvNode{Word{}, Similitude{}, 1.0, 1.0, sys.hull, false});
    per_r.push_back(walk.worst);
    rep.samples.push_back({fmt::format("r={:.6g} pairs={} worst {}/{}", r, walk.pairs, walk.worst_a.str(), walk.worst_b.str()),
                           {r, static_cast<double>(walk.pairs)}, walk.worst});
    last_a = walk.worst_a;
    last_b = walk.worst_b;
  }
  rep.verdict = classify_trend(per_r, opt.trend);
  rep.witnessed_constant = per_r.empty() ? NAN : *std::max_element(per_r.begin(), per_r.end());
  rep.set("max_ratio", rep.witnessed_constant);
  rep.set("zeta_bound", std::pow(zeta.max() / zeta.min(), 4));
  if (rep.verdict == Verdict::Fail)
    rep.failure_witness = fmt::format("intersecting cells {} / {} with zeta ratio {:.6g}, growing every rung", last_a.str(),
                                      last_b.str(), per_r.back());
  return rep;
}

std::vector<Vec2> default_point_samples(const FractalSystem& sys, std::size_t level, std::size_t random,
                                        std::uint64_t seed) {
  auto pts = level_vertices(sys, level);
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> digit(1, static_cast<int>(sys.size()));
  for (std::size_t i = 0; i < random; ++i) {
    std::vector<Digit> pre(10), cyc(2);
    for (auto& d : pre) d = static_cast<Digit>(digit(gen));
    for (auto& d : cyc) d = static_cast<Digit>(digit(gen));
    pts.push_back(address_coords(sys, AddressStream(Word(pre), Word(cyc))));
  }
  return pts;
}

ConditionReport check_woc(const FractalSystem& sys, const Tuple& theta, double c1, const std::vector<double>& resolutions,
                          const std::vector<Vec2>& ball_samples, const TrendOptions& trend) {
  if (!(c1 > 0)) throw DomainError(fmt::format("check_woc: c1={} must be positive", c1));
  ConditionReport rep;
  rep.condition = Condition::WOC;
  std::vector<double> per_r;
  Vec2 worst_x = Vec2::Zero();
  for (double r : coarse_to_fine(resolutions)) {
    double best = 0;
    for (const auto& x : ball_samples) {
      const double n = static_cast<double>(gamma_cover(sys, theta, x, c1 * sys.diameter * r, r).size());
      if (n > best) best = n, worst_x = x;
    }
    per_r.push_back(best);
    rep.samples.push_back({fmt::format("r={:.6g} x=({:.6g},{:.6g})", r, worst_x.x(), worst_x.y()), {r}, best});
  }
  rep.verdict = classify_counts(per_r, trend);
  rep.witnessed_constant = per_r.empty() ? NAN : *std::max_element(per_r.begin(), per_r.end());
  rep.set("L1", rep.witnessed_constant);
  rep.set("c1", c1);
  if (rep.verdict == Verdict::Fail) {
    std::string seq;
    for (double v : per_r) seq += fmt::format("{}{}", seq.empty() ? "" : ",", v);
    rep.failure_witness = fmt::format("cover counts near ({:.6g},{:.6g}) increase without bound: {}", worst_x.x(),
                                      worst_x.y(), seq);
  }
  return rep;
}

std::vector<CpSample> cp_samples(const FractalSystem& sys, const Tuple& theta, double c2, const std::vector<Vec2>& points,
                                 const std::vector<double>& resolutions, std::uint64_t seed) {
  (void)theta;
  std::mt19937_64 gen(seed);
  std::vector<CpSample> out;
  for (double r : coarse_to_fine(resolutions)) {
    const double reach = c2 * sys.diameter * r;
    const std::size_t level = mesh_level(sys, reach / 4);
    for (const auto& x : points) {
      std::vector<Vec2> near;
      walk_local_level(sys, level, x, reach, [&](const Word&, const std::vector<Vec2>& hull) {
        for (const auto& v : hull)
          if ((v - x).norm() < reach && (v - x).norm() > 1e-12 * sys.diameter) near.push_back(v);
      });
      if (near.empty()) continue;
      const auto far = std::max_element(near.begin(), near.end(),
                                        [&](const Vec2& a, const Vec2& b) { return (a - x).norm() < (b - x).norm(); });
      out.push_back({x, *far, r});
      std::uniform_int_distribution<std::size_t> pick(0, near.size() - 1);
      out.push_back({x, near[pick(gen)], r});
    }
  }
  return out;
}

ConditionReport check_cp(const FractalSystem& sys, const Tuple& theta, double c2, const std::vector<CpSample>& samples,
                         const TrendOptions& trend) {
  if (!(c2 > 0)) throw DomainError(fmt::format("check_cp: c2={} must be positive", c2));
  ConditionReport rep;
  rep.condition = Condition::CP;
  std::vector<std::pair<double, double>> per_sample;  // (r, L)
  for (const auto& s : samples) {
    const double d = (s.y - s.x).norm();
    if (!(d < c2 * sys.diameter * s.r)) continue;
    const double tol = 1e-9 * sys.diameter;
    const auto home = gamma_cover(sys, theta, s.x, tol, s.r);
    double reach = d;
    for (const auto& w : home) reach = std::max(reach, hull_diameter(map_hull(sys, cell_frame(sys, w).affine)));
    double radius = d + 3 * reach;
    std::size_t L = 0;
    bool definite = false;
    for (int attempt = 0; attempt < 8 && !L && !definite; ++attempt, radius *= 2) {
      const auto rc = region_cells(sys, theta, s.x, radius, s.r);
      const double t = 1e-9 * std::max(rc.min_diam, 1e-300);
      detail::SpatialHash hash(std::max(rc.max_diam, 1e-300));
      std::vector<Vec2> centers;
      for (std::size_t i = 0; i < rc.hulls.size(); ++i) {
        Vec2 c = Vec2::Zero();
        for (const auto& v : rc.hulls[i]) c += v;
        centers.push_back(c / static_cast<double>(rc.hulls[i].size()));
        hash.insert(centers.back(), i);
      }
      std::vector<std::size_t> dist(rc.words.size(), 0);
      std::deque<std::size_t> q;
      for (std::size_t i = 0; i < rc.words.size(); ++i)
        if (point_hull_distance(s.x, rc.hulls[i]) <= t) dist[i] = 1, q.push_back(i);
      bool truncated = false;
      while (!q.empty() && !L) {
        const std::size_t i = q.front();
        q.pop_front();
        if (point_hull_distance(s.y, rc.hulls[i]) <= t) {
          L = dist[i];
          break;
        }
        if (hull_max_distance(s.x, rc.hulls[i]) >= radius - t) truncated = true;
        hash.for_near(centers[i], 2 * rc.max_diam, [&](std::size_t j) {
          if (dist[j] || hull_distance(rc.hulls[i], rc.hulls[j]) > t) return;
          dist[j] = dist[i] + 1;
          q.push_back(j);
        });
      }
      definite = !L && (!truncated || radius > 2 * sys.diameter);
    }
    per_sample.emplace_back(s.r, L ? static_cast<double>(L) : INFINITY);
    rep.samples.push_back({fmt::format("x=({:.6g},{:.6g}) y=({:.6g},{:.6g})", s.x.x(), s.x.y(), s.y.x(), s.y.y()),
                           {s.x.x(), s.x.y(), s.y.x(), s.y.y(), s.r}, L ? static_cast<double>(L) : INFINITY});
    if (!L && !rep.failure_witness)
      rep.failure_witness = fmt::format("no chain of Lambda(r={:.6g}) cells joins ({:.9g},{:.9g}) to ({:.9g},{:.9g}) at distance {:.6g}",
                                        s.r, s.x.x(), s.x.y(), s.y.x(), s.y.y(), d);
  }
  rep.set("c2", c2);
  if (rep.failure_witness) {
    rep.verdict = Verdict::Fail;
    rep.witnessed_constant = INFINITY;
    return rep;
  }
  std::vector<double> rs;
  for (const auto& [r, L] : per_sample) rs.push_back(r);
  std::sort(rs.begin(), rs.end(), std::greater<>());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  std::vector<double> per_r;
  for (double r : rs) {
    double m = 0;
    for (const auto& [rr, L] : per_sample)
      if (rr == r) m = std::max(m, L);
    per_r.push_back(m);
  }
  rep.verdict = classify_counts(per_r, trend);
  rep.witnessed_constant = per_r.empty() ? NAN : *std::max_element(per_r.begin(), per_r.end());
  rep.set("L2", rep.witnessed_constant);
  return rep;
}

std::vector<ChPair> ch_pairs(const FractalSystem& sys, std::size_t random, std::uint64_t seed) {
  std::vector<ChPair> out;
  for (std::size_t i = 0; i < sys.hull.size(); ++i)
    for (std::size_t j = i + 1; j < sys.hull.size(); ++j) out.push_back({sys.hull[i], sys.hull[j]});
  const auto v = level_vertices(sys, 3);
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
  while (random > 0) {
    const auto a = v[pick(gen)], b = v[pick(gen)];
    if ((a - b).norm() < 0.05 * sys.diameter) continue;
    out.push_back({a, b});
    --random;
  }
  return out;
}

std::size_t chain_count(const FractalSystem& sys, Metric metric, const Vec2& x, const Vec2& y, double eps,
                        std::size_t vertex_cap) {
  if (!(eps > 0)) throw DomainError("chain_count: eps must be positive");
  const double step = metric == Metric::Snowflake ? eps * eps : eps;
  const double d = (x - y).norm();
  if (d < step) return 1;
  const std::size_t level = mesh_level(sys, step / 2);
  const double merge = 1e-9 * step;
  for (double radius = 2 * d + step;; radius *= 2) {
    detail::PointMerger pts(step);
    const std::size_t ix = pts.add(x, merge).id, iy = pts.add(y, merge).id;
    walk_local_level(sys, level, x, radius, [&](const Word&, const std::vector<Vec2>& hull) {
      for (const auto& v : hull) pts.add(v, merge);
      if (pts.points().size() > vertex_cap)
        throw ResourceError(fmt::format("chain_count: more than {} vertices at level {}", vertex_cap, level));
    });
    const auto& P = pts.points();
    detail::SpatialHash hash(step);
    for (std::size_t i = 0; i < P.size(); ++i) hash.insert(P[i], i);
    std::vector<std::size_t> hops(P.size(), 0);
    std::deque<std::size_t> q{ix};
    hops[ix] = 1;  // hops - 1 edges
    while (!q.empty()) {
      const std::size_t i = q.front();
      q.pop_front();
      if (i == iy) return hops[i] - 1;
      hash.for_near(P[i], step, [&](std::size_t j) {
        if (hops[j] || (P[j] - P[i]).norm() >= step) return;
        hops[j] = hops[i] + 1;
        q.push_back(j);
      });
    }
    if (radius > 2 * sys.diameter) return 0;
  }
}

ConditionReport check_ch(const FractalSystem& sys, Metric metric, const std::vector<ChPair>& pairs,
                         const std::vector<double>& eps_ladder, const TrendOptions& trend) {
  ConditionReport rep;
  rep.condition = Condition::CH;
  std::vector<double> eps = eps_ladder;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  std::vector<double> per_eps;
  std::size_t worst_pair = 0;
  for (double e : eps) {
    double best = 0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto& [x, y] = pairs[k];
      const double dd = metric == Metric::Snowflake ? std::sqrt((x - y).norm()) : (x - y).norm();
      const std::size_t n = chain_count(sys, metric, x, y, e);
      const double v = dd == 0 ? 1.0 : (n ? static_cast<double>(n) * e / dd : INFINITY);
      rep.samples.push_back({fmt::format("eps={:.6g} pair {} N={}", e, k, n), {e, x.x(), x.y(), y.x(), y.y()}, v});
      if (dd > 0 && v > best) best = v, worst_pair = k;
    }
    per_eps.push_back(best);
  }
  rep.verdict = classify_trend(per_eps, trend);
  rep.witnessed_constant = per_eps.empty() ? NAN : *std::max_element(per_eps.begin(), per_eps.end());
  rep.set("max_N_eps_over_d", rep.witnessed_constant);
  if (sys.kind == SystemKind::KLambda) rep.set("C_CH_envelope", 160 / c0(sys.lambda));
  if (rep.verdict == Verdict::Fail) {
    const auto& [x, y] = pairs[worst_pair];
    std::string seq;
    for (double v : per_eps) seq += fmt::format("{}{:.6g}", seq.empty() ? "" : ",", v);
    rep.failure_witness = fmt::format("N_eps eps/d grows per halving for ({:.6g},{:.6g})-({:.6g},{:.6g}): {}", x.x(),
                                      x.y(), y.x(), y.y(), seq);
  }
  return rep;
}

}  // namespace sslab
