#include "sslab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <fmt/format.h>

#include "sslab/errors.hpp"
#include "spatial_hash.hpp"

namespace sslab {

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool in_triangle(const Vec2& p, const std::vector<Vec2>& t) {
  const double d1 = cross(t[1] - t[0], p - t[0]);
  const double d2 = cross(t[2] - t[1], p - t[1]);
  const double d3 = cross(t[0] - t[2], p - t[2]);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double o1 = cross(b - a, c - a), o2 = cross(b - a, d - a);
  const double o3 = cross(d - c, a - c), o4 = cross(d - c, b - c);
  return ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
}

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  if (segments_cross(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d), point_segment_distance(c, a, b),
                   point_segment_distance(d, a, b)});
}

template <class F>
void for_edges(const std::vector<Vec2>& h, F&& f) {
  if (h.size() == 2) {
    f(h[0], h[1]);
  } else if (h.size() >= 3) {
    for (std::size_t i = 0; i < h.size(); ++i) f(h[i], h[(i + 1) % h.size()]);
  }
}

Similitude halving(const Vec2& q) { return make_similitude(0.5 * Mat2::Identity(), 0.5 * q); }

std::vector<Vec2> unit_triangle() { return {Vec2(0.5, kSqrt3 / 2), Vec2(0.0, 0.0), Vec2(1.0, 0.0)}; }

double compute_diameter(const std::vector<Vec2>& hull) {
  double d = 0.0;
  for (const auto& a : hull)
    for (const auto& b : hull) d = std::max(d, (a - b).norm());
  return d;
}

Tuple ratio_tuple(const std::vector<Similitude>& maps) {
  std::vector<double> r;
  for (const auto& m : maps) r.push_back(m.ratio);
  return Tuple(r);
}

}  // namespace

Vec2 Similitude::fixed_point() const { return (Mat2::Identity() - linear).partialPivLu().solve(shift); }

Similitude Similitude::inverse() const {
  Similitude s;
  s.linear = linear.transpose() / (ratio * ratio);
  s.shift = -(s.linear * shift);
  s.ratio = 1.0 / ratio;
  return s;
}

Similitude make_similitude(const Mat2& linear, const Vec2& shift) {
  const Mat2 g = linear.transpose() * linear;
  const double r2 = 0.5 * g.trace();
  if (!(r2 > 0.0) || (g - r2 * Mat2::Identity()).cwiseAbs().maxCoeff() > 1e-12 || r2 >= 1.0)
    throw DomainError("linear part is not a contracting similarity");
  return Similitude{linear, shift, std::sqrt(r2)};
}

Similitude compose(const Similitude& outer, const Similitude& inner) {
  return Similitude{outer.linear * inner.linear, outer.linear * inner.shift + outer.shift, outer.ratio * inner.ratio};
}

std::string FractalSystem::name() const {
  switch (kind) {
    case SystemKind::KLambda: return fmt::format("K_lambda({})", lambda);
    case SystemKind::Sierpinski: return "SG";
    case SystemKind::Cantor: return "Cantor";
    case SystemKind::Interval: return fmt::format("Interval({})", maps.size());
    case SystemKind::Custom: return "Custom";
  }
  return "?";
}

double lambda_star(double lambda) { return std::sqrt(12 * lambda * lambda - 6 * lambda + 1); }

double c0(double lambda) {
  if (!(lambda > 0 && lambda < 0.5)) throw DomainError("c0: lambda must lie in (0,1/2)");
  const double m = std::min(lambda, 0.5 - lambda);
  return 3.0 / 32.0 * m * m;
}

double boundary_distance(double lambda) {
  if (!(lambda > 0 && lambda < 0.5)) throw DomainError("boundary_distance: lambda must lie in (0,1/2)");
  return kSqrt3 / 2 * std::min(lambda, 0.5 - lambda);
}

FractalSystem build_system(SystemKind kind, const SystemParams& params) {
  FractalSystem s;
  s.kind = kind;
  switch (kind) {
    case SystemKind::KLambda:
    case SystemKind::Sierpinski: {
      s.hull = unit_triangle();
      for (const auto& q : s.hull) s.maps.push_back(halving(q));
      s.hull_fixed_map = {1, 2, 3};
      if (kind == SystemKind::KLambda) {
        const double l = params.lambda;
        if (!(l > 0 && l < 0.5)) throw DomainError(fmt::format("lambda {} outside (0,1/2)", l));
        s.lambda = l;
        const double a = kSqrt3 * (1 - 4 * l);
        // Row-vector form x -> (1/4) x [[1,a],[-a,1]] written for column vectors.
        Mat2 lin;
        lin << 1.0, -a, a, 1.0;
        s.maps.push_back(make_similitude(0.25 * lin, Vec2((1 - l) / 2, kSqrt3 * l / 2)));
      }
      break;
    }
    case SystemKind::Cantor:
      s.hull = {Vec2(0, 0), Vec2(1, 0)};
      s.maps = {make_similitude(Mat2::Identity() / 3, Vec2(0, 0)),
                make_similitude(Mat2::Identity() / 3, Vec2(2.0 / 3, 0))};
      s.hull_fixed_map = {1, 2};
      break;
    case SystemKind::Interval:
      s.hull = {Vec2(0, 0), Vec2(1, 0)};
      if (params.interval_maps == 3) {
        for (double q : {0.0, 0.5, 1.0}) s.maps.push_back(halving(Vec2(q, 0)));
        s.hull_fixed_map = {1, 3};
      } else if (params.interval_maps == 2) {
        for (double q : {0.0, 1.0}) s.maps.push_back(halving(Vec2(q, 0)));
        s.hull_fixed_map = {1, 2};
      } else {
        throw DomainError("interval fixture supports 2 or 3 maps");
      }
      break;
    case SystemKind::Custom:
      throw DomainError("use make_custom_system for custom systems");
  }
  s.diameter = compute_diameter(s.hull);
  s.ratios = ratio_tuple(s.maps);
  return s;
}

FractalSystem make_custom_system(std::vector<Similitude> maps, std::vector<Vec2> hull, std::vector<Digit> hull_fixed_map) {
  if (maps.size() < 2) throw DomainError("custom system needs at least 2 maps");
  if (hull.size() < 2 || hull.size() > 3 || hull_fixed_map.size() != hull.size())
    throw DomainError("custom hull must be a segment or triangle with fixed-map tags");
  FractalSystem s;
  s.kind = SystemKind::Custom;
  s.maps = std::move(maps);
  s.hull = std::move(hull);
  s.hull_fixed_map = std::move(hull_fixed_map);
  s.diameter = compute_diameter(s.hull);
  s.ratios = ratio_tuple(s.maps);
  return s;
}

std::vector<Vec2> map_hull(const FractalSystem& sys, const Similitude& f) {
  std::vector<Vec2> out;
  out.reserve(sys.hull.size());
  for (const auto& q : sys.hull) out.push_back(f(q));
  return out;
}

CellFrame cell_frame(const FractalSystem& sys, const Word& w) {
  check_digits(w, sys.size());
  Similitude f;
  for (Digit d : w.digits()) f = compose(f, sys.maps[d - 1]);
  return CellFrame{w, f, map_hull(sys, f)};
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double point_hull_distance(const Vec2& p, const std::vector<Vec2>& hull) {
  if (hull.size() == 1) return (p - hull[0]).norm();
  if (hull.size() == 3 && in_triangle(p, hull)) return 0.0;
  double d = INFINITY;
  for_edges(hull, [&](const Vec2& a, const Vec2& b) { d = std::min(d, point_segment_distance(p, a, b)); });
  return d;
}

double hull_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  if (a.size() == 3)
    for (const auto& v : b)
      if (in_triangle(v, a)) return 0.0;
  if (b.size() == 3)
    for (const auto& v : a)
      if (in_triangle(v, b)) return 0.0;
  if (a.size() == 1) return point_hull_distance(a[0], b);
  if (b.size() == 1) return point_hull_distance(b[0], a);
  double d = INFINITY;
  for_edges(a, [&](const Vec2& p, const Vec2& q) {
    for_edges(b, [&](const Vec2& r, const Vec2& s) { d = std::min(d, segment_distance(p, q, r, s)); });
  });
  return d;
}

double hull_max_distance(const Vec2& p, const std::vector<Vec2>& hull) {
  double d = 0.0;
  for (const auto& v : hull) d = std::max(d, (p - v).norm());
  return d;
}

std::string to_string(ContactKind k) {
  switch (k) {
    case ContactKind::VertexOfBoth: return "vertex-of-both";
    case ContactKind::VertexOfFirst: return "vertex-of-first";
    case ContactKind::VertexOfSecond: return "vertex-of-second";
    case ContactKind::Crossing: return "crossing";
    case ContactKind::Overlap: return "overlap";
  }
  return "?";
}

std::optional<Contact> cells_intersect(const FractalSystem& sys, const Word& v, const Word& w) {
  if (v.comparable(w))
    throw DomainError(fmt::format("cells_intersect: {} and {} are prefix-related", v.str(), w.str()));
  const CellFrame a = cell_frame(sys, v), b = cell_frame(sys, w);
  const double tol = 1e-9 * std::min(a.affine.ratio, b.affine.ratio) * sys.diameter;
  if (hull_distance(a.vertices, b.vertices) >= tol) return std::nullopt;

  struct Cand {
    Vec2 p;
    bool from_a, from_b;
  };
  std::vector<Cand> clusters;
  auto add = [&](const Vec2& p, bool fa) {
    for (auto& c : clusters)
      if ((c.p - p).norm() < tol) {
        (fa ? c.from_a : c.from_b) = true;
        return;
      }
    clusters.push_back({p, fa, !fa});
  };
  for (const auto& p : a.vertices)
    if (point_hull_distance(p, b.vertices) < tol) add(p, true);
  for (const auto& p : b.vertices)
    if (point_hull_distance(p, a.vertices) < tol) add(p, false);

  if (clusters.size() == 1) {
    const auto& c = clusters[0];
    const ContactKind k = c.from_a && c.from_b ? ContactKind::VertexOfBoth
                          : c.from_a           ? ContactKind::VertexOfFirst
                                               : ContactKind::VertexOfSecond;
    return Contact{c.p, k};
  }
  if (clusters.size() > 1) {
    Vec2 m = Vec2::Zero();
    for (const auto& c : clusters) m += c.p;
    return Contact{m / static_cast<double>(clusters.size()), ContactKind::Overlap};
  }
  // Edges cross without any vertex contact.
  Vec2 hit = a.vertices[0];
  for_edges(a.vertices, [&](const Vec2& p, const Vec2& q) {
    for_edges(b.vertices, [&](const Vec2& r, const Vec2& s) {
      if (segments_cross(p, q, r, s)) {
        const double t = cross(r - p, s - r) / cross(q - p, s - r);
        hit = p + t * (q - p);
      }
    });
  });
  return Contact{hit, ContactKind::Crossing};
}

std::vector<Word> neighbor_set(const FractalSystem& sys, const Word& w, double c) {
  if (!(c > 0)) throw DomainError("neighbor_set: c must be positive");
  check_digits(w, sys.size());
  const CellFrame target = cell_frame(sys, w);
  const double reach = c * target.affine.ratio * sys.diameter;
  const double tol = 1e-9 * target.affine.ratio * sys.diameter;
  std::vector<Word> out;
  Word u;
  auto rec = [&](auto&& self, const Similitude& f) -> void {
    if (u.size() == w.size()) {
      if (u == w) return;
      const auto h = map_hull(sys, f);
      bool inside = true;
      for (const auto& p : h) inside = inside && point_hull_distance(p, target.vertices) <= tol;
      if (!inside) out.push_back(u);
      return;
    }
    for (Digit d = 1; d <= sys.size(); ++d) {
      const Similitude g = compose(f, sys.maps[d - 1]);
      if (hull_distance(map_hull(sys, g), target.vertices) >= reach) continue;
      u.push_back(d);
      self(self, g);
      u.pop_back();
    }
  };
  rec(rec, Similitude{});
  return out;
}

std::vector<Word> gamma_cover(const FractalSystem& sys, const Tuple& theta, const Vec2& center, double radius, double r) {
  if (!(r > 0 && r < 1)) throw DomainError("gamma_cover: r must lie in (0,1)");
  if (theta.size() != sys.size()) throw DomainError("gamma_cover: tuple length differs from system");
  std::vector<Word> out;
  walk_partition_cells(sys, theta, r, [&](const CellView& c, bool leaf) {
    const double tol = 1e-9 * c.affine.ratio * sys.diameter;
    if (point_hull_distance(center, map_hull(sys, c.affine)) >= radius + tol) return false;
    if (leaf) out.push_back(c.word);
    return true;
  });
  return out;
}

Vec2 address_coords(const FractalSystem& sys, const AddressStream& address) {
  check_digits(address.prefix(), sys.size());
  check_digits(address.cycle(), sys.size());
  Similitude cyc;
  for (Digit d : address.cycle().digits()) cyc = compose(cyc, sys.maps[d - 1]);
  Similitude pre;
  for (Digit d : address.prefix().digits()) pre = compose(pre, sys.maps[d - 1]);
  return pre(cyc.fixed_point());
}

PointOnFractal point_from_address(const FractalSystem& sys, const AddressStream& address) {
  return PointOnFractal{address_coords(sys, address), address};
}

AddressStream canonical_address(const FractalSystem& sys, const Vec2& x, double resolution) {
  const double floor_tol = 1e-13 * sys.diameter;
  auto tol = [&](const Similitude& f) { return std::max(1e-9 * f.ratio * sys.diameter, floor_tol); };
  if (point_hull_distance(x, sys.hull) > tol(Similitude{}))
    throw DomainError(fmt::format("point ({}, {}) is outside the hull", x.x(), x.y()));

  const auto n = static_cast<Digit>(sys.size());
  Word path;
  std::vector<Similitude> frames{Similitude{}};
  std::vector<Digit> next{1};
  std::size_t visits = 0;
  while (true) {
    if (next.empty()) throw DomainError(fmt::format("point ({}, {}) is not on the attractor", x.x(), x.y()));
    if (++visits > 2000000) throw GeometryError("canonical_address: search budget exhausted");
    const Similitude& f = frames.back();
    if (f.ratio * sys.diameter <= resolution) break;
    if (next.back() > n) {
      next.pop_back();
      frames.pop_back();
      if (!path.empty()) path.pop_back();
      continue;
    }
    const Digit d = next.back()++;
    const Similitude g = compose(f, sys.maps[d - 1]);
    if (point_hull_distance(x, map_hull(sys, g)) <= tol(g)) {
      path.push_back(d);
      frames.push_back(g);
      next.push_back(1);
    }
  }
  const Similitude& f = frames.back();
  for (Digit d = 1; d <= n; ++d)
    if ((f(sys.maps[d - 1].fixed_point()) - x).norm() <= tol(f)) return AddressStream(path, Word{d});
  for (Digit d = 1; d <= n; ++d) {
    const Similitude g = compose(f, sys.maps[d - 1]);
    if (point_hull_distance(x, map_hull(sys, g)) <= tol(g)) return AddressStream(path, Word{d});
  }
  return AddressStream(path, Word{path.empty() ? Digit{1} : path.back()});
}

PointOnFractal canonical_point(const FractalSystem& sys, const Vec2& x) { return {x, canonical_address(sys, x)}; }

PointOnFractal canonical_point(const FractalSystem& sys, const AddressStream& address) {
  return canonical_point(sys, address_coords(sys, address));
}

std::string render_svg(const FractalSystem& sys, std::size_t depth, const std::vector<SvgLayer>& layers,
                       std::size_t depth_cap) {
  if (depth > depth_cap) throw ResourceError(fmt::format("render depth {} exceeds cap {}", depth, depth_cap));
  double minx = INFINITY, maxx = -INFINITY, miny = INFINITY, maxy = -INFINITY;
  for (const auto& q : sys.hull) {
    minx = std::min(minx, q.x());
    maxx = std::max(maxx, q.x());
    miny = std::min(miny, q.y());
    maxy = std::max(maxy, q.y());
  }
  const double span = std::max({maxx - minx, maxy - miny, 1e-12});
  const double size = 800.0, margin = 20.0;
  auto px = [&](const Vec2& p) {
    return fmt::format("{:.4f},{:.4f}", margin + size * (p.x() - minx) / span, margin + size * (maxy - p.y()) / span);
  };
  const double height = sys.planar() ? size * (maxy - miny) / span + 2 * margin : 2 * margin + 20;
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      size + 2 * margin, height, size + 2 * margin, height);
  out += fmt::format("<title>{} depth {}</title>\n", sys.name(), depth);
  auto shape = [&](const std::vector<Vec2>& h, const std::string& style) {
    if (h.size() == 2) return fmt::format("<line x1=\"{}\" {} />\n", px(h[0]), style);
    std::string pts;
    for (std::size_t i = 0; i < h.size(); ++i) pts += (i ? " " : "") + px(h[i]);
    return fmt::format("<polygon points=\"{}\" {} />\n", pts, style);
  };
  auto line_attr = [&](const std::vector<Vec2>& h) {
    auto a = px(h[0]), b = px(h[1]);
    auto ca = a.find(','), cb = b.find(',');
    return fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" ", a.substr(0, ca), a.substr(ca + 1),
                       b.substr(0, cb), b.substr(cb + 1));
  };
  auto emit = [&](const std::vector<Vec2>& h, const std::string& fill, const std::string& stroke) {
    if (h.size() == 2) {
      out += line_attr(h) + fmt::format("stroke=\"{}\" stroke-width=\"3\" />\n", stroke);
    } else {
      out += shape(h, fmt::format("fill=\"{}\" stroke=\"{}\" stroke-width=\"0.5\"", fill, stroke));
    }
  };
  out += "<g id=\"cells\">\n";
  walk_level_cells(sys, depth, [&](const Word&, const Similitude& f) { emit(map_hull(sys, f), "#e8e8e8", "#202020"); });
  out += "</g>\n";
  for (std::size_t i = 0; i < layers.size(); ++i) {
    out += fmt::format("<g id=\"layer{}\">\n", i);
    for (const auto& w : layers[i].words) emit(cell_frame(sys, w).vertices, layers[i].color, layers[i].color);
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

std::vector<Vec2> level_vertices(const FractalSystem& sys, std::size_t level) {
  const double scale = std::pow(sys.ratios.min(), static_cast<double>(level)) * sys.diameter;
  detail::PointMerger merger(std::max(scale, 1e-12));
  walk_level_cells(sys, level, [&](const Word&, const Similitude& f) {
    const double tol = 1e-9 * f.ratio * sys.diameter;
    for (const auto& q : sys.hull) merger.add(f(q), tol);
  });
  return merger.points();
}

double rotation_symmetry_defect(const FractalSystem& sys, std::size_t level) {
  if (!sys.planar()) throw DomainError("rotation symmetry needs a planar system");
  const Vec2 c = (sys.hull[0] + sys.hull[1] + sys.hull[2]) / 3.0;
  const double ang = 2 * std::numbers::pi / 3;
  Mat2 rot;
  rot << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
  std::vector<std::vector<Vec2>> cells;
  walk_level_cells(sys, level, [&](const Word&, const Similitude& f) { cells.push_back(map_hull(sys, f)); });
  const double h = std::pow(sys.ratios.max(), static_cast<double>(level)) * sys.diameter;
  detail::SpatialHash index(h);
  auto centroid = [](const std::vector<Vec2>& t) { return Vec2((t[0] + t[1] + t[2]) / 3.0); };
  for (std::size_t i = 0; i < cells.size(); ++i) index.insert(centroid(cells[i]), i);
  auto set_distance = [](const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    double d = 0.0;
    for (const auto& p : a) {
      double m = INFINITY;
      for (const auto& q : b) m = std::min(m, (p - q).norm());
      d = std::max(d, m);
    }
    return d;
  };
  double worst = 0.0;
  for (const auto& t : cells) {
    std::vector<Vec2> r;
    for (const auto& p : t) r.push_back(c + rot * (p - c));
    const Vec2 rc = centroid(r);
    double best = INFINITY;
    index.for_near(rc, h, [&](std::size_t j) { best = std::min(best, set_distance(r, cells[j])); });
    worst = std::max(worst, best);
  }
  return worst;
}

std::size_t open_set_violations(const FractalSystem& sys, std::size_t level) {
  std::vector<std::vector<Vec2>> cells;
  std::vector<double> sizes;
  walk_level_cells(sys, level, [&](const Word&, const Similitude& f) {
    cells.push_back(map_hull(sys, f));
    sizes.push_back(f.ratio * sys.diameter);
  });
  const double h = std::pow(sys.ratios.max(), static_cast<double>(level)) * sys.diameter;
  detail::SpatialHash index(h);
  for (std::size_t i = 0; i < cells.size(); ++i) index.insert(cells[i][0], i);

  // Separating axis test with a small relative slack: touching is allowed.
  auto interiors_overlap = [&](std::size_t i, std::size_t j) {
    const auto& a = cells[i];
    const auto& b = cells[j];
    const double slack = 1e-9 * std::min(sizes[i], sizes[j]);
    std::vector<Vec2> axes;
    auto add_axes = [&](const std::vector<Vec2>& t) {
      if (t.size() == 2) {
        axes.push_back(t[1] - t[0]);
        return;
      }
      for (std::size_t k = 0; k < t.size(); ++k) {
        const Vec2 e = t[(k + 1) % t.size()] - t[k];
        axes.push_back(Vec2(-e.y(), e.x()));
      }
    };
    add_axes(a);
    add_axes(b);
    for (Vec2 ax : axes) {
      ax.normalize();
      double amin = INFINITY, amax = -INFINITY, bmin = INFINITY, bmax = -INFINITY;
      for (const auto& p : a) {
        amin = std::min(amin, ax.dot(p));
        amax = std::max(amax, ax.dot(p));
      }
      for (const auto& p : b) {
        bmin = std::min(bmin, ax.dot(p));
        bmax = std::max(bmax, ax.dot(p));
      }
      if (amax <= bmin + slack || bmax <= amin + slack) return false;
    }
    return true;
  };
  std::size_t bad = 0;
  for (std::size_t i = 0; i < cells.size(); ++i)
    index.for_near(cells[i][0], 2 * h, [&](std::size_t j) {
      if (j > i && interiors_overlap(i, j)) ++bad;
    });
  return bad;
}

}  // namespace sslab
