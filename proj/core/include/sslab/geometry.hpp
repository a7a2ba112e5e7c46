#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sslab/words.hpp"

namespace sslab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct Similitude {
  Mat2 linear = Mat2::Identity();
  Vec2 shift = Vec2::Zero();
  double ratio = 1.0;

  Vec2 operator()(const Vec2& x) const { return linear * x + shift; }
  Vec2 fixed_point() const;
  Similitude inverse() const;
};

// Validates linear^T linear = ratio^2 I.
Similitude make_similitude(const Mat2& linear, const Vec2& shift);
// outer o inner
Similitude compose(const Similitude& outer, const Similitude& inner);

enum class SystemKind { KLambda, Sierpinski, Cantor, Interval, Custom };

struct SystemParams {
  double lambda = 0.25;
  int interval_maps = 3;  // 3: overlapping fixture, 2: standard unit interval
};

struct FractalSystem {
  SystemKind kind = SystemKind::Custom;
  double lambda = 0.0;  // K_lambda only
  std::vector<Similitude> maps;
  std::vector<Vec2> hull;             // q_1..q_k (triangle or segment)
  std::vector<Digit> hull_fixed_map;  // hull[i] is the fixed point of map hull_fixed_map[i]
  double diameter = 1.0;
  Tuple ratios{0.5, 0.5};

  std::size_t size() const { return maps.size(); }
  bool planar() const { return hull.size() == 3; }
  std::string name() const;
};

FractalSystem build_system(SystemKind kind, const SystemParams& params = {});
FractalSystem make_custom_system(std::vector<Similitude> maps, std::vector<Vec2> hull, std::vector<Digit> hull_fixed_map);

double lambda_star(double lambda);
double c0(double lambda);
double boundary_distance(double lambda);

struct CellFrame {
  Word word;
  Similitude affine;
  std::vector<Vec2> vertices;
};

CellFrame cell_frame(const FractalSystem& sys, const Word& w);
std::vector<Vec2> map_hull(const FractalSystem& sys, const Similitude& f);

// Polygon helpers for convex hulls with 2 or 3 vertices.
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
double point_hull_distance(const Vec2& p, const std::vector<Vec2>& hull);
double hull_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b);
double hull_max_distance(const Vec2& p, const std::vector<Vec2>& hull);

enum class ContactKind { VertexOfBoth, VertexOfFirst, VertexOfSecond, Crossing, Overlap };
std::string to_string(ContactKind k);

struct Contact {
  Vec2 point;
  ContactKind kind;
};

// Intersection of K_v and K_w for incomparable words.
std::optional<Contact> cells_intersect(const FractalSystem& sys, const Word& v, const Word& w);

// Same-length words whose cells meet B(K_w, c rho_w Rbar) and are not inside K_w.
std::vector<Word> neighbor_set(const FractalSystem& sys, const Word& w, double c);

// Words of Lambda_theta(r) whose hull meets the open ball B(center, radius).
std::vector<Word> gamma_cover(const FractalSystem& sys, const Tuple& theta, const Vec2& center, double radius, double r);

struct CellView {
  const Word& word;
  const Similitude& affine;
  double theta_weight;  // theta_w of the walk tuple
  double aux_weight;    // aux_w when an auxiliary tuple is supplied, else 1
};

// Partition walk carrying composed maps. visit(view, is_leaf) -> descend?
template <class Visit>
void walk_partition_cells(const FractalSystem& sys, const Tuple& theta, double r, Visit&& visit,
                          const Tuple* aux = nullptr) {
  const auto n = static_cast<Digit>(sys.size());
  Word w;
  std::vector<Similitude> frames{Similitude{}};
  std::vector<double> tw{1.0}, aw{1.0};
  std::vector<Digit> next{1};
  while (!next.empty()) {
    if (next.back() > n) {
      next.pop_back();
      frames.pop_back();
      tw.pop_back();
      aw.pop_back();
      if (!w.empty()) w.pop_back();
      continue;
    }
    const Digit d = next.back()++;
    w.push_back(d);
    Similitude f = compose(frames.back(), sys.maps[d - 1]);
    const double t = tw.back() * theta(d);
    const double a = aux ? aw.back() * (*aux)(d) : 1.0;
    const bool leaf = t <= r;
    const bool descend = visit(CellView{w, f, t, a}, leaf);
    if (leaf || !descend) {
      w.pop_back();
    } else {
      frames.push_back(f);
      tw.push_back(t);
      aw.push_back(a);
      next.push_back(1);
    }
  }
}

// Visits every word of length n (in lexicographic order) with its frame.
template <class Visit>
void walk_level_cells(const FractalSystem& sys, std::size_t level, Visit&& visit) {
  const auto n = static_cast<Digit>(sys.size());
  if (level == 0) {
    Word e;
    Similitude id;
    visit(e, id);
    return;
  }
  Word w;
  std::vector<Similitude> frames{Similitude{}};
  std::vector<Digit> next{1};
  while (!next.empty()) {
    if (next.back() > n) {
      next.pop_back();
      frames.pop_back();
      if (!w.empty()) w.pop_back();
      continue;
    }
    const Digit d = next.back()++;
    w.push_back(d);
    Similitude f = compose(frames.back(), sys.maps[d - 1]);
    if (w.size() == level) {
      visit(static_cast<const Word&>(w), static_cast<const Similitude&>(f));
      w.pop_back();
    } else {
      frames.push_back(f);
      next.push_back(1);
    }
  }
}

struct PointOnFractal {
  Vec2 coords;
  AddressStream address;
};

// pi(omega) for an eventually periodic address: F_prefix(fixed point of F_cycle).
Vec2 address_coords(const FractalSystem& sys, const AddressStream& address);
PointOnFractal point_from_address(const FractalSystem& sys, const AddressStream& address);

// Lexicographically smallest address of x, resolved by nested hulls down to
// cell size `resolution` (relative to the diameter); below that the tail
// repeats the smallest map whose fixed point lands on x, else the last digit.
AddressStream canonical_address(const FractalSystem& sys, const Vec2& x, double resolution = 1e-11);
PointOnFractal canonical_point(const FractalSystem& sys, const Vec2& x);
// Points of K built from an address, then re-addressed canonically.
PointOnFractal canonical_point(const FractalSystem& sys, const AddressStream& address);

struct SvgLayer {
  std::vector<Word> words;
  std::string color;
};

// Deterministic SVG of all level-`depth` cells. Throws ResourceError above cap.
std::string render_svg(const FractalSystem& sys, std::size_t depth, const std::vector<SvgLayer>& layers = {},
                       std::size_t depth_cap = 9);

// Level-n vertex images F_w(q_i), merged. Used by checkers and networks.
std::vector<Vec2> level_vertices(const FractalSystem& sys, std::size_t level);

// Max over level-n cells of |rot(cell) - nearest cell| for the 2pi/3 rotation
// about the hull centroid (vertex-set distance).
double rotation_symmetry_defect(const FractalSystem& sys, std::size_t level);

// Number of pairs of level-n cells whose hull interiors overlap.
std::size_t open_set_violations(const FractalSystem& sys, std::size_t level);

}  // namespace sslab
