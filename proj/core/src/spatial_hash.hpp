#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "sslab/geometry.hpp"

namespace sslab::detail {

// Uniform bucket grid over the plane. Queries with radius <= bucket size
// only need the 3x3 block around the query bucket.
class SpatialHash {
 public:
  explicit SpatialHash(double bucket) : h_(bucket) {}

  void insert(const Vec2& p, std::size_t id) { buckets_[key(cell(p.x()), cell(p.y()))].push_back(id); }

  template <class F>
  void for_near(const Vec2& p, double radius, F&& f) const {
    const auto span = static_cast<std::int64_t>(std::ceil(radius / h_));
    const std::int64_t cx = cell(p.x()), cy = cell(p.y());
    for (std::int64_t i = cx - span; i <= cx + span; ++i)
      for (std::int64_t j = cy - span; j <= cy + span; ++j) {
        auto it = buckets_.find(key(i, j));
        if (it == buckets_.end()) continue;
        for (std::size_t id : it->second) f(id);
      }
  }

  double bucket() const { return h_; }

 private:
  std::int64_t cell(double v) const { return static_cast<std::int64_t>(std::floor(v / h_)); }
  static std::uint64_t key(std::int64_t i, std::int64_t j) {
    return (static_cast<std::uint64_t>(i) * 0x9E3779B97F4A7C15ULL) ^ static_cast<std::uint64_t>(j);
  }

  double h_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

// Merges points closer than a tolerance; reports ambiguity when a point is
// within tolerance of two distinct representatives.
class PointMerger {
 public:
  PointMerger(double bucket) : hash_(bucket) {}

  struct Result {
    std::size_t id;
    bool inserted;
    bool ambiguous;
    std::size_t other;
  };

  Result add(const Vec2& p, double tol) {
    std::size_t found = npos, second = npos;
    double best = INFINITY;
    hash_.for_near(p, tol, [&](std::size_t id) {
      const double d = (points_[id] - p).norm();
      if (d <= tol) {
        if (found == npos || d < best) {
          if (found != npos) second = found;
          found = id;
          best = d;
        } else {
          second = id;
        }
      }
    });
    if (found != npos) return {found, false, second != npos, second};
    points_.push_back(p);
    hash_.insert(p, points_.size() - 1);
    return {points_.size() - 1, true, false, npos};
  }

  std::size_t find(const Vec2& p, double tol) const {
    std::size_t found = npos;
    double best = INFINITY;
    hash_.for_near(p, tol, [&](std::size_t id) {
      const double d = (points_[id] - p).norm();
      if (d <= tol && d < best) {
        best = d;
        found = id;
      }
    });
    return found;
  }

  const std::vector<Vec2>& points() const { return points_; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  SpatialHash hash_;
  std::vector<Vec2> points_;
};

}  // namespace sslab::detail
