#pragma once

#include <cstdint>
#include <vector>

#include "sslab/fit.hpp"
#include "sslab/geometry.hpp"
#include "sslab/report.hpp"
#include "sslab/words.hpp"

namespace sslab {

struct AvOptions {
  TrendOptions trend{.stabilization = 0.05, .growth = 1.2, .rungs = 4};
  std::size_t pair_cap = 5'000'000;
};

// Max of zeta_v/zeta_w over intersecting pairs of Lambda_theta(r), per resolution.
ConditionReport check_av(const FractalSystem& sys, const Tuple& theta, const Tuple& zeta,
                         const std::vector<double>& resolutions, const AvOptions& opt = {});

// Level-n vertex images plus seeded random points of K.
std::vector<Vec2> default_point_samples(const FractalSystem& sys, std::size_t level = 6, std::size_t random = 200,
                                        std::uint64_t seed = 1);

// Max #Gamma_theta(B(x, c1 Rbar r), r) over the samples, per resolution.
ConditionReport check_woc(const FractalSystem& sys, const Tuple& theta, double c1, const std::vector<double>& resolutions,
                          const std::vector<Vec2>& ball_samples, const TrendOptions& trend = {});

struct CpSample {
  Vec2 x, y;
  double r = 0.0;
};

// For every point and resolution: the farthest nearby point of K within
// c2 Rbar r (from fine local cell vertices) and one seeded random one.
std::vector<CpSample> cp_samples(const FractalSystem& sys, const Tuple& theta, double c2, const std::vector<Vec2>& points,
                                 const std::vector<double>& resolutions, std::uint64_t seed = 1);

// Shortest chain of intersecting Lambda_theta(r) cells from x to y; L_2 counts cells.
ConditionReport check_cp(const FractalSystem& sys, const Tuple& theta, double c2, const std::vector<CpSample>& samples,
                         const TrendOptions& trend = {});

enum class Metric { Euclidean, Snowflake };  // Snowflake: d(x,y) = |x-y|^{1/2}

struct ChPair {
  Vec2 x, y;
};

// The hull corners pairwise plus seeded pairs of level-3 vertices.
std::vector<ChPair> ch_pairs(const FractalSystem& sys, std::size_t random = 6, std::uint64_t seed = 1);

// Minimal epsilon-chain length on the level vertices near the pair, with the
// level chosen so the cell mesh is at most half the Euclidean step.
std::size_t chain_count(const FractalSystem& sys, Metric metric, const Vec2& x, const Vec2& y, double eps,
                        std::size_t vertex_cap = 3'000'000);

// max N_eps eps / d(x,y) per rung of eps_ladder (coarse to fine).
ConditionReport check_ch(const FractalSystem& sys, Metric metric, const std::vector<ChPair>& pairs,
                         const std::vector<double>& eps_ladder,
                         const TrendOptions& trend = {.stabilization = 0.05, .growth = 1.5, .rungs = 4});

}  // namespace sslab
