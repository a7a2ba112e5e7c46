#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sslab/measure.hpp"
#include "sslab/network.hpp"
#include "sslab/report.hpp"
#include "sslab/scaling.hpp"

namespace sslab {

// m(x): each cell's mass p_w is shared equally by the network vertices lying
// on that cell (its corners plus split points on its edges).
Eigen::VectorXd vertex_measure(const ResistanceNetwork& net, const SelfSimilarMeasure& mu);

struct HeatOptions {
  std::size_t dense_cap = 8000;  // dense eigendecomposition up to this many vertices
  double krylov_tol = 1e-13;
  std::size_t krylov_max = 4000;
};

// P_t = exp(-t M^{-1} L) on a resistance network with vertex measure m.
class HeatSemigroup {
 public:
  HeatSemigroup(ResistanceNetwork net, Eigen::VectorXd m, HeatOptions opt = {});
  HeatSemigroup(ResistanceNetwork net, std::shared_ptr<const SelfSimilarMeasure> mu, HeatOptions opt = {});

  const ResistanceNetwork& network() const { return net_; }
  const Eigen::VectorXd& measure() const { return m_; }
  const SelfSimilarMeasure* self_similar_measure() const { return mu_.get(); }
  std::size_t size() const { return net_.size(); }
  bool dense() const { return size() <= opt_.dense_cap; }

  // Neumann spectrum of M^{-1/2} L M^{-1/2}, ascending. Dense mode only.
  const Eigen::VectorXd& eigenvalues() const;

  Eigen::VectorXd apply(double t, const Eigen::VectorXd& f) const;
  std::vector<Eigen::VectorXd> apply(const std::vector<double>& ts, const Eigen::VectorXd& f) const;
  Eigen::VectorXd kernel_row(double t, std::size_t x) const;  // p_t(x, .)
  double kernel(double t, std::size_t x, std::size_t y) const;

  // Killed outside the domain; returned vectors are zero off the domain.
  std::vector<Eigen::VectorXd> dirichlet_apply(const std::vector<bool>& domain, const std::vector<double>& ts,
                                               const Eigen::VectorXd& f) const;
  Eigen::VectorXd dirichlet_row(const std::vector<bool>& domain, double t, std::size_t x) const;
  // Smallest Dirichlet eigenvalue lambda_1(U) = inf E(u)/|u|^2_m over u supported in U.
  double dirichlet_eigenvalue(const std::vector<bool>& domain) const;

  // Vertices with |v - center| < r.
  std::vector<bool> ball(std::size_t center, double r) const;
  double mass(const std::vector<bool>& set) const;

 private:
  struct Block;
  std::shared_ptr<const Block> block(const std::vector<bool>& domain) const;
  std::vector<Eigen::VectorXd> block_apply(const Block& b, const std::vector<double>& ts,
                                           const Eigen::VectorXd& f) const;

  ResistanceNetwork net_;
  Eigen::VectorXd m_;
  std::shared_ptr<const SelfSimilarMeasure> mu_;
  HeatOptions opt_;
  std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
  mutable std::shared_ptr<const Block> full_;
  mutable std::pair<std::vector<bool>, std::shared_ptr<const Block>> last_;
};

double heat_kernel(const HeatSemigroup& hs, double t, std::size_t x, std::size_t y);
double dirichlet_kernel(const HeatSemigroup& hs, const std::vector<bool>& domain, double t, std::size_t x,
                        std::size_t y);

// Volume proxy: midpoint of the certified ball-volume bracket.
double volume_hat(const SelfSimilarMeasure& mu, const Vec2& x, double r);

struct HeatWindow {
  double floor_factor = 10;  // t >= floor_factor W(x, mesh)
  double t_max = 1;
};

struct HeatBall {
  std::size_t center = 0;
  double radius = 0;
};

// Seeded ball centers at base-level vertices with radii 2^-k for k in
// [k_lo, k_hi]; the same physical balls at every finer level.
std::vector<HeatBall> heat_balls(const HeatSemigroup& hs, std::size_t count, int k_lo, int k_hi, std::uint64_t seed = 1,
                                 std::size_t base_level = 3);

// p_t(x,x) V(x, W^{-1}(x,t)) across the ladder; pass iff bounded above.
EstimateReport check_due(const HeatSemigroup& hs, const ScalingFunction& w, const std::vector<std::size_t>& xs,
                         const std::vector<double>& t_ladder, const HeatWindow& window = {});

struct Envelope {
  double slope = 0;      // y = intercept - slope z
  double intercept = 0;
};

struct TwoSidedOptions {
  HeatWindow window;
  double value_floor = 1e-10;  // kernel values below this are numerical noise
};

// Scatter of log(p_t(x,y) V(x,W^{-1}(x,t))) against z = (W(x,d)/t)^{1/(beta-1)}.
// The upper envelope has decay c_plus, the lower one c_minus >= c_plus.
EstimateReport check_two_sided(const HeatSemigroup& hs, const ScalingFunction& w, double beta,
                               const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                               const std::vector<double>& t_ladder, const TwoSidedOptions& opt = {});

// Seeded pairs (x, x) and (x, y): x a base-level vertex, y a vertex one level
// finer, so the same physical pairs exist at every finer level.
std::vector<std::pair<std::size_t, std::size_t>> heat_pairs(const HeatSemigroup& hs, std::size_t xs,
                                                            std::size_t per_x, std::uint64_t seed = 1,
                                                            std::size_t base_level = 3);

struct SurvivalOptions {
  double inner = 0.5;  // delta_S
  double time = 0.5;   // survival floor read at t = time W(B)
  TrendOptions trend{.stabilization = 0.25, .growth = 1.5, .rungs = 3};
};

// min over delta_S B of P^B_t 1_B at t = tau W(x0, r) for each tau in the ladder.
EstimateReport check_survival(const HeatSemigroup& hs, const ScalingFunction& w, const std::vector<HeatBall>& balls,
                              const std::vector<double>& tau_ladder, const SurvivalOptions& opt = {});

// lambda_1(U) W(B) against mu(B)/mu(U) for sub-balls U of each B.
EstimateReport check_fk(const HeatSemigroup& hs, const ScalingFunction& w, const std::vector<HeatBall>& balls,
                        const std::vector<double>& sub_fractions = {1.0, 0.7, 0.5, 0.35, 0.25});

// sup over B/2 of P_t 1_{B^c} against (W(B)/t)^{1/(beta-1)}.
EstimateReport check_tail(const HeatSemigroup& hs, const ScalingFunction& w, double beta,
                          const std::vector<HeatBall>& balls, const std::vector<double>& tau_ladder,
                          double value_floor = 1e-12);

struct ChainResult {
  bool reachable = false;
  double cost = 0;
  std::vector<std::size_t> chain;  // vertex ids of the level-n network
  std::vector<Vec2> points;
};

// Hop-bounded bottleneck path on the level-n vertex graph with directed step
// cost W(x_{i-1}, |x_{i-1} - x_i|). x and y are vertex ids of build_network(sys, ., n).
ChainResult minimax_chain_cost(const FractalSystem& sys, const ScalingFunction& w, std::size_t n, std::size_t x,
                               std::size_t y, std::size_t hop_cap);
ChainResult minimax_chain_cost(const ResistanceNetwork& graph, const FractalSystem& sys, const ScalingFunction& w,
                               std::size_t x, std::size_t y, std::size_t hop_cap);

struct WalkDimensionFit {
  double beta = NAN;
  double slope = NAN;  // of log p_t(x,x) against log t, averaged over x
  double alpha = NAN;
  double r2 = 0;
  std::size_t points = 0;
  Verdict verdict = Verdict::Inconclusive;
};

// beta = -alpha / slope. Needs at least 6 ladder points.
WalkDimensionFit fit_walk_dimension(const HeatSemigroup& hs, const std::vector<std::size_t>& xs,
                                    const std::vector<double>& t_ladder, double alpha);

// Log-spaced times.
std::vector<double> log_ladder(double lo, double hi, std::size_t count);

}  // namespace sslab
