#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sslab/fit.hpp"
#include "sslab/geometry.hpp"
#include "sslab/report.hpp"
#include "sslab/words.hpp"

namespace sslab {

class SelfSimilarMeasure {
 public:
  SelfSimilarMeasure(Tuple weights, std::shared_ptr<const FractalSystem> sys);

  const Tuple& weights() const { return p_; }
  const FractalSystem& system() const { return *sys_; }
  std::shared_ptr<const FractalSystem> system_handle() const { return sys_; }
  double weight(const Word& w) const { return tuple_weight(w, p_); }

  // C_mu = C_* L_1 from witnessed AV and WOC constants; tightens cell upper bounds.
  void set_cell_constant(double c_mu) { c_mu_ = c_mu; }
  std::optional<double> cell_constant() const { return c_mu_; }

 private:
  Tuple p_;
  std::shared_ptr<const FractalSystem> sys_;
  std::optional<double> c_mu_;
};

struct VolumeBound {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t depth = 0;
};

struct MeasureOptions {
  std::size_t refine = 2;  // extra partition levels below the working resolution
  std::size_t cell_cap = 1'000'000;
};

// mu(K_w) in [p_w, min(certified, C_mu p_w)]. The certified upper bound sums
// p_v over cells of length |w|+refine (or whole subtrees) whose hulls meet K_w.
VolumeBound cell_measure_bounds(const SelfSimilarMeasure& mu, const Word& w, std::size_t refine = 12,
                                std::size_t cell_cap = 1'000'000);

// Two-sided bound on mu(B(x,r)) from cells of Lambda_rho(r / (2 Rbar) rho_max^refine).
VolumeBound ball_volume(const SelfSimilarMeasure& mu, const Vec2& x, double r, const MeasureOptions& opt = {});

struct VolumeSample {
  std::string label;
  PointOnFractal x;
  double r = 0.0;
  std::size_t series = 0;  // samples of one series form a rung ladder, coarse to fine
};

// Random points at dyadic radii (series 0), plus probes approaching every
// level-one contact point from each side (one series per side).
std::vector<VolumeSample> doubling_samples(const SelfSimilarMeasure& mu, std::size_t points, int k_lo, int k_hi,
                                           int contact_depth = 20, std::uint64_t seed = 1);

struct DoublingOptions {
  MeasureOptions measure;
  TrendOptions trend{.stabilization = 0.25, .growth = 1.1, .rungs = 4};
};

// max upper(x,2r)/lower(x,r) per rung, classified across rungs; also fits alpha.
ConditionReport doubling_check(const SelfSimilarMeasure& mu, const std::vector<VolumeSample>& samples,
                               const DoublingOptions& opt = {});

}  // namespace sslab
