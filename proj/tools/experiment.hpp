#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "sslab/geometry.hpp"
#include "sslab/heat.hpp"
#include "sslab/measure.hpp"
#include "sslab/network.hpp"
#include "sslab/report.hpp"
#include "sslab/scaling.hpp"

namespace sslab::cli {

inline const std::vector<std::string> kCheckNames{"av", "woc", "cp", "ch", "vd", "resistance",
                                                  "due", "twosided", "survival", "fk", "tail"};

// Heavy objects built on first use and shared between checks.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg);

  const ExperimentConfig& config() const { return cfg_; }
  const FractalSystem& system() const { return *sys_; }
  std::shared_ptr<const FractalSystem> system_handle() const { return sys_; }
  bool triangle() const { return sys_->planar(); }
  const Tuple& p() const { return p_; }
  std::shared_ptr<const SelfSimilarMeasure> measure() const { return mu_; }

  const SolveBResult& solved_b();
  double b();
  Tuple resistance() { return resistance_tuple(*sys_, b(), cfg_.network.s); }
  // W with zeta_i = p_i r_i; on K this is build_w.
  const ScalingFunction& walk();
  double beta();  // beta_1 = ln psi_1 / ln rho_1
  std::size_t heat_level() const;
  const HeatSemigroup& heat();
  // Equal ratios, weights and W-weights: a single walk dimension exists.
  bool homogeneous();

  Report check(const std::string& name);
  Report walk_dimension();
  Report chains();

 private:
  void require_triangle(const std::string& what) const;

  ExperimentConfig cfg_;
  std::shared_ptr<const FractalSystem> sys_;
  Tuple p_;
  std::shared_ptr<const SelfSimilarMeasure> mu_;
  std::optional<SolveBResult> solve_;
  std::optional<ScalingFunction> w_;
  std::optional<WalkExponents> exps_;
  std::unique_ptr<HeatSemigroup> heat_;
};

}  // namespace sslab::cli
