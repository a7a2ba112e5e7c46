#include "experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "sslab/conditions.hpp"
#include "sslab/errors.hpp"
#include "sslab/fit.hpp"

namespace sslab::cli {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

FractalSystem make_system(const ExperimentConfig& cfg) {
  const auto name = lower(cfg.fixture.name);
  if (name == "sg" || name == "sierpinski") return build_system(SystemKind::Sierpinski);
  if (name == "k" || name == "k_lambda") return build_system(SystemKind::KLambda, {.lambda = cfg.fixture.lambda});
  if (name == "cantor") return build_system(SystemKind::Cantor);
  if (name == "interval")
    return build_system(SystemKind::Interval, {.interval_maps = cfg.fixture.interval_maps});
  throw DomainError(fmt::format("unknown fixture '{}' (SG, K, Cantor, Interval)", cfg.fixture.name));
}

Tuple default_p(const FractalSystem& sys) {
  if (sys.kind == SystemKind::KLambda) return Tuple{0.3, 0.3, 0.3, 0.1};
  return Tuple(std::vector<double>(sys.size(), 1.0 / static_cast<double>(sys.size())));
}

void merge_verdict(Report& into, Verdict v) {
  if (v == Verdict::Fail || into.verdict == Verdict::Fail)
    into.verdict = Verdict::Fail;
  else if (v == Verdict::Inconclusive || into.verdict == Verdict::Inconclusive)
    into.verdict = Verdict::Inconclusive;
}

bool all_equal(const Tuple& t) { return t.max() - t.min() <= 1e-15 * t.max(); }

}  // namespace

Experiment::Experiment(ExperimentConfig cfg)
    : cfg_(std::move(cfg)),
      sys_(std::make_shared<const FractalSystem>(make_system(cfg_))),
      p_(cfg_.measure.p.empty() ? default_p(*sys_) : Tuple(cfg_.measure.p)),
      mu_(std::make_shared<const SelfSimilarMeasure>(p_, sys_)) {
  if (p_.size() != sys_->size() || !p_.is_probability())
    throw DomainError(fmt::format("p = {} is not a probability {}-tuple", p_.str(), sys_->size()));
  if (cfg_.conditions.res_lo > cfg_.conditions.res_hi || cfg_.conditions.eps_lo > cfg_.conditions.eps_hi ||
      cfg_.chains.n_lo > cfg_.chains.n_hi || cfg_.heat.ball_k_lo > cfg_.heat.ball_k_hi)
    throw DomainError("empty ladder: a *_lo bound exceeds its *_hi bound");
}

void Experiment::require_triangle(const std::string& what) const {
  if (!triangle()) throw DomainError(fmt::format("{} needs a triangle fixture (SG or K), got {}", what, sys_->name()));
}

const SolveBResult& Experiment::solved_b() {
  require_triangle("solve-b");
  if (!solve_) solve_ = solve_b(*sys_, cfg_.network.s, static_cast<std::size_t>(cfg_.network.solve_level));
  return *solve_;
}

double Experiment::b() { return cfg_.network.b > 0 ? cfg_.network.b : solved_b().b; }

const ScalingFunction& Experiment::walk() {
  if (!w_) {
    require_triangle("the scaling function W");
    const double b = this->b();
    if (sys_->kind == SystemKind::KLambda) {
      auto w = build_w(sys_->lambda, cfg_.network.s, b, p_);
      exps_ = w.beta;
      w_.emplace(std::move(w.w));
    } else {
      const Tuple r = resistance();
      std::vector<double> psi(p_.size());
      for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = p_.at(i) * r.at(i);
      w_.emplace(sys_->ratios, Tuple(psi), sys_->diameter, sys_);
    }
  }
  return *w_;
}

double Experiment::beta() {
  const auto& w = walk();
  if (exps_) return exps_->beta1;
  return std::log(w.zeta().at(0)) / std::log(w.theta().at(0));
}

std::size_t Experiment::heat_level() const {
  if (cfg_.heat.level > 0) return static_cast<std::size_t>(cfg_.heat.level);
  return sys_->kind == SystemKind::Sierpinski ? 6 : 5;
}

const HeatSemigroup& Experiment::heat() {
  if (!heat_) {
    require_triangle("heat checks");
    heat_ = std::make_unique<HeatSemigroup>(build_network(*sys_, resistance(), heat_level()), mu_);
  }
  return *heat_;
}

bool Experiment::homogeneous() {
  return all_equal(sys_->ratios) && all_equal(p_) && all_equal(walk().zeta());
}

Report Experiment::check(const std::string& name) {
  const auto& c = cfg_.conditions;
  const auto seed = cfg_.run.seed;
  const auto res = dyadic_ladder(c.res_lo, c.res_hi);
  const auto points = [&] {
    return default_point_samples(*sys_, static_cast<std::size_t>(c.sample_level),
                                 static_cast<std::size_t>(c.sample_random), seed);
  };

  if (name == "av") return check_av(*sys_, sys_->ratios, c.zeta.empty() ? p_ : Tuple(c.zeta), res);
  if (name == "woc") return check_woc(*sys_, sys_->ratios, c.c1, res, points());
  if (name == "cp") {
    const double c2 = c.c2 > 0 ? c.c2 : sys_->kind == SystemKind::KLambda ? c0(sys_->lambda) : 0.25;
    return check_cp(*sys_, sys_->ratios, c2, cp_samples(*sys_, sys_->ratios, c2, points(), res, seed));
  }
  if (name == "ch") {
    const auto metric = lower(c.metric);
    if (metric != "euclidean" && metric != "snowflake")
      throw DomainError(fmt::format("unknown metric '{}' (euclidean, snowflake)", c.metric));
    return check_ch(*sys_, metric == "snowflake" ? Metric::Snowflake : Metric::Euclidean,
                    ch_pairs(*sys_, static_cast<std::size_t>(c.ch_random), seed), dyadic_ladder(c.eps_lo, c.eps_hi));
  }
  if (name == "vd") {
    const auto& m = cfg_.measure;
    return doubling_check(*mu_, doubling_samples(*mu_, static_cast<std::size_t>(m.vd_points), m.vd_k_lo, m.vd_k_hi, 20, seed));
  }
  if (name == "resistance") {
    require_triangle("resistance");
    const auto& n = cfg_.network;
    const Tuple r = resistance();
    const ScalingFunction sf(sys_->ratios, r, sys_->diameter, sys_);
    const auto net = build_network(*sys_, r, static_cast<std::size_t>(n.level));
    auto rep = verify_resistance_estimates(*sys_, net, sf, resistance_pairs(*sys_, net, static_cast<std::size_t>(n.pairs), seed), n.band);
    std::vector<std::size_t> levels(n.sweep.begin(), n.sweep.end());
    const auto sweep = resistance_level_sweep(*sys_, r, sf, levels, static_cast<std::size_t>(n.pairs), n.band);
    for (std::size_t i = 0; i < sweep.levels.size(); ++i) {
      rep.set(fmt::format("level{}_lo", sweep.levels[i]), sweep.lo[i]);
      rep.set(fmt::format("level{}_hi", sweep.levels[i]), sweep.hi[i]);
    }
    rep.set("sweep_width", sweep.width);
    rep.set("b", b());
    if (sweep.verdict == Verdict::Fail && !rep.failure_witness)
      rep.failure_witness = fmt::format("level sweep band width {:.4g} exceeds {}", sweep.width, n.band);
    merge_verdict(rep, sweep.verdict);
    return rep;
  }

  const auto& h = cfg_.heat;
  const auto balls = [&] {
    return heat_balls(heat(), static_cast<std::size_t>(h.balls), h.ball_k_lo, h.ball_k_hi, seed);
  };
  if (name == "due") {
    const auto xs = locate_vertices(*sys_, heat().network(), level_vertices(*sys_, 2));
    return check_due(heat(), walk(), xs, dyadic_ladder(h.due_k_lo, h.due_k_hi), {.floor_factor = h.floor_factor, .t_max = 1});
  }
  if (name == "twosided") {
    const double beta = this->beta();
    auto rep = check_two_sided(heat(), walk(), beta,
                               heat_pairs(heat(), static_cast<std::size_t>(h.xs), static_cast<std::size_t>(h.per_x), seed),
                               log_ladder(h.t_lo, h.t_hi, static_cast<std::size_t>(h.t_count)));
    rep.set("beta", beta);
    if (exps_) rep.set("beta4", exps_->beta4);
    return rep;
  }
  if (name == "survival") return check_survival(heat(), walk(), balls(), h.survival_taus);
  if (name == "fk") return check_fk(heat(), walk(), balls());
  if (name == "tail") return check_tail(heat(), walk(), beta(), balls(), h.tail_taus);
  throw DomainError(fmt::format("unknown condition '{}'", name));
}

Report Experiment::walk_dimension() {
  Report rep;
  rep.condition = Condition::WalkDimension;
  const auto& h = cfg_.heat;
  const double alpha = std::log(p_.at(0)) / std::log(sys_->ratios.at(0));
  const double expected = beta();
  const auto fit = fit_walk_dimension(heat(), heat().network().corners,
                                      log_ladder(h.walk_t_lo, h.walk_t_hi, static_cast<std::size_t>(h.walk_t_count)), alpha);
  rep.set("beta", fit.beta);
  rep.set("slope", fit.slope);
  rep.set("alpha", alpha);
  rep.set("r2", fit.r2);
  rep.set("points", static_cast<double>(fit.points));
  rep.set("expected", expected);
  rep.set("relative_error", std::abs(fit.beta - expected) / expected);
  rep.witnessed_constant = fit.beta;
  rep.verdict = fit.verdict;
  if (rep.verdict == Verdict::Pass && !(std::abs(fit.beta - expected) <= 0.05 * expected)) {
    rep.verdict = Verdict::Fail;
    rep.failure_witness = fmt::format("fitted beta {:.6g} is not within 5% of {:.6g}", fit.beta, expected);
  }
  return rep;
}

Report Experiment::chains() {
  Report rep;
  rep.condition = Condition::Chain;
  const auto& c = cfg_.chains;
  const auto& w = walk();
  const double psi1 = w.zeta().at(0);
  double lo = INFINITY, hi = 0;
  bool reachable = true;
  for (int n = c.n_lo; n <= c.n_hi; ++n) {
    const auto g = build_network(*sys_, sys_->ratios, static_cast<std::size_t>(n), {.level_cap = 12});
    const std::size_t cap = static_cast<std::size_t>(c.hop_factor) << n;
    const auto res = minimax_chain_cost(g, *sys_, w, g.corners[0], g.corners[1], cap);
    const double q = res.reachable ? res.cost / std::pow(psi1, n) : NAN;
    rep.samples.push_back({fmt::format("n={}", n),
                           {static_cast<double>(n), static_cast<double>(cap), res.reachable ? static_cast<double>(res.chain.size() - 1) : NAN, res.cost},
                           q});
    if (!res.reachable) {
      reachable = false;
      continue;
    }
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  rep.set("psi1", psi1);
  rep.set("ratio_min", lo);
  rep.set("ratio_max", hi);
  rep.set("band", hi / lo);
  rep.witnessed_constant = hi / lo;
  if (!reachable) {
    rep.verdict = Verdict::Fail;
    rep.failure_witness = "corners not joined within the hop cap at some level";
  } else if (hi / lo > c.band) {
    rep.verdict = Verdict::Fail;
    rep.failure_witness = fmt::format("cost / psi_1^n spans a factor {:.4g} > {}", hi / lo, c.band);
  } else {
    rep.verdict = Verdict::Pass;
  }
  return rep;
}

}  // namespace sslab::cli
