#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "config.hpp"
#include "experiment.hpp"
#include "output.hpp"
#include "sslab/errors.hpp"
#include "sslab/fit.hpp"
#include "sslab/measure.hpp"
#include "sslab/words.hpp"

namespace fs = std::filesystem;
using namespace sslab;
using namespace sslab::cli;

namespace {

constexpr int kUsage = 64;     // EX_USAGE
constexpr int kSoftware = 70;  // EX_SOFTWARE

struct Overrides {
  std::optional<std::string> fixture;
  std::optional<double> lambda, s, b;
  std::vector<double> p;
  std::optional<int> level;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string config;
};

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg;
  if (!o.config.empty()) load_config_file(o.config, cfg);
  if (o.fixture) cfg.fixture.name = *o.fixture;
  if (o.lambda) cfg.fixture.lambda = *o.lambda;
  if (!o.p.empty()) cfg.measure.p = o.p;
  if (o.s) cfg.network.s = *o.s;
  if (o.b) cfg.network.b = *o.b;
  if (o.level) cfg.network.level = cfg.heat.level = *o.level;
  if (o.seed) cfg.run.seed = *o.seed;
  if (o.out) cfg.run.out = *o.out;
  return cfg;
}

std::string slug(const FractalSystem& sys) {
  switch (sys.kind) {
    case SystemKind::KLambda: return fmt::format("k-{:.6g}", sys.lambda);
    case SystemKind::Sierpinski: return "sg";
    case SystemKind::Cantor: return "cantor";
    case SystemKind::Interval: return fmt::format("interval-{}", sys.size());
    case SystemKind::Custom: break;
  }
  return "custom";
}

void announce(const std::string& what, Verdict v, double constant = NAN) {
  if (std::isfinite(constant))
    fmt::print("{}: {} ({:.6g})\n", what, to_string(v), constant);
  else
    fmt::print("{}: {}\n", what, to_string(v));
}

// Subcommands --------------------------------------------------------------

int cmd_render(Experiment& ex, std::optional<int> depth, bool figures) {
  const fs::path dir = ex.config().run.out;
  const auto d = static_cast<std::size_t>(depth.value_or(ex.config().geometry.depth));
  if (!figures) {
    const auto file = dir / fmt::format("render-{}.svg", slug(ex.system()));
    write_text(file, render_svg(ex.system(), d));
    fmt::print("{}\n", file.string());
    return 0;
  }
  for (double lambda : {0.25, 1.0 / 3, 1.0 / std::sqrt(13.0)}) {
    const auto sys = build_system(SystemKind::KLambda, {.lambda = lambda});
    const auto file = dir / fmt::format("render-{}.svg", slug(sys));
    write_text(file, render_svg(sys, d));
    fmt::print("{}\n", file.string());
  }
  return 0;
}

int cmd_partition(Experiment& ex, std::optional<double> r_flag) {
  const double r = r_flag.value_or(ex.config().words.r);
  const auto& theta = ex.system().ratios;
  const auto part = partition(theta, r);
  const fs::path dir = ex.config().run.out;

  double lo = INFINITY, hi = 0, mass = 0;
  std::ofstream csv;
  fs::create_directories(dir);
  csv.open(dir / "partition.csv", std::ios::binary);
  csv << "word,theta_w,p_w\n";
  for (const auto& w : part.words) {
    const double tw = tuple_weight(w, theta), pw = tuple_weight(w, ex.p());
    lo = std::min(lo, tw / r);
    hi = std::max(hi, tw / r);
    mass += pw;
    csv << w.str() << fmt::format(",{:.17g},{:.17g}\n", tw, pw);
  }
  const bool ok = lo > theta.min() && hi <= 1 && std::abs(mass - 1) <= 1e-12;
  Json j;
  j["fixture"] = ex.system().name();
  j["resolution"] = r;
  j["size"] = part.size();
  j["theta_min"] = theta.min();
  j["min_theta_w_over_r"] = lo;
  j["max_theta_w_over_r"] = hi;
  j["p_sum"] = mass;
  j["verdict"] = to_string(ok ? Verdict::Pass : Verdict::Fail);
  j["words_csv"] = "partition.csv";
  write_json(dir / "partition.json", j);
  announce(fmt::format("partition ({} words)", part.size()), ok ? Verdict::Pass : Verdict::Fail);
  return ok ? 0 : 1;
}

// H with the walk weights on triangle fixtures, with zeta = p elsewhere.
ScalingFunction scaling_for(Experiment& ex) {
  if (ex.triangle()) return ex.walk();
  return ScalingFunction(ex.system().ratios, ex.p(), ex.system().diameter, ex.system_handle());
}

Json scaling_stage(Experiment& ex, const fs::path& dir, std::vector<std::string>& artifacts) {
  const auto sf = scaling_for(ex);
  const auto& sys = ex.system();
  const auto ladder = dyadic_ladder(1, 12);
  const auto pts = level_vertices(sys, 2);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto x = canonical_point(sys, pts[i]);
    for (double r : ladder) rows.push_back({static_cast<double>(i), r, sf(x, r)});
  }
  write_csv(dir / "scaling.csv", {"x_id", "r", "H"}, rows);
  artifacts.push_back("scaling.csv");

  Json j;
  j["theta"] = sf.theta().values();
  j["zeta"] = sf.zeta().values();
  j["exponent_lower"] = sf.exponents().lower;
  j["exponent_upper"] = sf.exponents().upper;
  if (sys.kind == SystemKind::KLambda) {
    const auto w = build_w(sys.lambda, ex.config().network.s, ex.b(), ex.p());
    j["b"] = ex.b();
    j["beta1"] = w.beta.beta1;
    j["beta4"] = w.beta.beta4;
    j["beta_lower"] = w.beta.beta_lower;
    j["beta_upper"] = w.beta.beta_upper;
    const auto inh = inhomogeneity_report(w, dyadic_ladder(4, 12));
    j["slope_q1"] = inh.slope_q1;
    j["slope_q4"] = inh.slope_q4;
    j["expected_q1"] = inh.expected_q1;
    j["expected_q4"] = inh.expected_q4;
    j["diverging"] = inh.diverging;
  } else if (ex.triangle()) {
    j["b"] = ex.b();
    j["beta1"] = ex.beta();
  }
  return j;
}

int cmd_scaling(Experiment& ex) {
  const fs::path dir = ex.config().run.out;
  std::vector<std::string> artifacts;
  auto j = scaling_stage(ex, dir, artifacts);
  j["curves_csv"] = artifacts.front();
  write_json(dir / "scaling.json", j);
  fmt::print("{}\n", (dir / "scaling.json").string());
  return 0;
}

int cmd_measure(Experiment& ex) {
  const fs::path dir = ex.config().run.out;
  const auto& sys = ex.system();
  const auto pts = level_vertices(sys, 2);
  std::vector<std::vector<double>> rows;
  double worst_ratio = 1;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (double r : dyadic_ladder(1, 10)) {
      const auto v = ball_volume(*ex.measure(), pts[i], r);
      rows.push_back({static_cast<double>(i), r, v.lower, v.upper});
      worst_ratio = std::max(worst_ratio, v.upper / v.lower);
    }
  write_csv(dir / "measure.csv", {"x_id", "r", "lower", "upper"}, rows);
  Json j;
  j["fixture"] = sys.name();
  j["p"] = ex.p().values();
  j["max_bracket_ratio"] = worst_ratio;
  j["volumes_csv"] = "measure.csv";
  write_json(dir / "measure.json", j);
  fmt::print("{}\n", (dir / "measure.json").string());
  return 0;
}

Json solve_b_json(Experiment& ex, const fs::path& dir) {
  const auto& res = ex.solved_b();
  std::vector<std::vector<double>> rows;
  for (const auto& [b, f] : res.curve) rows.push_back({b, f});
  write_csv(dir / "solve-b.csv", {"b", "residual"}, rows);
  Json j;
  j["s"] = ex.config().network.s;
  j["level"] = ex.config().network.solve_level;
  j["b"] = res.b;
  j["residual"] = res.residual;
  j["verdict"] = to_string(res.verdict);
  j["curve_csv"] = "solve-b.csv";
  return j;
}

int cmd_solve_b(Experiment& ex) {
  const fs::path dir = ex.config().run.out;
  const auto j = solve_b_json(ex, dir);
  write_json(dir / "solve-b.json", j);
  announce(fmt::format("solve-b b={:.10g}", ex.solved_b().b), ex.solved_b().verdict);
  return exit_code(ex.solved_b().verdict);
}

std::vector<std::string> check_tables(const std::string& name) {
  if (name == "av" || name == "woc" || name == "cp" || name == "ch") return {"fixture", "conditions", "measure", "run"};
  if (name == "vd") return {"fixture", "measure", "run"};
  if (name == "resistance") return {"fixture", "network", "run"};
  return {"fixture", "measure", "network", "heat", "run"};
}

int cmd_check(Experiment& ex, const std::string& name) {
  const auto rep = ex.check(name);
  write_report(ex.config().run.out, "check-" + name, rep, config_json(ex.config(), check_tables(name)));
  announce(name, rep.verdict, rep.witnessed_constant);
  if (rep.failure_witness) fmt::print("  witness: {}\n", *rep.failure_witness);
  return exit_code(rep.verdict);
}

int cmd_chains(Experiment& ex) {
  const auto rep = ex.chains();
  write_report(ex.config().run.out, "chains", rep, config_json(ex.config(), {"fixture", "measure", "network", "chains"}));
  announce("chains", rep.verdict, rep.witnessed_constant);
  return exit_code(rep.verdict);
}

// Pipeline -----------------------------------------------------------------

struct Stage {
  std::string name;
  Verdict verdict = Verdict::Pass;
  Json summary = Json::object();
  std::vector<std::string> artifacts;
  std::optional<std::string> error;
  bool skipped = false;
};

int cmd_pipeline(Experiment& ex) {
  const auto& cfg = ex.config();
  const fs::path dir = cfg.run.out;
  fs::create_directories(dir);
  std::vector<Stage> stages;
  std::optional<std::string> halted;
  bool usage = false;

  const auto add_report = [&](Stage& st, const std::string& stem, const Report& rep, const std::vector<std::string>& tables) {
    for (auto& f : write_report(dir, stem, rep, config_json(cfg, tables))) st.artifacts.push_back(std::move(f));
    Json r;
    r["verdict"] = to_string(rep.verdict);
    r["witnessed_constant"] = rep.witnessed_constant;
    for (const auto& [k, v] : rep.constants) r["constants"][k] = v;
    if (rep.failure_witness) r["failure_witness"] = *rep.failure_witness;
    st.summary[stem] = r;
    st.verdict = worst(st.verdict, rep.verdict);
    announce(fmt::format("  {}", stem), rep.verdict, rep.witnessed_constant);
  };

  const auto run = [&](const std::string& name, bool needs_triangle, const std::function<void(Stage&)>& body) {
    Stage st;
    st.name = name;
    if (halted || (needs_triangle && !ex.triangle())) {
      st.skipped = true;
      st.verdict = Verdict::Inconclusive;
      stages.push_back(std::move(st));
      return;
    }
    fmt::print("stage {}\n", name);
    try {
      body(st);
    } catch (const DomainError& e) {
      st.error = e.what();
      st.verdict = Verdict::Fail;
      usage = true;
    } catch (const ResourceError& e) {
      st.error = e.what();
      st.verdict = Verdict::Inconclusive;
    } catch (const InconclusiveError& e) {
      st.error = e.what();
      st.verdict = Verdict::Inconclusive;
    } catch (const std::exception& e) {
      st.error = e.what();
      st.verdict = Verdict::Fail;
    }
    if (st.error) fmt::print("  error: {}\n", *st.error);
    if (st.verdict == Verdict::Fail || st.error) halted = name;
    stages.push_back(std::move(st));
  };

  run("geometry", false, [&](Stage& st) {
    const auto& sys = ex.system();
    const auto level = static_cast<std::size_t>(cfg.geometry.check_level);
    const auto svg = fmt::format("render-{}.svg", slug(sys));
    write_text(dir / svg, render_svg(sys, static_cast<std::size_t>(cfg.geometry.depth)));
    st.artifacts.push_back(svg);
    st.summary["fixture"] = sys.name();
    st.summary["maps"] = sys.size();
    st.summary["open_set_violations"] = open_set_violations(sys, level);
    if (sys.kind == SystemKind::KLambda) {
      st.summary["lambda_star"] = lambda_star(sys.lambda);
      st.summary["c0"] = c0(sys.lambda);
    }
    if (sys.planar()) {
      const double defect = rotation_symmetry_defect(sys, level);
      st.summary["rotation_symmetry_defect"] = defect;
      if (defect > 1e-9) st.verdict = Verdict::Fail;
    }
  });
  run("conditions", false, [&](Stage& st) {
    for (const std::string name : {"av", "woc", "cp", "ch", "vd"})
      add_report(st, "check-" + name, ex.check(name), check_tables(name));
  });
  run("solve-b", true, [&](Stage& st) {
    st.summary = solve_b_json(ex, dir);
    st.artifacts.push_back("solve-b.csv");
    st.verdict = cfg.network.b > 0 ? Verdict::Pass : ex.solved_b().verdict;
    st.summary["b_used"] = ex.b();
    announce(fmt::format("  b={:.10g}", ex.b()), st.verdict);
  });
  run("scaling", true, [&](Stage& st) { st.summary = scaling_stage(ex, dir, st.artifacts); });
  run("resistance", true, [&](Stage& st) { add_report(st, "check-resistance", ex.check("resistance"), check_tables("resistance")); });
  run("heat", true, [&](Stage& st) {
    st.summary["level"] = ex.heat_level();
    st.summary["vertices"] = ex.heat().size();
    for (const std::string name : {"due", "twosided", "survival", "fk", "tail"})
      add_report(st, "check-" + name, ex.check(name), check_tables(name));
    if (ex.homogeneous()) add_report(st, "walk-dimension", ex.walk_dimension(), {"fixture", "measure", "network", "heat"});
  });
  run("chains", true, [&](Stage& st) { add_report(st, "chains", ex.chains(), {"fixture", "measure", "network", "chains"}); });

  Verdict overall = Verdict::Pass;
  Json index;
  index["fixture"] = ex.system().name();
  index["config"] = config_json(cfg);
  index["stages"] = Json::array();
  for (const auto& st : stages) {
    Json s;
    s["name"] = st.name;
    s["status"] = st.skipped ? "skipped" : to_string(st.verdict);
    if (st.error) s["error"] = *st.error;
    s["artifacts"] = st.artifacts;
    s["summary"] = st.summary;
    index["stages"].push_back(s);
    if (!st.skipped) overall = worst(overall, st.verdict);
  }
  index["halted_at"] = halted ? Json(*halted) : Json(nullptr);
  index["verdict"] = to_string(overall);
  write_json(dir / "index.json", index);
  announce("pipeline", overall);
  if (usage) return kUsage;
  return exit_code(overall);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat-kernel and scaling experiments on self-similar sets", "sslab"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  bool print_defaults = false;
  app.add_option("--config", o.config, "Config file ([table] key = value)");
  app.add_flag("--print-defaults", print_defaults, "Print the default config and exit");
  app.add_option("--fixture", o.fixture, "SG | K | Cantor | Interval");
  app.add_option("--lambda", o.lambda, "K_lambda parameter");
  app.add_option("--p", o.p, "Measure weights, comma separated")->delimiter(',');
  app.add_option("--s", o.s, "Resistance ratio of the fourth map");
  app.add_option("--b", o.b, "Renormalization b (solved when absent)");
  app.add_option("--level", o.level, "Network and heat level");
  app.add_option("--seed", o.seed, "Sampling seed");
  app.add_option("--out", o.out, "Output directory");

  std::function<int(Experiment&)> action;

  auto* render = app.add_subcommand("render", "SVG of the level-depth cells");
  std::optional<int> depth;
  bool figures = false;
  render->add_option("--depth", depth, "Render depth");
  render->add_flag("--figures", figures, "K_lambda for lambda = 1/4, 1/3, 1/sqrt(13)");
  render->callback([&] { action = [&](Experiment& ex) { return cmd_render(ex, depth, figures); }; });

  auto* part = app.add_subcommand("partition", "Words of Lambda_theta(r) with their weights");
  std::optional<double> r;
  part->add_option("--r", r, "Resolution");
  part->callback([&] { action = [&](Experiment& ex) { return cmd_partition(ex, r); }; });

  app.add_subcommand("scaling", "Sampled scaling function and exponents")->callback([&] { action = cmd_scaling; });
  app.add_subcommand("measure", "Certified ball-volume brackets")->callback([&] { action = cmd_measure; });
  app.add_subcommand("solve-b", "Renormalization constant b")->callback([&] { action = cmd_solve_b; });
  app.add_subcommand("chains", "Minimax chain costs across levels")->callback([&] { action = cmd_chains; });
  app.add_subcommand("pipeline", "All stages into one bundle")->callback([&] { action = cmd_pipeline; });

  auto* check = app.add_subcommand("check", "One condition or estimate check");
  std::string condition;
  check->add_option("condition", condition, "Condition name")->required()->check(CLI::IsMember(kCheckNames));
  check->callback([&] { action = [&](Experiment& ex) { return cmd_check(ex, condition); }; });

  // --print-defaults works without a subcommand.
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--print-defaults") {
      print_config(std::cout, ExperimentConfig{});
      return 0;
    }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    Experiment ex(resolve(o));
    return action(ex);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kUsage;
  } catch (const DomainError& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return kUsage;
  } catch (const ResourceError& e) {
    fmt::print(stderr, "inconclusive: {}\n", e.what());
    return 2;
  } catch (const InconclusiveError& e) {
    fmt::print(stderr, "inconclusive: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return kSoftware;
  }
}
