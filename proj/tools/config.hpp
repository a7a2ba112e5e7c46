#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sslab::cli {

// Bad config file, unknown key or unparsable value. Maps to exit 64.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  struct {
    std::string name = "K";  // SG | K | Cantor | Interval
    double lambda = 0.25;
    int interval_maps = 3;
  } fixture;
  struct {
    double r = 1.0 / 64;
  } words;
  struct {
    int depth = 5;
    int check_level = 4;
  } geometry;
  struct {
    std::vector<double> zeta;  // empty: the measure weights p
    int res_lo = 3, res_hi = 9;
    double c1 = 0.25;
    double c2 = 0;  // 0: c0(lambda) on K, 0.25 elsewhere
    std::string metric = "euclidean";
    int eps_lo = 2, eps_hi = 6;
    int sample_level = 3, sample_random = 20, ch_random = 6;
  } conditions;
  struct {
    std::vector<double> p;  // empty: (.3,.3,.3,.1) on K, uniform elsewhere
    int vd_points = 20, vd_k_lo = 2, vd_k_hi = 14;
  } measure;
  struct {
    double s = 0.5;
    double b = 0;  // 0: solve at solve_level
    int solve_level = 5;
    int level = 4;
    std::vector<int> sweep{3, 4, 5, 6};
    int pairs = 60;
    double band = 100;
  } network;
  struct {
    int level = 0;  // 0: 6 on SG, 5 on K
    int due_k_lo = 2, due_k_hi = 14;
    double floor_factor = 10;
    double t_lo = 1e-3, t_hi = 0.5;
    int t_count = 10;
    int xs = 8, per_x = 25;
    int balls = 12, ball_k_lo = 1, ball_k_hi = 3;
    std::vector<double> survival_taus{0.01, 0.05, 0.1, 0.25, 0.5, 1.0};
    std::vector<double> tail_taus{0.02, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0};
    double walk_t_lo = 6.4e-4, walk_t_hi = 1e-2;
    int walk_t_count = 20;
  } heat;
  struct {
    int n_lo = 3, n_hi = 10;
    int hop_factor = 2;  // hop cap hop_factor * 2^n
    double band = 10;
  } chains;
  struct {
    std::uint64_t seed = 1;
    std::string out = "sslab-out";
  } run;
};

// Overlays a TOML-style file ([table] headers, key = value lines) onto cfg.
void load_config(std::istream& in, ExperimentConfig& cfg);
void load_config_file(const std::string& path, ExperimentConfig& cfg);

void print_config(std::ostream& out, const ExperimentConfig& cfg);

// Tables as a JSON object, in declaration order; run.out is left out.
nlohmann::ordered_json config_json(const ExperimentConfig& cfg, const std::vector<std::string>& tables = {});

}  // namespace sslab::cli
