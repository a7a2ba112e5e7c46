#include "config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

namespace sslab::cli {
namespace {

using Inputs = std::vector<std::string>;

struct Field {
  std::string table, key;
  std::function<void(const Inputs&)> set;
  std::function<std::string()> show;
  std::function<nlohmann::ordered_json()> json;
};

template <class T>
T parse_number(const std::string& text, const std::string& where) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ConfigError(fmt::format("{}: cannot parse '{}'", where, text));
  return v;
}

Inputs non_empty(const Inputs& in) {
  Inputs out;
  for (const auto& s : in)
    if (!s.empty()) out.push_back(s);
  return out;
}

const std::string& single(const Inputs& in, const std::string& where) {
  if (in.size() != 1) throw ConfigError(fmt::format("{}: expected one value", where));
  return in.front();
}

std::string quote(const std::string& s) { return fmt::format("\"{}\"", s); }

template <class T>
std::string show_number(T v) {
  if constexpr (std::is_floating_point_v<T>)
    return fmt::format("{:.17g}", v);
  else
    return fmt::format("{}", v);
}

template <class T>
Field number(const std::string& table, const std::string& key, T& ref) {
  const auto where = table + "." + key;
  return {table, key, [&ref, where](const Inputs& in) { ref = parse_number<T>(single(non_empty(in), where), where); },
          [&ref] { return show_number(ref); }, [&ref] { return nlohmann::ordered_json(ref); }};
}

template <class T>
Field list(const std::string& table, const std::string& key, std::vector<T>& ref) {
  const auto where = table + "." + key;
  return {table, key,
          [&ref, where](const Inputs& in) {
            ref.clear();
            for (const auto& s : non_empty(in)) ref.push_back(parse_number<T>(s, where));
          },
          [&ref] {
            std::vector<std::string> parts;
            for (auto v : ref) parts.push_back(show_number(v));
            return fmt::format("[{}]", fmt::join(parts, ", "));
          },
          [&ref] { return nlohmann::ordered_json(ref); }};
}

Field text(const std::string& table, const std::string& key, std::string& ref) {
  const auto where = table + "." + key;
  return {table, key, [&ref, where](const Inputs& in) { ref = single(in, where); }, [&ref] { return quote(ref); },
          [&ref] { return nlohmann::ordered_json(ref); }};
}

std::vector<Field> fields(ExperimentConfig& c) {
  return {
      text("fixture", "name", c.fixture.name),
      number("fixture", "lambda", c.fixture.lambda),
      number("fixture", "interval_maps", c.fixture.interval_maps),
      number("words", "r", c.words.r),
      number("geometry", "depth", c.geometry.depth),
      number("geometry", "check_level", c.geometry.check_level),
      list("conditions", "zeta", c.conditions.zeta),
      number("conditions", "res_lo", c.conditions.res_lo),
      number("conditions", "res_hi", c.conditions.res_hi),
      number("conditions", "c1", c.conditions.c1),
      number("conditions", "c2", c.conditions.c2),
      text("conditions", "metric", c.conditions.metric),
      number("conditions", "eps_lo", c.conditions.eps_lo),
      number("conditions", "eps_hi", c.conditions.eps_hi),
      number("conditions", "sample_level", c.conditions.sample_level),
      number("conditions", "sample_random", c.conditions.sample_random),
      number("conditions", "ch_random", c.conditions.ch_random),
      list("measure", "p", c.measure.p),
      number("measure", "vd_points", c.measure.vd_points),
      number("measure", "vd_k_lo", c.measure.vd_k_lo),
      number("measure", "vd_k_hi", c.measure.vd_k_hi),
      number("network", "s", c.network.s),
      number("network", "b", c.network.b),
      number("network", "solve_level", c.network.solve_level),
      number("network", "level", c.network.level),
      list("network", "sweep", c.network.sweep),
      number("network", "pairs", c.network.pairs),
      number("network", "band", c.network.band),
      number("heat", "level", c.heat.level),
      number("heat", "due_k_lo", c.heat.due_k_lo),
      number("heat", "due_k_hi", c.heat.due_k_hi),
      number("heat", "floor_factor", c.heat.floor_factor),
      number("heat", "t_lo", c.heat.t_lo),
      number("heat", "t_hi", c.heat.t_hi),
      number("heat", "t_count", c.heat.t_count),
      number("heat", "xs", c.heat.xs),
      number("heat", "per_x", c.heat.per_x),
      number("heat", "balls", c.heat.balls),
      number("heat", "ball_k_lo", c.heat.ball_k_lo),
      number("heat", "ball_k_hi", c.heat.ball_k_hi),
      list("heat", "survival_taus", c.heat.survival_taus),
      list("heat", "tail_taus", c.heat.tail_taus),
      number("heat", "walk_t_lo", c.heat.walk_t_lo),
      number("heat", "walk_t_hi", c.heat.walk_t_hi),
      number("heat", "walk_t_count", c.heat.walk_t_count),
      number("chains", "n_lo", c.chains.n_lo),
      number("chains", "n_hi", c.chains.n_hi),
      number("chains", "hop_factor", c.chains.hop_factor),
      number("chains", "band", c.chains.band),
      number("run", "seed", c.run.seed),
      text("run", "out", c.run.out),
  };
}

}  // namespace

void load_config(std::istream& in, ExperimentConfig& cfg) {
  auto table = fields(cfg);
  std::map<std::string, Field*> index;
  for (auto& f : table) index[f.table + "." + f.key] = &f;

  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // table open/close markers
    if (item.parents.size() != 1)
      throw ConfigError(fmt::format("key '{}' must sit in exactly one [table]", item.fullname()));
    const auto it = index.find(item.parents.front() + "." + item.name);
    if (it == index.end()) throw ConfigError(fmt::format("unknown config key '{}'", item.fullname()));
    it->second->set(item.inputs);
  }
}

void load_config_file(const std::string& path, ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
  load_config(in, cfg);
}

void print_config(std::ostream& out, const ExperimentConfig& cfg) {
  auto copy = cfg;
  std::string table;
  for (const auto& f : fields(copy)) {
    if (f.table != table) {
      out << (table.empty() ? "" : "\n") << "[" << f.table << "]\n";
      table = f.table;
    }
    out << f.key << " = " << f.show() << "\n";
  }
}

nlohmann::ordered_json config_json(const ExperimentConfig& cfg, const std::vector<std::string>& tables) {
  auto copy = cfg;
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& f : fields(copy)) {
    if (!tables.empty() && std::find(tables.begin(), tables.end(), f.table) == tables.end()) continue;
    if (f.table == "run" && f.key == "out") continue;  // bundles stay relocatable
    j[f.table][f.key] = f.json();
  }
  return j;
}

}  // namespace sslab::cli
