#include "output.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "sslab/errors.hpp"

namespace sslab::cli {
namespace {

std::ofstream open(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ResourceError(fmt::format("cannot write {}", file.string()));
  return out;
}

std::string cell(double v) { return fmt::format("{:.17g}", v); }

std::string escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

Json report_json(const Report& rep) {
  Json j;
  j["condition"] = to_string(rep.condition);
  j["verdict"] = to_string(rep.verdict);
  j["witnessed_constant"] = rep.witnessed_constant;
  j["constants"] = Json::object();
  for (const auto& [k, v] : rep.constants) j["constants"][k] = v;
  j["failure_witness"] = rep.failure_witness ? Json(*rep.failure_witness) : Json(nullptr);
  j["notes"] = rep.notes;
  j["sample_count"] = rep.samples.size();
  return j;
}

void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  auto out = open(file);
  out << fmt::format("{}\n", fmt::join(header, ","));
  for (const auto& row : rows) {
    std::vector<std::string> cells;
    for (double v : row) cells.push_back(cell(v));
    out << fmt::format("{}\n", fmt::join(cells, ","));
  }
}

void write_samples_csv(const std::filesystem::path& file, const Report& rep) {
  std::size_t width = 0;
  for (const auto& s : rep.samples) width = std::max(width, s.input.size());
  auto out = open(file);
  out << "label,value";
  for (std::size_t i = 0; i < width; ++i) out << ",in" << i;
  out << "\n";
  for (const auto& s : rep.samples) {
    out << escape(s.label) << "," << cell(s.value);
    for (std::size_t i = 0; i < width; ++i) out << "," << (i < s.input.size() ? cell(s.input[i]) : "");
    out << "\n";
  }
}

void write_text(const std::filesystem::path& file, const std::string& text) { open(file) << text; }

void write_json(const std::filesystem::path& file, const Json& j) { open(file) << j.dump(2) << "\n"; }

std::vector<std::string> write_report(const std::filesystem::path& dir, const std::string& stem, const Report& rep,
                                      const Json& inputs) {
  Json j = report_json(rep);
  j["inputs"] = inputs;
  const auto json_name = stem + ".json", csv_name = stem + ".csv";
  j["samples_csv"] = csv_name;
  write_json(dir / json_name, j);
  write_samples_csv(dir / csv_name, rep);
  return {json_name, csv_name};
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Pass: return 0;
    case Verdict::Fail: return 1;
    case Verdict::Inconclusive: return 2;
  }
  return 2;
}

Verdict worst(Verdict a, Verdict b) {
  if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
  if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
  return Verdict::Pass;
}

}  // namespace sslab::cli
