#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sslab/report.hpp"

namespace sslab::cli {

using Json = nlohmann::ordered_json;

Json report_json(const Report& rep);

// Rows are written with {:.17g}; NaN as "nan".
void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
// label, value, in0, in1, ... (inputs padded to the widest sample)
void write_samples_csv(const std::filesystem::path& file, const Report& rep);

void write_text(const std::filesystem::path& file, const std::string& text);
void write_json(const std::filesystem::path& file, const Json& j);

// <dir>/<stem>.json and <dir>/<stem>.csv; returns the file names written.
std::vector<std::string> write_report(const std::filesystem::path& dir, const std::string& stem, const Report& rep,
                                      const Json& inputs);

int exit_code(Verdict v);
Verdict worst(Verdict a, Verdict b);

}  // namespace sslab::cli
