#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sslab {

enum class Verdict { Pass, Fail, Inconclusive };

enum class Condition {
  AV,
  WOC,
  CP,
  CH,
  VD,
  Resistance,
  DUE,
  UE_exp,
  NLE,
  LE_exp,
  S,
  FK,
  T_exp,
  TwoSided,
  WalkDimension,
  Chain,
};

std::string to_string(Verdict v);
std::string to_string(Condition c);

struct Sample {
  std::string label;
  std::vector<double> input;
  double value = 0.0;
};

// Outcome of a condition or estimate check on a finite approximation.
struct Report {
  Condition condition = Condition::AV;
  Verdict verdict = Verdict::Inconclusive;
  double witnessed_constant = NAN;
  std::vector<Sample> samples;
  std::optional<std::string> failure_witness;
  std::vector<std::pair<std::string, double>> constants;  // insertion order kept for stable output
  std::vector<std::string> notes;

  void set(const std::string& name, double value);
  std::optional<double> get(const std::string& name) const;
  bool passed() const { return verdict == Verdict::Pass; }
};

using ConditionReport = Report;
using EstimateReport = Report;

}  // namespace sslab
