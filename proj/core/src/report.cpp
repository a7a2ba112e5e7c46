#include "sslab/report.hpp"

#include <algorithm>
#include <cmath>

#include "sslab/fit.hpp"

namespace sslab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(Condition c) {
  switch (c) {
    case Condition::AV: return "AV";
    case Condition::WOC: return "WOC";
    case Condition::CP: return "CP";
    case Condition::CH: return "CH";
    case Condition::VD: return "VD";
    case Condition::Resistance: return "R";
    case Condition::DUE: return "DUE";
    case Condition::UE_exp: return "UE_exp";
    case Condition::NLE: return "NLE";
    case Condition::LE_exp: return "LE_exp";
    case Condition::S: return "S";
    case Condition::FK: return "FK";
    case Condition::T_exp: return "T_exp";
    case Condition::TwoSided: return "TwoSided";
    case Condition::WalkDimension: return "WalkDimension";
    case Condition::Chain: return "Chain";
  }
  return "?";
}

void Report::set(const std::string& name, double value) {
  for (auto& [k, v] : constants)
    if (k == name) {
      v = value;
      return;
    }
  constants.emplace_back(name, value);
}

std::optional<double> Report::get(const std::string& name) const {
  for (const auto& [k, v] : constants)
    if (k == name) return v;
  return std::nullopt;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  LineFit f;
  if (n < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0 ? 1.0 : sxy * sxy / (sxx * syy);
  return f;
}

std::vector<double> dyadic_ladder(int k_lo, int k_hi) {
  std::vector<double> r;
  for (int k = k_lo; k <= k_hi; ++k) r.push_back(std::ldexp(1.0, -k));
  return r;
}

Verdict classify_trend(const std::vector<double>& v, const TrendOptions& opt) {
  if (v.size() < opt.rungs + 1) return Verdict::Inconclusive;
  for (double x : v)
    if (!std::isfinite(x)) return Verdict::Fail;
  const std::size_t k = v.size() - 1 - opt.rungs;
  bool growing = true;
  for (std::size_t i = k; i + 1 < v.size(); ++i) growing = growing && v[i + 1] >= opt.growth * v[i];
  if (growing) return Verdict::Fail;
  const double before = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k) + 1);
  const double after = *std::max_element(v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return after <= (1 + opt.stabilization) * before ? Verdict::Pass : Verdict::Inconclusive;
}

Verdict classify_counts(const std::vector<double>& c, const TrendOptions& opt) {
  if (c.size() < opt.rungs + 1) return Verdict::Inconclusive;
  for (double x : c)
    if (!std::isfinite(x)) return Verdict::Fail;
  const std::size_t k = c.size() - 1 - opt.rungs;
  bool increasing = true;
  for (std::size_t i = k; i + 1 < c.size(); ++i) increasing = increasing && c[i + 1] > c[i];
  if (increasing) return Verdict::Fail;
  const double before = *std::max_element(c.begin(), c.end() - 1);
  return c.back() <= before ? Verdict::Pass : Verdict::Inconclusive;
}

}  // namespace sslab
