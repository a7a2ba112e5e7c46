#pragma once

#include <cstddef>
#include <vector>

#include "sslab/report.hpp"

namespace sslab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares y = slope x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct TrendOptions {
  double stabilization = 0.05;  // pass: growth over the last rungs at most this fraction
  double growth = 1.5;          // fail: every one of the last rungs grows at least this factor
  std::size_t rungs = 4;
};

// 2^-k for k = k_lo..k_hi.
std::vector<double> dyadic_ladder(int k_lo, int k_hi);

// Verdict on a per-rung sequence of maxima, coarse to fine.
Verdict classify_trend(const std::vector<double>& values, const TrendOptions& opt = {});

// Integer counts: fail when strictly increasing over the last opt.rungs steps,
// pass when the finest rung sets no new maximum.
Verdict classify_counts(const std::vector<double>& counts, const TrendOptions& opt = {});

}  // namespace sslab
