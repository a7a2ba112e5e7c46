#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sslab/geometry.hpp"
#include "sslab/words.hpp"

namespace testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611);
  return g;
}

inline double uniform(double a, double b) {
  return a + (b - a) * static_cast<double>(rng()() >> 11) * 0x1.0p-53;
}

inline int uniform_int(int a, int b) { return a + static_cast<int>(rng()() % static_cast<std::uint64_t>(b - a + 1)); }

inline sslab::Word random_word(std::size_t len, int n) {
  std::vector<sslab::Digit> d(len);
  for (auto& x : d) x = static_cast<sslab::Digit>(uniform_int(1, n));
  return sslab::Word(d);
}

inline sslab::Tuple random_tuple(std::size_t n, double lo = 0.05, double hi = 0.95) {
  std::vector<double> w(n);
  for (auto& x : w) x = uniform(lo, hi);
  return sslab::Tuple(w);
}

// Entries scaled so their sum lies in [lo_sum, hi_sum]; keeps the similarity
// dimension near 1 so partitions stay small.
inline sslab::Tuple random_contraction(std::size_t n, double lo_sum = 0.6, double hi_sum = 1.2) {
  std::vector<double> w(n);
  double s = 0;
  for (auto& x : w) s += (x = uniform(0.2, 1.0));
  const double target = uniform(lo_sum, hi_sum);
  for (auto& x : w) x = std::min(0.9, x * target / s);
  return sslab::Tuple(w);
}

inline sslab::Tuple random_probability(std::size_t n) {
  std::vector<double> w(n);
  double s = 0;
  for (auto& x : w) s += (x = uniform(0.2, 1.0));
  for (auto& x : w) x /= s;
  return sslab::Tuple(w);
}

// Brute-force oracle: all words up to max_len satisfying
// theta_w <= r < theta_w / theta_{w_n}.
inline std::vector<sslab::Word> brute_partition(const sslab::Tuple& theta, double r, std::size_t max_len) {
  std::vector<sslab::Word> out, layer{sslab::Word{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<sslab::Word> next;
    for (const auto& w : layer)
      for (std::size_t d = 1; d <= theta.size(); ++d) {
        auto v = w;
        v.push_back(static_cast<sslab::Digit>(d));
        double tw = 1;
        for (auto x : v.digits()) tw *= theta(x);
        if (tw <= r && r < tw / theta(v.back())) out.push_back(v);
        next.push_back(v);
      }
    layer.swap(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testing
