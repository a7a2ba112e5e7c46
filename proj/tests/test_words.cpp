#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "sslab/errors.hpp"
#include "sslab/words.hpp"
#include "support.hpp"

using namespace sslab;

TEST_CASE("tuple_weight") {
  const Tuple t{0.5, 0.5, 0.5, 0.25};
  CHECK(tuple_weight(Word{}, t) == 1.0);
  CHECK(tuple_weight(Word{1, 2, 4}, t) == doctest::Approx(1.0 / 16).epsilon(1e-15));
  CHECK_THROWS_AS(tuple_weight(Word{5}, t), DomainError);

  for (int k = 0; k < 100; ++k) {
    const Tuple th = testing::random_tuple(4);
    const Word a = testing::random_word(testing::uniform_int(0, 8), 4);
    const Word b = testing::random_word(testing::uniform_int(0, 8), 4);
    CHECK(tuple_weight(a + b, th) == doctest::Approx(tuple_weight(a, th) * tuple_weight(b, th)).epsilon(1e-14));
  }
}

TEST_CASE("tuple validation") {
  CHECK_THROWS_AS(Tuple({0.5}), DomainError);
  CHECK_THROWS_AS(Tuple({0.5, 1.0}), DomainError);
  CHECK_THROWS_AS(Tuple({0.0, 0.5}), DomainError);
  CHECK(Tuple({0.25, 0.75}).is_probability());
}

TEST_CASE("partition matches brute-force enumeration") {
  SUBCASE("SG ratios at r=0.3 give the nine words of length two") {
    const Tuple t{0.5, 0.5, 0.5};
    const auto p = partition(t, 0.3);
    REQUIRE(p.size() == 9);
    for (const auto& w : p.words) CHECK(w.size() == 2);
  }
  SUBCASE("K_1/4 ratios at r=0.3") {
    const Tuple t{0.5, 0.5, 0.5, 0.25};
    const auto p = partition(t, 0.3);
    const auto oracle = testing::brute_partition(t, 0.3, 6);
    CHECK(p.words == oracle);
    // 11..33, the three words i4, and 4 itself.
    CHECK(p.size() == 13);
    CHECK(p.contains(Word{4}));
    CHECK(p.contains(Word{1, 4}));
  }
  SUBCASE("random tuples") {
    for (int k = 0; k < 30; ++k) {
      const Tuple t = testing::random_tuple(static_cast<std::size_t>(testing::uniform_int(2, 3)), 0.2, 0.55);
      const double r = testing::uniform(0.05, 0.9);
      const auto len = static_cast<std::size_t>(std::ceil(std::log(r * t.min()) / std::log(t.max()))) + 1;
      CHECK(partition(t, r).words == testing::brute_partition(t, r, len));
    }
  }
  CHECK_THROWS_AS(partition(Tuple{0.5, 0.5}, 1.0), DomainError);
  CHECK_THROWS_AS(partition(Tuple{0.5, 0.5}, 0.0), DomainError);
}

TEST_CASE("partition ties follow the half-open convention") {
  const Tuple t{0.5, 0.5};
  const auto p = partition(t, 0.25);
  for (const auto& w : p.words) CHECK(w.size() == 2);
}

TEST_CASE("partition properties on random (theta, r)") {
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = static_cast<std::size_t>(testing::uniform_int(2, 5));
    const Tuple t = testing::random_contraction(n);
    const Tuple prob = testing::random_probability(n);
    const double r = std::exp(testing::uniform(std::log(1e-4), std::log(0.9)));
    const auto p = partition(t, r);
    double sum = 0;
    for (const auto& w : p.words) {
      const double tw = tuple_weight(w, t);
      CHECK(t.min() * r < tw);
      CHECK(tw <= r);
      sum += tuple_weight(w, prob);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    // Every infinite word has exactly one prefix in the partition.
    for (int j = 0; j < 20; ++j) {
      const Word omega = testing::random_word(80, static_cast<int>(n));
      int hits = 0;
      for (std::size_t len = 1; len <= omega.size(); ++len) hits += p.contains(omega.prefix(len));
      CHECK(hits == 1);
    }
  }
}

TEST_CASE("power sandwich and refinement bounds") {
  for (int k = 0; k < 50; ++k) {
    const Tuple th = testing::random_contraction(3);
    const Tuple ze = testing::random_tuple(3, 0.1, 0.8);
    const auto e = exponents(th, ze);
    const double r1 = testing::uniform(0.05, 0.5);
    const double r2 = r1 * testing::uniform(0.01, 1.0);
    const auto coarse = partition(th, r1);
    const auto fine = partition(th, r2);
    for (const auto& w : fine.words) {
      const double tw = tuple_weight(w, th), zw = tuple_weight(w, ze);
      CHECK(std::pow(tw, e.upper) <= zw * (1 + 1e-12));
      CHECK(zw <= std::pow(tw, e.lower) * (1 + 1e-12));
      const Word a = ancestor_in(w, coarse);
      const double ratio = tw / tuple_weight(a, th);
      CHECK(th.min() * r2 / r1 <= ratio * (1 + 1e-12));
      CHECK(ratio <= r2 / (th.min() * r1) * (1 + 1e-12));
      const double tail = static_cast<double>(w.size() - a.size());
      CHECK(tail <= std::log(th.min() * r2 / r1) / std::log(th.max()) + 1e-9);
    }
  }
}

TEST_CASE("exponents") {
  const Tuple h{0.5, 0.5, 0.5};
  auto e = exponents(h, h);
  CHECK(e.lower == doctest::Approx(1.0));
  CHECK(e.upper == doctest::Approx(1.0));
  e = exponents(h, Tuple{1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(e.lower == doctest::Approx(std::log2(3.0)).epsilon(1e-14));
  CHECK(e.upper == doctest::Approx(std::log2(3.0)).epsilon(1e-14));
  e = exponents(Tuple{0.5, 0.25}, Tuple{0.2, 0.2});
  CHECK(e.lower == doctest::Approx(std::log(5.0) / std::log(4.0)).epsilon(1e-14));
  CHECK(e.upper == doctest::Approx(std::log(5.0) / std::log(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(exponents(h, Tuple{0.5, 0.5}), DomainError);
}

TEST_CASE("ancestor_in") {
  const Tuple t{0.5, 0.5, 0.5};
  const auto coarse = partition(t, 0.3);
  CHECK(ancestor_in(Word{1, 2, 3}, coarse) == Word{1, 2});
  CHECK(ancestor_in(Word{3, 1}, coarse) == Word{3, 1});
  CHECK_THROWS_AS(ancestor_in(Word{1}, coarse), ConsistencyError);
}

TEST_CASE("digit 4 counts") {
  CHECK(n4_count(Word{}) == 0);
  CHECK(n4_count(Word{1, 4, 2, 4}) == 2);
  for (int k = 0; k < 50; ++k) {
    const Word a = testing::random_word(6, 4), b = testing::random_word(5, 4);
    CHECK(n4_count(a + b) == n4_count(a) + n4_count(b));
  }
}

TEST_CASE("address streams are deterministic") {
  const AddressStream s(Word{2, 1}, Word{3, 4});
  CHECK(s.take(7) == Word{2, 1, 3, 4, 3, 4, 3});
  CHECK(s.take(7) == s.take(7));
  CHECK(s.digit(1) == 2);
  CHECK_THROWS_AS(AddressStream(Word{1}, Word{}), DomainError);
  CHECK(Word::parse("1424") == Word{1, 4, 2, 4});
  CHECK_THROWS_AS(Word::parse("102"), DomainError);
}
