#include "sslab/words.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "sslab/errors.hpp"

namespace sslab {

Word::Word(std::initializer_list<int> digits) {
  digits_.reserve(digits.size());
  for (int d : digits) {
    if (d < 1 || d > 255) throw DomainError(fmt::format("digit {} out of range", d));
    digits_.push_back(static_cast<Digit>(d));
  }
}

Word::Word(std::vector<Digit> digits) : digits_(std::move(digits)) {
  for (Digit d : digits_)
    if (d < 1) throw DomainError("digit 0 in word");
}

Word Word::parse(std::string_view text) {
  std::vector<Digit> ds;
  ds.reserve(text.size());
  for (char c : text) {
    if (c < '1' || c > '9') throw DomainError(fmt::format("bad digit '{}' in word \"{}\"", c, text));
    ds.push_back(static_cast<Digit>(c - '0'));
  }
  return Word(std::move(ds));
}

Word Word::repeat(Digit d, std::size_t n) { return Word(std::vector<Digit>(n, d)); }

Word Word::prefix(std::size_t n) const {
  n = std::min(n, digits_.size());
  return Word(std::vector<Digit>(digits_.begin(), digits_.begin() + static_cast<std::ptrdiff_t>(n)));
}

Word Word::suffix_from(std::size_t n) const {
  n = std::min(n, digits_.size());
  return Word(std::vector<Digit>(digits_.begin() + static_cast<std::ptrdiff_t>(n), digits_.end()));
}

bool Word::has_prefix(const Word& p) const {
  return p.size() <= size() && std::equal(p.digits_.begin(), p.digits_.end(), digits_.begin());
}

Word Word::operator+(const Word& tail) const {
  std::vector<Digit> ds = digits_;
  ds.insert(ds.end(), tail.digits_.begin(), tail.digits_.end());
  return Word(std::move(ds));
}

std::string Word::str() const {
  if (digits_.empty()) return "()";
  std::string s;
  s.reserve(digits_.size());
  bool wide = std::any_of(digits_.begin(), digits_.end(), [](Digit d) { return d > 9; });
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    if (wide && i) s += '.';
    s += std::to_string(digits_[i]);
  }
  return s;
}

void check_digits(const Word& w, std::size_t n) {
  for (Digit d : w.digits())
    if (d < 1 || d > n) throw DomainError(fmt::format("digit {} of word {} outside 1..{}", d, w.str(), n));
}

Tuple::Tuple(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.size() < 2) throw DomainError("tuple needs at least 2 entries");
  for (double x : w_)
    if (!(x > 0.0 && x < 1.0)) throw DomainError(fmt::format("tuple entry {} not in (0,1)", x));
  auto [lo, hi] = std::minmax_element(w_.begin(), w_.end());
  min_ = *lo;
  max_ = *hi;
}

double Tuple::sum() const { return std::accumulate(w_.begin(), w_.end(), 0.0); }

bool Tuple::is_probability(double tol) const { return std::abs(sum() - 1.0) <= tol; }

std::string Tuple::str() const { return fmt::format("({})", fmt::join(w_, ",")); }

double tuple_weight(const Word& w, const Tuple& theta) {
  check_digits(w, theta.size());
  double p = 1.0;
  for (Digit d : w.digits()) p *= theta(d);
  return p;
}

bool Partition::contains(const Word& w) const { return std::binary_search(words.begin(), words.end(), w); }

Partition partition(const Tuple& theta, double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError(fmt::format("partition resolution {} not in (0,1)", r));
  Partition p;
  p.resolution = r;
  walk_partition(theta, r, [&](const Word& w, double, bool leaf) {
    if (leaf) p.words.push_back(w);
    return true;
  });
  // DFS over digits in increasing order already yields lexicographic order.
  return p;
}

Exponents exponents(const Tuple& theta, const Tuple& zeta) {
  if (theta.size() != zeta.size()) throw DomainError("exponents: tuples differ in length");
  Exponents e{INFINITY, -INFINITY};
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double a = std::log(zeta.at(i)) / std::log(theta.at(i));
    e.lower = std::min(e.lower, a);
    e.upper = std::max(e.upper, a);
  }
  return e;
}

Word ancestor_in(const Word& w, const Partition& coarse) {
  for (std::size_t k = 1; k <= w.size(); ++k) {
    Word p = w.prefix(k);
    if (coarse.contains(p)) return p;
  }
  throw ConsistencyError(fmt::format("word {} has no prefix in partition at r={}", w.str(), coarse.resolution));
}

std::size_t digit_count(const Word& w, Digit d) {
  return static_cast<std::size_t>(std::count(w.digits().begin(), w.digits().end(), d));
}

AddressStream::AddressStream(Word prefix, Word cycle) : prefix_(std::move(prefix)), cycle_(std::move(cycle)) {
  if (cycle_.empty()) throw DomainError("address cycle must be non-empty");
}

Digit AddressStream::digit(std::size_t n) const {
  if (n == 0) throw DomainError("address digits are 1-based");
  if (n <= prefix_.size()) return prefix_[n - 1];
  return cycle_[(n - 1 - prefix_.size()) % cycle_.size()];
}

Word AddressStream::take(std::size_t n) const {
  std::vector<Digit> ds(n);
  for (std::size_t i = 0; i < n; ++i) ds[i] = digit(i + 1);
  return Word(std::move(ds));
}

std::string AddressStream::str() const { return fmt::format("{}({})^", prefix_.empty() ? "" : prefix_.str(), cycle_.str()); }

}  // namespace sslab
