#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace sslab {

using Digit = std::uint8_t;

// Finite word over {1..N}. Digits are 1-based.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> digits);
  explicit Word(std::vector<Digit> digits);

  // "124" -> 1,2,4. Accepts digits 1..9 only.
  static Word parse(std::string_view text);
  static Word repeat(Digit d, std::size_t n);

  std::size_t size() const { return digits_.size(); }
  bool empty() const { return digits_.empty(); }
  Digit operator[](std::size_t i) const { return digits_[i]; }
  Digit back() const { return digits_.back(); }
  const std::vector<Digit>& digits() const { return digits_; }

  Word prefix(std::size_t n) const;
  Word suffix_from(std::size_t n) const;
  bool has_prefix(const Word& p) const;
  bool comparable(const Word& other) const { return has_prefix(other) || other.has_prefix(*this); }

  void push_back(Digit d) { digits_.push_back(d); }
  void pop_back() { digits_.pop_back(); }
  Word operator+(const Word& tail) const;

  std::string str() const;

  friend bool operator==(const Word&, const Word&) = default;
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) { return a.digits_ <=> b.digits_; }

 private:
  std::vector<Digit> digits_;
};

// Throws DomainError if a digit is outside 1..n.
void check_digits(const Word& w, std::size_t n);

// N-tuple with entries strictly inside (0,1), N >= 2.
class Tuple {
 public:
  explicit Tuple(std::vector<double> weights);
  Tuple(std::initializer_list<double> weights) : Tuple(std::vector<double>(weights)) {}

  std::size_t size() const { return w_.size(); }
  // 1-based access, matching word digits.
  double operator()(Digit d) const { return w_[d - 1]; }
  double at(std::size_t i) const { return w_.at(i); }
  const std::vector<double>& values() const { return w_; }
  double min() const { return min_; }
  double max() const { return max_; }
  double sum() const;
  bool is_probability(double tol = 1e-12) const;
  std::string str() const;

  friend bool operator==(const Tuple& a, const Tuple& b) { return a.w_ == b.w_; }

 private:
  std::vector<double> w_;
  double min_ = 0.0;
  double max_ = 0.0;
};

double tuple_weight(const Word& w, const Tuple& theta);

struct Partition {
  double resolution = 0.0;
  std::vector<Word> words;  // lexicographic order

  bool contains(const Word& w) const;
  std::size_t size() const { return words.size(); }
};

// Depth-first walk of the word tree down to Lambda_theta(r).
// visit(word, theta_w, is_leaf) is called for every node except the root; its
// return value on inner nodes decides whether to descend.
template <class Visit>
void walk_partition(const Tuple& theta, double r, Visit&& visit) {
  Word w;
  std::vector<double> weight{1.0};
  const auto n = static_cast<Digit>(theta.size());
  std::vector<Digit> next{1};
  while (!next.empty()) {
    if (next.back() > n) {
      next.pop_back();
      weight.pop_back();
      if (!w.empty()) w.pop_back();
      continue;
    }
    const Digit d = next.back()++;
    const double tw = weight.back() * theta(d);
    w.push_back(d);
    const bool leaf = tw <= r;
    const bool descend = visit(static_cast<const Word&>(w), tw, leaf);
    if (leaf || !descend) {
      w.pop_back();
    } else {
      weight.push_back(tw);
      next.push_back(1);
    }
  }
}

// Lambda_theta(r) = { w : theta_w <= r < theta_w / theta_{w_n} }.
Partition partition(const Tuple& theta, double r);

struct Exponents {
  double lower = 0.0;  // a_*
  double upper = 0.0;  // a^*
};

Exponents exponents(const Tuple& theta, const Tuple& zeta);

// The unique prefix of w lying in coarse.
Word ancestor_in(const Word& w, const Partition& coarse);

std::size_t digit_count(const Word& w, Digit d);
inline std::size_t n4_count(const Word& w) { return digit_count(w, 4); }

// Infinite word given as prefix followed by a repeated cycle.
// Pure: every pull of the same index returns the same digit.
class AddressStream {
 public:
  AddressStream(Word prefix, Word cycle);
  static AddressStream constant(Digit d) { return AddressStream(Word{}, Word{d}); }

  // n >= 1; digit(1) is the first letter.
  Digit digit(std::size_t n) const;
  Word take(std::size_t n) const;
  const Word& prefix() const { return prefix_; }
  const Word& cycle() const { return cycle_; }
  std::string str() const;

  friend bool operator==(const AddressStream&, const AddressStream&) = default;

 private:
  Word prefix_;
  Word cycle_;
};

}  // namespace sslab
