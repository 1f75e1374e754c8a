#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace seqgibbs {

/// Finite alphabet {0, ..., size-1}.
class Alphabet {
 public:
  explicit Alphabet(int size);

  int size() const { return size_; }
  bool contains(int symbol) const { return symbol >= 0 && symbol < size_; }
  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.size_ == b.size_;
  }

 private:
  int size_;
};

/// Finite word over an alphabet; the length-n cylinder [x0...x_{n-1}].
/// Empty words are legal (the whole space).
class Word {
 public:
  explicit Word(Alphabet alphabet) : alphabet_(alphabet) {}
  Word(Alphabet alphabet, std::vector<int> symbols);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t length() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  int operator[](std::size_t i) const { return symbols_[i]; }
  const std::vector<int>& symbols() const { return symbols_; }

  void push_back(int symbol);
  Word suffix(std::size_t j) const;                  // symbols j..n-1
  Word prefix(std::size_t len) const;                // symbols 0..len-1
  Word rotated(std::size_t r) const;                 // cyclic left rotation
  Word concat(const Word& other) const;

  /// Symbols joined by single spaces (the report display format).
  std::string display() const;

  friend bool operator==(const Word& a, const Word& b) {
    return a.alphabet_ == b.alphabet_ && a.symbols_ == b.symbols_;
  }
  friend bool operator<(const Word& a, const Word& b) {
    return a.symbols_ < b.symbols_;
  }

 private:
  Alphabet alphabet_;
  std::vector<int> symbols_;
};

/// Eventually periodic infinite continuation: preperiod then a repeated
/// nonempty period. Stands for the tail w in points of the form x.w.
class TailSpec {
 public:
  TailSpec(Word preperiod, Word period);

  /// All-zero tail, the canonical continuation used by truncation.
  static TailSpec zeros(Alphabet alphabet);
  /// Constant tail on one symbol.
  static TailSpec constant(Alphabet alphabet, int symbol);
  /// Finite prefix followed by the all-zero continuation.
  static TailSpec prefixed(Word prefix);

  const Alphabet& alphabet() const { return period_.alphabet(); }
  const Word& preperiod() const { return preperiod_; }
  const Word& period() const { return period_; }

  int at(std::size_t i) const {
    if (i < preperiod_.length()) return preperiod_[i];
    return period_[(i - preperiod_.length()) % period_.length()];
  }

  /// The tail of sigma^j applied to this tail.
  TailSpec shifted(std::size_t j) const;

  /// True when every symbol of the continuation equals `symbol`.
  bool is_constant(int symbol) const;

  /// Index of the first occurrence of `symbol`, or -1 if it never occurs.
  long long first_occurrence(int symbol) const;

 private:
  Word preperiod_;
  Word period_;
};

/// sigma^j on finite prefixes: drops the first j symbols.
Word shift_word(const Word& w, std::size_t j);

/// Symbol at index i of the point x.tail.
inline int point_symbol(const Word& x, const TailSpec& tail, std::size_t i) {
  return i < x.length() ? x[i] : tail.at(i - x.length());
}

}  // namespace seqgibbs
