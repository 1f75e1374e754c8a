#pragma once

#include <cstdint>
#include <vector>

#include "seqgibbs/word.hpp"

namespace seqgibbs {

/// One-block factor: a surjective symbol map extended coordinatewise.
class FactorMap {
 public:
  FactorMap(Alphabet source, Alphabet target, std::vector<int> table);

  static FactorMap identity(Alphabet alphabet);

  const Alphabet& source() const { return source_; }
  const Alphabet& target() const { return target_; }

  int apply(int symbol) const { return table_[static_cast<std::size_t>(symbol)]; }

  /// Preimage symbols of b, in increasing order. Fibers partition the
  /// source alphabet and are nonempty by the surjectivity invariant.
  const std::vector<int>& fiber(int target_symbol) const {
    return fibers_[static_cast<std::size_t>(target_symbol)];
  }

 private:
  Alphabet source_;
  Alphabet target_;
  std::vector<int> table_;
  std::vector<std::vector<int>> fibers_;
};

/// Symbolwise image; length preserved.
Word apply_factor(const FactorMap& pi, const Word& x);

/// Product of fiber sizes over the symbols of z.
std::uint64_t fiber_count(const FactorMap& pi, const Word& z);

/// Lazy lexicographic enumeration of the words x with apply_factor(pi,x)=z.
/// Lexicographic means in the order of the source symbols position by
/// position, leftmost position most significant.
class FiberWordRange {
 public:
  FiberWordRange(const FactorMap& pi, Word z);

  class Iterator {
   public:
    Iterator() = default;  // end
    Iterator(const FiberWordRange* range, bool at_end);

    Word operator*() const;
    Iterator& operator++();
    friend bool operator==(const Iterator& a, const Iterator& b) {
      return a.done_ == b.done_ &&
             (a.done_ || a.indices_ == b.indices_);
    }
    friend bool operator!=(const Iterator& a, const Iterator& b) {
      return !(a == b);
    }

   private:
    const FiberWordRange* range_ = nullptr;
    std::vector<std::size_t> indices_;
    bool done_ = true;
  };

  Iterator begin() const { return Iterator(this, false); }
  Iterator end() const { return Iterator(this, true); }
  std::uint64_t count() const;

 private:
  friend class Iterator;
  const FactorMap* pi_;
  Word z_;
};

}  // namespace seqgibbs
