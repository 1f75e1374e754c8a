#include "seqgibbs/factor_map.hpp"

#include <numeric>
#include <stdexcept>

namespace seqgibbs {

FactorMap::FactorMap(Alphabet source, Alphabet target, std::vector<int> table)
    : source_(source), target_(target), table_(std::move(table)) {
  if (table_.size() != static_cast<std::size_t>(source_.size()))
    throw std::invalid_argument("factor table size must equal source alphabet size");
  fibers_.resize(static_cast<std::size_t>(target_.size()));
  for (int a = 0; a < source_.size(); ++a) {
    const int b = table_[static_cast<std::size_t>(a)];
    if (!target_.contains(b))
      throw std::invalid_argument("factor table symbol out of target range");
    fibers_[static_cast<std::size_t>(b)].push_back(a);
  }
  for (const auto& f : fibers_) {
    if (f.empty())
      throw std::invalid_argument("factor map must be surjective");
  }
}

FactorMap FactorMap::identity(Alphabet alphabet) {
  std::vector<int> table(static_cast<std::size_t>(alphabet.size()));
  std::iota(table.begin(), table.end(), 0);
  return FactorMap(alphabet, alphabet, std::move(table));
}

Word apply_factor(const FactorMap& pi, const Word& x) {
  if (!(x.alphabet() == pi.source()))
    throw std::invalid_argument("word alphabet does not match factor source");
  Word out(pi.target());
  for (std::size_t i = 0; i < x.length(); ++i) out.push_back(pi.apply(x[i]));
  return out;
}

std::uint64_t fiber_count(const FactorMap& pi, const Word& z) {
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < z.length(); ++i)
    count *= pi.fiber(z[i]).size();
  return count;
}

FiberWordRange::FiberWordRange(const FactorMap& pi, Word z)
    : pi_(&pi), z_(std::move(z)) {
  if (!(z_.alphabet() == pi.target()))
    throw std::invalid_argument("word alphabet does not match factor target");
}

FiberWordRange::Iterator::Iterator(const FiberWordRange* range, bool at_end)
    : range_(range), done_(at_end) {
  if (!done_) indices_.assign(range_->z_.length(), 0);
}

Word FiberWordRange::Iterator::operator*() const {
  Word out(range_->pi_->source());
  for (std::size_t i = 0; i < indices_.size(); ++i)
    out.push_back(range_->pi_->fiber(range_->z_[i])[indices_[i]]);
  return out;
}

FiberWordRange::Iterator& FiberWordRange::Iterator::operator++() {
  // Odometer with the rightmost position fastest: lexicographic order.
  std::size_t i = indices_.size();
  while (i > 0) {
    --i;
    const std::size_t fiber_size = range_->pi_->fiber(range_->z_[i]).size();
    if (++indices_[i] < fiber_size) return *this;
    indices_[i] = 0;
  }
  done_ = true;
  return *this;
}

std::uint64_t FiberWordRange::count() const { return fiber_count(*pi_, z_); }

}  // namespace seqgibbs
