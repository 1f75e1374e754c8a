#include "seqgibbs/word.hpp"

#include <stdexcept>

namespace seqgibbs {

Alphabet::Alphabet(int size) : size_(size) {
  if (size < 2) throw std::invalid_argument("alphabet size must be >= 2");
}

Word::Word(Alphabet alphabet, std::vector<int> symbols)
    : alphabet_(alphabet), symbols_(std::move(symbols)) {
  for (int s : symbols_) {
    if (!alphabet_.contains(s))
      throw std::invalid_argument("word symbol out of alphabet range");
  }
}

void Word::push_back(int symbol) {
  if (!alphabet_.contains(symbol))
    throw std::invalid_argument("word symbol out of alphabet range");
  symbols_.push_back(symbol);
}

Word Word::suffix(std::size_t j) const {
  if (j > symbols_.size())
    throw std::out_of_range("shift exceeds word length");
  return Word(alphabet_,
              std::vector<int>(symbols_.begin() + static_cast<long>(j),
                               symbols_.end()));
}

Word Word::prefix(std::size_t len) const {
  if (len > symbols_.size())
    throw std::out_of_range("prefix exceeds word length");
  return Word(alphabet_,
              std::vector<int>(symbols_.begin(),
                               symbols_.begin() + static_cast<long>(len)));
}

Word Word::rotated(std::size_t r) const {
  if (symbols_.empty()) return *this;
  r %= symbols_.size();
  std::vector<int> out;
  out.reserve(symbols_.size());
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    out.push_back(symbols_[(i + r) % symbols_.size()]);
  return Word(alphabet_, std::move(out));
}

Word Word::concat(const Word& other) const {
  std::vector<int> out = symbols_;
  out.insert(out.end(), other.symbols_.begin(), other.symbols_.end());
  return Word(alphabet_, std::move(out));
}

std::string Word::display() const {
  std::string out;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(symbols_[i]);
  }
  return out;
}

TailSpec::TailSpec(Word preperiod, Word period)
    : preperiod_(std::move(preperiod)), period_(std::move(period)) {
  if (period_.empty()) throw std::invalid_argument("tail period must be nonempty");
  if (!(preperiod_.alphabet() == period_.alphabet()))
    throw std::invalid_argument("tail preperiod/period alphabet mismatch");
}

TailSpec TailSpec::zeros(Alphabet alphabet) {
  return constant(alphabet, 0);
}

TailSpec TailSpec::constant(Alphabet alphabet, int symbol) {
  return TailSpec(Word(alphabet), Word(alphabet, {symbol}));
}

TailSpec TailSpec::prefixed(Word prefix) {
  Alphabet a = prefix.alphabet();
  return TailSpec(std::move(prefix), Word(a, {0}));
}

TailSpec TailSpec::shifted(std::size_t j) const {
  if (j <= preperiod_.length())
    return TailSpec(preperiod_.suffix(j), period_);
  const std::size_t r = (j - preperiod_.length()) % period_.length();
  return TailSpec(Word(period_.alphabet()), period_.rotated(r));
}

bool TailSpec::is_constant(int symbol) const {
  for (std::size_t i = 0; i < preperiod_.length(); ++i)
    if (preperiod_[i] != symbol) return false;
  for (std::size_t i = 0; i < period_.length(); ++i)
    if (period_[i] != symbol) return false;
  return true;
}

long long TailSpec::first_occurrence(int symbol) const {
  for (std::size_t i = 0; i < preperiod_.length(); ++i)
    if (preperiod_[i] == symbol) return static_cast<long long>(i);
  for (std::size_t i = 0; i < period_.length(); ++i)
    if (period_[i] == symbol)
      return static_cast<long long>(preperiod_.length() + i);
  return -1;
}

Word shift_word(const Word& w, std::size_t j) {
  return w.suffix(j);
}

}  // namespace seqgibbs
