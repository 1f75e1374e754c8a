#include "seqgibbs/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seqgibbs/numerics.hpp"

namespace seqgibbs {

namespace {

std::size_t pow_size(int base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) out *= static_cast<std::size_t>(base);
  return out;
}

}  // namespace

struct Potential::Impl {
  Kind kind;
  Alphabet alphabet{2};

  // locally constant
  int depth = 0;
  std::vector<double> table;

  // geometric series
  double theta = 0.0;
  std::vector<double> symbol_values;
  double value_min = 0.0;
  double value_max = 0.0;

  // renewal
  std::function<double(std::int64_t)> coefficient;
  std::int64_t horizon = 0;
  std::vector<double> suffix_sup;    // sup_{k in [j, H]} |a_k|
  std::vector<double> partial_sums;  // s_j = a_0 + ... + a_j
  RenewalDiagnostics diagnostics;

  // ---- shared helpers ----

  std::size_t table_index(const Word& x, const TailSpec& tail,
                          std::size_t offset) const {
    std::size_t idx = 0;
    for (int i = 0; i < depth; ++i)
      idx = idx * static_cast<std::size_t>(alphabet.size()) +
            static_cast<std::size_t>(point_symbol(x, tail, offset + i));
    return idx;
  }

  // Geometric tail sum G = sum_{t >= 0} theta^t g(tail_t), in closed form.
  double tail_value(const TailSpec& tail) const {
    const Word& pre = tail.preperiod();
    const Word& per = tail.period();
    double acc = 0.0, pw = 1.0;
    for (std::size_t t = 0; t < pre.length(); ++t) {
      acc += pw * symbol_values[static_cast<std::size_t>(pre[t])];
      pw *= theta;
    }
    double per_acc = 0.0, per_pw = 1.0;
    for (std::size_t t = 0; t < per.length(); ++t) {
      per_acc += per_pw * symbol_values[static_cast<std::size_t>(per[t])];
      per_pw *= theta;
    }
    // per_pw is now theta^{period length}
    return acc + pw * per_acc / (1.0 - per_pw);
  }

  // Absolute position of the first renewal marker (symbol 0) in x.tail,
  // or -1 when the point is the all-ones fixed point.
  long long first_zero(const Word& x, const TailSpec& tail) const {
    for (std::size_t i = 0; i < x.length(); ++i)
      if (x[i] == 0) return static_cast<long long>(i);
    const long long t = tail.first_occurrence(0);
    return t < 0 ? -1 : static_cast<long long>(x.length()) + t;
  }

  double renewal_variation_bound(std::size_t n) const {
    // 2 sup_{k >= n-1} |a_k| over the horizon; n = 0 means no constraint.
    const std::size_t j = n == 0 ? 0 : n - 1;
    const std::size_t cap = static_cast<std::size_t>(horizon);
    return 2.0 * suffix_sup[std::min(j, cap)];
  }
};

Potential::Potential(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

Potential Potential::locally_constant(Alphabet alphabet, int depth,
                                      std::vector<double> log_table) {
  if (depth < 1) throw std::invalid_argument("locally constant depth must be >= 1");
  if (log_table.size() != pow_size(alphabet.size(), depth))
    throw std::invalid_argument("locally constant table must have q^m entries");
  for (double v : log_table)
    if (!std::isfinite(v) && v != kNegInf)
      throw std::invalid_argument("locally constant table entries must be finite");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::locally_constant;
  impl->alphabet = alphabet;
  impl->depth = depth;
  impl->table = std::move(log_table);
  return Potential(impl);
}

Potential Potential::geometric_series(Alphabet alphabet, double theta,
                                      std::vector<double> symbol_values) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("geometric ratio must lie strictly inside (0,1)");
  if (symbol_values.size() != static_cast<std::size_t>(alphabet.size()))
    throw std::invalid_argument("geometric family needs one value per symbol");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::geometric_series;
  impl->alphabet = alphabet;
  impl->theta = theta;
  impl->symbol_values = std::move(symbol_values);
  impl->value_min = *std::min_element(impl->symbol_values.begin(),
                                      impl->symbol_values.end());
  impl->value_max = *std::max_element(impl->symbol_values.begin(),
                                      impl->symbol_values.end());
  return Potential(impl);
}

Potential Potential::renewal(std::function<double(std::int64_t)> coefficient,
                             std::int64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("renewal horizon must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::renewal;
  impl->alphabet = Alphabet(2);
  impl->coefficient = std::move(coefficient);
  impl->horizon = horizon;

  const std::size_t h = static_cast<std::size_t>(horizon);
  impl->suffix_sup.assign(h + 1, 0.0);
  impl->partial_sums.assign(h + 1, 0.0);
  std::vector<double> a(h + 1);
  double s = 0.0;
  double sum_exp = 0.0, sum_weighted = 0.0;
  for (std::size_t k = 0; k <= h; ++k) {
    a[k] = impl->coefficient(static_cast<std::int64_t>(k));
    if (!std::isfinite(a[k]))
      throw std::invalid_argument("renewal coefficients must be finite");
    s += a[k];
    impl->partial_sums[k] = s;
    const double es = std::exp(s);
    sum_exp += es;
    sum_weighted += static_cast<double>(k + 1) * es;
  }
  double sup = 0.0;
  for (std::size_t k = h + 1; k-- > 0;) {
    sup = std::max(sup, std::abs(a[k]));
    impl->suffix_sup[k] = sup;
  }
  impl->diagnostics.horizon = horizon;
  impl->diagnostics.last_partial_sum = s;
  impl->diagnostics.sum_exp_partial = sum_exp;
  impl->diagnostics.sum_weighted_exp_partial = sum_weighted;
  return Potential(impl);
}

Potential::Kind Potential::kind() const { return impl_->kind; }
const Alphabet& Potential::alphabet() const { return impl_->alphabet; }

int Potential::depth() const {
  if (impl_->kind != Kind::locally_constant)
    throw std::logic_error("depth: not a locally constant potential");
  return impl_->depth;
}

const std::vector<double>& Potential::table() const {
  if (impl_->kind != Kind::locally_constant)
    throw std::logic_error("table: not a locally constant potential");
  return impl_->table;
}

double Potential::theta() const {
  if (impl_->kind != Kind::geometric_series)
    throw std::logic_error("theta: not a geometric series potential");
  return impl_->theta;
}

const std::vector<double>& Potential::symbol_values() const {
  if (impl_->kind != Kind::geometric_series)
    throw std::logic_error("symbol_values: not a geometric series potential");
  return impl_->symbol_values;
}

double Potential::geometric_tail_value(const TailSpec& tail) const {
  if (impl_->kind != Kind::geometric_series)
    throw std::logic_error("geometric_tail_value: not a geometric series potential");
  return impl_->tail_value(tail);
}

double Potential::renewal_coefficient(std::int64_t k) const {
  if (impl_->kind != Kind::renewal)
    throw std::logic_error("renewal_coefficient: not a renewal potential");
  return impl_->coefficient(k);
}

std::int64_t Potential::horizon() const {
  if (impl_->kind != Kind::renewal)
    throw std::logic_error("horizon: not a renewal potential");
  return impl_->horizon;
}

const RenewalDiagnostics& Potential::renewal_diagnostics() const {
  if (impl_->kind != Kind::renewal)
    throw std::logic_error("renewal_diagnostics: not a renewal potential");
  return impl_->diagnostics;
}

EvalResult Potential::evaluate(const Word& x, const TailSpec& tail) const {
  const Impl& im = *impl_;
  switch (im.kind) {
    case Kind::locally_constant: {
      const double value = im.table[im.table_index(x, tail, 0)];
      if (x.length() >= static_cast<std::size_t>(im.depth))
        return {value, 0.0};
      return {value, variation_at(x, tail)};
    }
    case Kind::geometric_series: {
      // Finite prefix plus the closed-form tail: exact, radius 0.
      double acc = 0.0, pw = 1.0;
      for (std::size_t i = 0; i < x.length(); ++i) {
        acc += pw * im.symbol_values[static_cast<std::size_t>(x[i])];
        pw *= im.theta;
      }
      return {acc + pw * im.tail_value(tail), 0.0};
    }
    case Kind::renewal: {
      const long long k = im.first_zero(x, tail);
      const double value = k < 0 ? 0.0 : im.coefficient(k);
      const bool prefix_determined =
          k >= 0 && static_cast<std::size_t>(k) < x.length();
      return {value,
              prefix_determined ? 0.0 : im.renewal_variation_bound(x.length())};
    }
  }
  return {};
}

EvalResult Potential::birkhoff_sum(const Word& x, const TailSpec& tail,
                                   int n) const {
  EvalResult out;
  Word prefix = x;
  TailSpec t = tail;
  for (int j = 0; j < n; ++j) {
    const EvalResult term = evaluate(prefix, t);
    out.value += term.value;
    out.radius += term.radius;
    if (!prefix.empty())
      prefix = prefix.suffix(1);
    else
      t = t.shifted(1);
  }
  return out;
}

double Potential::variation_bound(int n) const {
  if (n < 1) throw std::invalid_argument("variation_bound requires n >= 1");
  const Impl& im = *impl_;
  switch (im.kind) {
    case Kind::locally_constant: {
      if (n >= im.depth) return 0.0;
      // Exact: max over length-n prefixes of (max - min) over completions.
      const std::size_t groups = pow_size(im.alphabet.size(), n);
      const std::size_t block = im.table.size() / groups;
      double worst = 0.0;
      for (std::size_t g = 0; g < groups; ++g) {
        double lo = im.table[g * block], hi = lo;
        for (std::size_t i = 1; i < block; ++i) {
          lo = std::min(lo, im.table[g * block + i]);
          hi = std::max(hi, im.table[g * block + i]);
        }
        worst = std::max(worst, hi - lo);
      }
      return worst;
    }
    case Kind::geometric_series:
      return std::pow(im.theta, n) * (im.value_max - im.value_min) /
             (1.0 - im.theta);
    case Kind::renewal:
      return im.renewal_variation_bound(static_cast<std::size_t>(n));
  }
  return 0.0;
}

double Potential::variation_at(const Word& x, const TailSpec& tail) const {
  if (x.empty()) throw std::invalid_argument("variation_at requires length >= 1");
  const Impl& im = *impl_;
  switch (im.kind) {
    case Kind::locally_constant: {
      if (x.length() >= static_cast<std::size_t>(im.depth)) return 0.0;
      const double v = im.table[im.table_index(x, tail, 0)];
      // Exact scan over the completions of x.
      std::size_t prefix_idx = 0;
      for (std::size_t i = 0; i < x.length(); ++i)
        prefix_idx = prefix_idx * static_cast<std::size_t>(im.alphabet.size()) +
                     static_cast<std::size_t>(x[i]);
      const std::size_t block =
          pow_size(im.alphabet.size(), im.depth - static_cast<int>(x.length()));
      double worst = 0.0;
      for (std::size_t i = 0; i < block; ++i)
        worst = std::max(worst, std::abs(v - im.table[prefix_idx * block + i]));
      return worst;
    }
    case Kind::geometric_series: {
      // The sup flips every free coordinate to an extreme symbol.
      const double g = im.tail_value(tail);
      const double span = 1.0 / (1.0 - im.theta);
      const double up = im.value_max * span - g;
      const double down = g - im.value_min * span;
      return std::pow(im.theta, x.length()) * std::max(up, down);
    }
    case Kind::renewal: {
      for (std::size_t i = 0; i < x.length(); ++i)
        if (x[i] == 0) return 0.0;  // the first zero fixes the class
      return im.renewal_variation_bound(x.length());
    }
  }
  return 0.0;
}

double Potential::cylinder_discrepancy(const Word& x, const TailSpec& tail) const {
  if (x.empty())
    throw std::invalid_argument("cylinder_discrepancy requires length >= 1");
  const Impl& im = *impl_;
  const std::size_t n = x.length();
  switch (im.kind) {
    case Kind::locally_constant: {
      const int m = im.depth;
      const std::size_t j0 = n >= static_cast<std::size_t>(m) ? n - m + 1 : 0;
      // Joint sup over the q^{m-1} completions shared by all boundary terms.
      const std::size_t completions = pow_size(im.alphabet.size(), m - 1);
      double worst = 0.0;
      std::vector<int> c(static_cast<std::size_t>(m - 1), 0);
      for (std::size_t ci = 0; ci < completions; ++ci) {
        std::size_t rem = ci;
        for (std::size_t d = c.size(); d-- > 0;) {
          c[d] = static_cast<int>(rem % im.alphabet.size());
          rem /= im.alphabet.size();
        }
        double sum = 0.0;
        for (std::size_t j = j0; j < n; ++j) {
          std::size_t idx_point = 0, idx_y = 0;
          for (int i = 0; i < m; ++i) {
            const std::size_t p = j + static_cast<std::size_t>(i);
            idx_point =
                idx_point * im.alphabet.size() +
                static_cast<std::size_t>(point_symbol(x, tail, p));
            const int ys = p < n ? x[p] : c[p - n];
            idx_y = idx_y * im.alphabet.size() + static_cast<std::size_t>(ys);
          }
          sum += std::abs(im.table[idx_point] - im.table[idx_y]);
        }
        worst = std::max(worst, sum);
      }
      return worst;
    }
    case Kind::geometric_series: {
      // Every term is theta^{n-j} times one shared linear functional of the
      // free coordinates, so the sup is exact at an extreme constant choice.
      const double g = im.tail_value(tail);
      const double span = 1.0 / (1.0 - im.theta);
      const double b = std::max(g - im.value_min * span, im.value_max * span - g);
      const double weight =
          im.theta * (1.0 - std::pow(im.theta, n)) / (1.0 - im.theta);
      return weight * b;
    }
    case Kind::renewal: {
      // Terms whose visible suffix contains a zero vanish exactly; the rest
      // are bounded by variation_bound.
      std::size_t last_zero = n;  // n means none
      for (std::size_t i = n; i-- > 0;)
        if (x[i] == 0) {
          last_zero = i;
          break;
        }
      double sum = 0.0;
      const std::size_t j_start = last_zero == n ? 0 : last_zero + 1;
      for (std::size_t j = j_start; j < n; ++j)
        sum += im.renewal_variation_bound(n - j);
      return sum;
    }
  }
  return 0.0;
}

bool Potential::discrepancy_exact(const Word& x) const {
  switch (impl_->kind) {
    case Kind::locally_constant:
    case Kind::geometric_series:
      return true;
    case Kind::renewal:
      return !x.empty() && x[x.length() - 1] == 0;
  }
  return false;
}

}  // namespace seqgibbs
