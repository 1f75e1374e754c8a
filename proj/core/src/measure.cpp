#include "seqgibbs/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "seqgibbs/numerics.hpp"

namespace seqgibbs {

namespace {

std::size_t pow_size(int base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) out *= static_cast<std::size_t>(base);
  return out;
}

double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

double MarkovView::log_mass(std::span<const int> word) const {
  const std::size_t q = static_cast<std::size_t>(alphabet.size());
  const std::size_t c = static_cast<std::size_t>(context_length);
  const std::size_t contexts = context_count();
  if (word.size() >= c) {
    std::size_t ctx = 0;
    for (std::size_t i = 0; i < c; ++i)
      ctx = ctx * q + static_cast<std::size_t>(word[i]);
    double acc = log_initial[ctx];
    for (std::size_t p = c; p < word.size(); ++p) {
      const std::size_t w = ctx * q + static_cast<std::size_t>(word[p]);
      acc += log_step[w];
      ctx = w % contexts;
    }
    return acc + log_terminal[ctx];
  }
  // Marginal over the contexts extending the short word.
  std::size_t prefix = 0;
  for (int s : word) prefix = prefix * q + static_cast<std::size_t>(s);
  const std::size_t block = pow_size(alphabet.size(),
                                     context_length - static_cast<int>(word.size()));
  LogSumAccumulator acc;
  for (std::size_t i = 0; i < block; ++i) {
    const std::size_t ctx = prefix * block + i;
    acc.add(log_initial[ctx] + log_terminal[ctx]);
  }
  return acc.result();
}

struct CylinderMeasure::Impl {
  Kind kind;
  Alphabet alphabet{2};

  std::optional<MarkovView> view;

  // pushforward
  std::shared_ptr<const Impl> base;
  std::optional<FactorMap> pi;
  bool brute_force = false;

  // empirical
  std::map<std::vector<int>, std::uint64_t> prefix_counts;
  std::size_t samples = 0;
  int empirical_depth = 0;

  double log_mass(std::span<const int> word) const {
    switch (kind) {
      case Kind::conformal:
      case Kind::equilibrium:
        return view->log_mass(word);
      case Kind::pushforward:
        return pushforward_log_mass(word);
      case Kind::empirical: {
        if (static_cast<int>(word.size()) > empirical_depth)
          throw std::invalid_argument(
              "empirical provider queried beyond its recorded depth");
        const auto it =
            prefix_counts.find(std::vector<int>(word.begin(), word.end()));
        if (it == prefix_counts.end() || it->second == 0) return kNegInf;
        return std::log(static_cast<double>(it->second) /
                        static_cast<double>(samples));
      }
    }
    return kNegInf;
  }

  double pushforward_log_mass(std::span<const int> z) const {
    if (!brute_force && base->view.has_value())
      return pushforward_forward_pass(z);
    // Enumeration fallback (oracle route).
    Word zw(alphabet, std::vector<int>(z.begin(), z.end()));
    LogSumAccumulator acc;
    for (const Word& x : FiberWordRange(*pi, zw))
      acc.add(base->log_mass(x.symbols()));
    return acc.result();
  }

  double pushforward_forward_pass(std::span<const int> z) const {
    const MarkovView& mv = *base->view;
    const std::size_t q = static_cast<std::size_t>(mv.alphabet.size());
    const std::size_t c = static_cast<std::size_t>(mv.context_length);
    const std::size_t contexts = mv.context_count();
    if (z.size() < c) {
      // Sum initial*terminal over contexts whose image starts with z.
      std::vector<int> sym(c);
      LogSumAccumulator acc;
      for (std::size_t ctx = 0; ctx < contexts; ++ctx) {
        std::size_t rem = ctx;
        for (std::size_t i = c; i-- > 0;) {
          sym[i] = static_cast<int>(rem % q);
          rem /= q;
        }
        bool ok = true;
        for (std::size_t i = 0; i < z.size() && ok; ++i)
          ok = pi->apply(sym[i]) == z[i];
        if (ok) acc.add(mv.log_initial[ctx] + mv.log_terminal[ctx]);
      }
      return acc.result();
    }
    // Fiber-restricted forward pass over base contexts.
    std::vector<double> cur(contexts, kNegInf), next(contexts, kNegInf);
    {
      std::vector<int> sym(c);
      for (std::size_t ctx = 0; ctx < contexts; ++ctx) {
        std::size_t rem = ctx;
        for (std::size_t i = c; i-- > 0;) {
          sym[i] = static_cast<int>(rem % q);
          rem /= q;
        }
        bool ok = true;
        for (std::size_t i = 0; i < c && ok; ++i)
          ok = pi->apply(sym[i]) == z[i];
        if (ok) cur[ctx] = mv.log_initial[ctx];
      }
    }
    for (std::size_t p = c; p < z.size(); ++p) {
      std::fill(next.begin(), next.end(), kNegInf);
      const auto& fiber = pi->fiber(z[p]);
      for (std::size_t u = 0; u < contexts; ++u) {
        if (cur[u] == kNegInf) continue;
        for (int a : fiber) {
          const std::size_t w = u * q + static_cast<std::size_t>(a);
          const std::size_t v = w % contexts;
          next[v] = log_add(next[v], cur[u] + mv.log_step[w]);
        }
      }
      cur.swap(next);
    }
    LogSumAccumulator acc;
    for (std::size_t u = 0; u < contexts; ++u)
      if (cur[u] != kNegInf) acc.add(cur[u] + mv.log_terminal[u]);
    return acc.result();
  }
};

CylinderMeasure::CylinderMeasure(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

CylinderMeasure::Kind CylinderMeasure::kind() const { return impl_->kind; }
const Alphabet& CylinderMeasure::alphabet() const { return impl_->alphabet; }

double CylinderMeasure::log_mass(const Word& w) const {
  if (!(w.alphabet() == impl_->alphabet))
    throw std::invalid_argument("cylinder word alphabet mismatch");
  return impl_->log_mass(w.symbols());
}

double CylinderMeasure::mass(const Word& w) const {
  const double lm = log_mass(w);
  return lm == kNegInf ? 0.0 : std::exp(lm);
}

const std::optional<MarkovView>& CylinderMeasure::markov_view() const {
  return impl_->view;
}

std::optional<std::size_t> CylinderMeasure::sample_size() const {
  if (impl_->kind == Kind::empirical) return impl_->samples;
  return std::nullopt;
}

double CylinderMeasure::additivity_tolerance() const {
  if (impl_->kind == Kind::empirical)
    return 3.0 / std::sqrt(static_cast<double>(impl_->samples));
  return 1e-10;
}

CylinderMeasure CylinderMeasure::conformal(const TransferMatrix& matrix,
                                           const PerronData& e) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::conformal;
  impl->alphabet = matrix.alphabet();
  MarkovView mv;
  mv.alphabet = matrix.alphabet();
  mv.context_length = matrix.context_length();
  mv.log_initial.assign(matrix.context_count(), 0.0);
  mv.log_step.resize(matrix.word_count());
  const double log_lambda = std::log(e.lambda);
  for (std::size_t w = 0; w < matrix.word_count(); ++w)
    mv.log_step[w] = matrix.log_weight(w) - log_lambda;
  mv.log_terminal.resize(matrix.context_count());
  for (std::size_t u = 0; u < matrix.context_count(); ++u)
    mv.log_terminal[u] =
        e.conformal[u] > 0.0 ? std::log(e.conformal[u]) : kNegInf;
  impl->view = std::move(mv);
  return CylinderMeasure(impl);
}

CylinderMeasure CylinderMeasure::equilibrium(const TransferMatrix& matrix,
                                             const PerronData& e) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::equilibrium;
  impl->alphabet = matrix.alphabet();
  MarkovView mv;
  mv.alphabet = matrix.alphabet();
  mv.context_length = matrix.context_length();
  mv.log_initial.resize(matrix.context_count());
  for (std::size_t u = 0; u < matrix.context_count(); ++u)
    mv.log_initial[u] = e.density[u] > 0.0 ? std::log(e.density[u]) : kNegInf;
  mv.log_step.resize(matrix.word_count());
  const double log_lambda = std::log(e.lambda);
  for (std::size_t w = 0; w < matrix.word_count(); ++w)
    mv.log_step[w] = matrix.log_weight(w) - log_lambda;
  mv.log_terminal.resize(matrix.context_count());
  for (std::size_t u = 0; u < matrix.context_count(); ++u)
    mv.log_terminal[u] =
        e.conformal[u] > 0.0 ? std::log(e.conformal[u]) : kNegInf;
  impl->view = std::move(mv);
  return CylinderMeasure(impl);
}

CylinderMeasure CylinderMeasure::pushforward(const CylinderMeasure& base,
                                             const FactorMap& pi,
                                             bool brute_force) {
  if (!(base.alphabet() == pi.source()))
    throw std::invalid_argument("pushforward base alphabet must match factor source");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::pushforward;
  impl->alphabet = pi.target();
  impl->base = base.impl_;
  impl->pi = pi;
  impl->brute_force = brute_force;
  return CylinderMeasure(impl);
}

CylinderMeasure CylinderMeasure::empirical(const std::vector<Word>& samples,
                                           int max_depth) {
  if (samples.empty())
    throw std::invalid_argument("empirical provider needs at least one sample");
  if (max_depth < 1)
    throw std::invalid_argument("empirical depth must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::empirical;
  impl->alphabet = samples.front().alphabet();
  impl->samples = samples.size();
  impl->empirical_depth = max_depth;
  for (const Word& s : samples) {
    const std::size_t depth =
        std::min<std::size_t>(s.length(), static_cast<std::size_t>(max_depth));
    std::vector<int> prefix;
    prefix.reserve(depth);
    impl->prefix_counts[prefix] += 1;  // empty word
    for (std::size_t i = 0; i < depth; ++i) {
      prefix.push_back(s[i]);
      impl->prefix_counts[prefix] += 1;
    }
  }
  return CylinderMeasure(impl);
}

double additivity_gap(const CylinderMeasure& mu, const Word& w) {
  double children = 0.0;
  for (int a = 0; a < mu.alphabet().size(); ++a) {
    Word child = w;
    child.push_back(a);
    children += mu.mass(child);
  }
  return std::abs(mu.mass(w) - children);
}

Word sample_path(const TransferMatrix& matrix, const PerronData& e, int n,
                 std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("path length must be >= 1");
  const std::size_t q = static_cast<std::size_t>(matrix.alphabet().size());
  const std::size_t contexts = matrix.context_count();
  const std::size_t c = static_cast<std::size_t>(matrix.context_length());
  std::mt19937_64 rng(seed);

  // Initial context from the equilibrium context marginal.
  std::vector<double> pi_ctx(contexts);
  for (std::size_t u = 0; u < contexts; ++u)
    pi_ctx[u] = e.conformal[u] * e.density[u];
  std::size_t ctx = 0;
  {
    double r = uniform_unit(rng), acc = 0.0;
    for (std::size_t u = 0; u < contexts; ++u) {
      acc += pi_ctx[u];
      if (r < acc || u + 1 == contexts) {
        ctx = u;
        break;
      }
    }
  }

  Word out(matrix.alphabet());
  std::vector<int> sym(c);
  matrix.decode(ctx, sym);
  for (std::size_t i = 0; i < c && static_cast<int>(out.length()) < n; ++i)
    out.push_back(sym[i]);

  while (static_cast<int>(out.length()) < n) {
    // One kernel step Q(u,a) = w(u a) conformal(v) / (lambda conformal(u)).
    double r = uniform_unit(rng), acc = 0.0;
    std::size_t chosen = q - 1;
    for (std::size_t a = 0; a < q; ++a) {
      const std::size_t w = ctx * q + a;
      const std::size_t v = w % contexts;
      const double step = e.conformal[ctx] > 0.0
                              ? std::exp(matrix.log_weight(w)) *
                                    e.conformal[v] /
                                    (e.lambda * e.conformal[ctx])
                              : (a == 0 ? 1.0 : 0.0);
      acc += step;
      if (r < acc) {
        chosen = a;
        break;
      }
    }
    out.push_back(static_cast<int>(chosen));
    ctx = (ctx * q + chosen) % contexts;
  }
  return out;
}

}  // namespace seqgibbs
