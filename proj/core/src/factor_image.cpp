#include "seqgibbs/factor_image.hpp"

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

// Allowed source symbols per position: the fiber of z_p, or the pinned
// symbol beyond pin_from.
struct SymbolConstraints {
  const FactorMap* pi;
  const Word* z;
  int pin_from;       // first pinned position (relative to z), or |z|
  const Word* pinned; // symbols for positions pin_from..|z|-1

  std::span<const int> at(int p) const {
    if (p >= pin_from)
      return {&(*pinned).symbols()[static_cast<std::size_t>(p - pin_from)], 1};
    const auto& f = pi->fiber((*z)[static_cast<std::size_t>(p)]);
    return {f.data(), f.size()};
  }
};

double locally_constant_fiber_sum(const Potential& psi, const SymbolConstraints& sc,
                                  int l, int n, const TailSpec& w,
                                  double pressure) {
  const int m = psi.depth();
  const int q = psi.alphabet().size();
  const auto& table = psi.table();
  const int width = n - l + 1;
  if (width <= 0) return 0.0;  // empty word, empty Birkhoff sum

  const auto window_value = [&](std::span<const int> syms, int start) {
    std::size_t idx = 0;
    for (int i = 0; i < m; ++i) {
      const int p = start + i;
      const int s = p < static_cast<int>(syms.size())
                        ? syms[static_cast<std::size_t>(p)]
                        : w.at(static_cast<std::size_t>(p) - syms.size());
      idx = idx * static_cast<std::size_t>(q) + static_cast<std::size_t>(s);
    }
    return table[idx];
  };

  if (width < m) {
    // Every window crosses into the tail; enumerate the few fiber words.
    LogSumAccumulator acc;
    std::vector<int> word(static_cast<std::size_t>(width));
    std::vector<std::size_t> choice(static_cast<std::size_t>(width), 0);
    for (;;) {
      for (int p = 0; p < width; ++p)
        word[static_cast<std::size_t>(p)] =
            sc.at(l + p)[choice[static_cast<std::size_t>(p)]];
      double sum = 0.0;
      for (int j = 0; j < width; ++j) sum += window_value(word, j);
      acc.add(sum - width * pressure);
      int p = width;
      while (p-- > 0) {
        if (++choice[static_cast<std::size_t>(p)] <
            sc.at(l + p).size())
          break;
        choice[static_cast<std::size_t>(p)] = 0;
      }
      if (p < 0) break;
    }
    return acc.result();
  }

  // Forward pass: states are the (m-1)-symbol contexts.
  const std::size_t contexts = pow_size(q, m - 1);
  std::vector<double> cur(contexts, kNegInf), next(contexts, kNegInf);

  // Seed with the first m-1 symbols (positions l..l+m-2).
  {
    std::vector<std::size_t> choice(static_cast<std::size_t>(m - 1), 0);
    for (;;) {
      std::size_t ctx = 0;
      for (int i = 0; i < m - 1; ++i)
        ctx = ctx * static_cast<std::size_t>(q) +
              static_cast<std::size_t>(sc.at(l + i)[choice[static_cast<std::size_t>(i)]]);
      cur[ctx] = log_add(cur[ctx], 0.0);
      int p = m - 1;
      while (p-- > 0) {
        if (++choice[static_cast<std::size_t>(p)] < sc.at(l + p).size()) break;
        choice[static_cast<std::size_t>(p)] = 0;
      }
      if (p < 0) break;
    }
  }

  for (int p = l + m - 1; p <= n; ++p) {
    std::fill(next.begin(), next.end(), kNegInf);
    for (std::size_t u = 0; u < contexts; ++u) {
      if (cur[u] == kNegInf) continue;
      for (int a : sc.at(p)) {
        const std::size_t widx = u * static_cast<std::size_t>(q) +
                                 static_cast<std::size_t>(a);
        const std::size_t v = widx % contexts;
        next[v] = log_add(next[v], cur[u] + table[widx]);
      }
    }
    cur.swap(next);
  }

  // Boundary windows j = n-m+2..n read the terminal context then the tail.
  LogSumAccumulator acc;
  std::vector<int> ctx_syms(static_cast<std::size_t>(m - 1));
  for (std::size_t u = 0; u < contexts; ++u) {
    if (cur[u] == kNegInf) continue;
    std::size_t rem = u;
    for (std::size_t i = ctx_syms.size(); i-- > 0;) {
      ctx_syms[i] = static_cast<int>(rem % static_cast<std::size_t>(q));
      rem /= static_cast<std::size_t>(q);
    }
    double boundary = 0.0;
    for (int t = 0; t < m - 1; ++t) {
      // window starting t symbols into the terminal context
      std::size_t idx = 0;
      for (int i = 0; i < m; ++i) {
        const int off = t + i;  // offset within ctx_syms then the tail
        const int s = off < m - 1
                          ? ctx_syms[static_cast<std::size_t>(off)]
                          : w.at(static_cast<std::size_t>(off - (m - 1)));
        idx = idx * static_cast<std::size_t>(q) + static_cast<std::size_t>(s);
      }
      boundary += table[idx];
    }
    acc.add(cur[u] + boundary);
  }
  return acc.result() - width * pressure;
}

double geometric_fiber_sum(const Potential& psi, const SymbolConstraints& sc,
                           int l, int n, const TailSpec& w, double pressure) {
  const double theta = psi.theta();
  const auto& g = psi.symbol_values();
  const int width = n - l + 1;
  if (width <= 0) return 0.0;
  double total = 0.0;
  for (int p = l; p <= n; ++p) {
    const double cp = (1.0 - std::pow(theta, p - l + 1)) / (1.0 - theta);
    LogSumAccumulator acc;
    for (int a : sc.at(p)) acc.add(cp * g[static_cast<std::size_t>(a)]);
    total += acc.result();
  }
  total += (1.0 - std::pow(theta, width)) / (1.0 - theta) * theta *
           psi.geometric_tail_value(w);
  return total - width * pressure;
}

double fiber_sum_impl(const Potential& psi, const SymbolConstraints& sc, int l,
                      int n, const TailSpec& w, double pressure) {
  switch (psi.kind()) {
    case Potential::Kind::locally_constant:
      return locally_constant_fiber_sum(psi, sc, l, n, w, pressure);
    case Potential::Kind::geometric_series:
      return geometric_fiber_sum(psi, sc, l, n, w, pressure);
    case Potential::Kind::renewal:
      throw std::invalid_argument(
          "truncate renewal potentials before fiber analysis");
  }
  return kNegInf;
}

// Tail representatives over which the image ratio is extremized. For a
// depth-m potential the ratio depends on the first m-1 tail symbols only,
// so the finitely many contexts are exhaustive; for the geometric family the
// tail enters through one monotone functional, extremal at the constant
// tails on the extreme symbols.
std::vector<TailSpec> extremal_tails(const Potential& psi) {
  const Alphabet a = psi.alphabet();
  std::vector<TailSpec> tails;
  if (psi.kind() == Potential::Kind::locally_constant) {
    const int c = psi.depth() - 1;
    if (c == 0) {
      tails.push_back(TailSpec::zeros(a));
      return tails;
    }
    const std::size_t count = pow_size(a.size(), c);
    std::vector<int> syms(static_cast<std::size_t>(c));
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t rem = idx;
      for (std::size_t i = syms.size(); i-- > 0;) {
        syms[i] = static_cast<int>(rem % static_cast<std::size_t>(a.size()));
        rem /= static_cast<std::size_t>(a.size());
      }
      tails.push_back(TailSpec::prefixed(Word(a, syms)));
    }
    return tails;
  }
  if (psi.kind() == Potential::Kind::geometric_series) {
    const auto& g = psi.symbol_values();
    int lo = 0, hi = 0;
    for (int s = 1; s < a.size(); ++s) {
      if (g[static_cast<std::size_t>(s)] < g[static_cast<std::size_t>(lo)]) lo = s;
      if (g[static_cast<std::size_t>(s)] > g[static_cast<std::size_t>(hi)]) hi = s;
    }
    tails.push_back(TailSpec::constant(a, lo));
    if (hi != lo) tails.push_back(TailSpec::constant(a, hi));
    return tails;
  }
  throw std::invalid_argument("truncate renewal potentials before fiber analysis");
}

}  // namespace

GibbsTimeSource::GibbsTimeSource(bool identity, std::vector<int> times)
    : identity_(identity), times_(std::move(times)) {}

GibbsTimeSource GibbsTimeSource::identity() { return {true, {}}; }

GibbsTimeSource GibbsTimeSource::from_times(std::vector<int> times) {
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (times[i + 1] <= times[i])
      throw std::invalid_argument("Gibbs times must increase strictly");
  if (!times.empty() && times.front() < 1)
    throw std::invalid_argument("Gibbs times must be >= 1");
  return {false, std::move(times)};
}

GibbsTimeSource GibbsTimeSource::from_certificate(const GibbsCertificate& cert) {
  return from_times(cert.times);
}

int GibbsTimeSource::time(int k) const {
  if (k < 0) throw std::invalid_argument("time index must be >= 0");
  if (k == 0) return 0;
  if (identity_) return k;
  if (static_cast<std::size_t>(k) > times_.size())
    throw std::out_of_range("time index beyond the certified list");
  return times_[static_cast<std::size_t>(k - 1)];
}

int GibbsTimeSource::level_for(int bound) const {
  if (identity_) return bound;
  int k = 0;
  while (static_cast<std::size_t>(k) < times_.size() &&
         times_[static_cast<std::size_t>(k)] <= bound)
    ++k;
  return k;
}

GibbsTimeSource GibbsTimeSource::shifted(int i) const {
  if (identity_) return *this;
  std::vector<int> out;
  for (int t : times_)
    if (t - i >= 1) out.push_back(t - i);
  return {false, std::move(out)};
}

double fiber_log_sum(const Potential& psi1, const FactorMap& pi, const Word& z,
                     const TailSpec& w, int l, double pressure) {
  if (l < 0 || static_cast<std::size_t>(l) > z.length())
    throw std::invalid_argument("fiber sum offset out of range");
  const Word empty_pin(pi.source());
  const SymbolConstraints sc{&pi, &z, static_cast<int>(z.length()), &empty_pin};
  return fiber_sum_impl(psi1, sc, l, static_cast<int>(z.length()) - 1, w,
                        pressure);
}

double fiber_log_sum_pinned(const Potential& psi1, const FactorMap& pi,
                            const Word& z, int pin_from, const Word& pinned,
                            const TailSpec& w, int l, double pressure) {
  if (pin_from < 0 || static_cast<std::size_t>(pin_from) > z.length())
    throw std::invalid_argument("pin offset out of range");
  if (pinned.length() != z.length() - static_cast<std::size_t>(pin_from))
    throw std::invalid_argument("pinned word must cover positions pin_from..end");
  const SymbolConstraints sc{&pi, &z, pin_from, &pinned};
  return fiber_sum_impl(psi1, sc, l, static_cast<int>(z.length()) - 1, w,
                        pressure);
}

double image_ratio(const Potential& psi1, const FactorMap& pi, const Word& z,
                   const TailSpec& w, double pressure) {
  if (z.empty()) throw std::invalid_argument("image ratio needs |z| >= 1");
  return std::exp(fiber_log_sum(psi1, pi, z, w, 0, pressure) -
                  fiber_log_sum(psi1, pi, z, w, 1, pressure));
}

RatioInterval image_ratio_interval(const Potential& psi1, const FactorMap& pi,
                                   const Word& z, int k,
                                   const GibbsTimeSource& source,
                                   double pressure) {
  const int n_k = source.time(k);
  if (z.length() < static_cast<std::size_t>(n_k) + 1)
    throw std::invalid_argument("prefix too short for the requested level");
  const Word zp = z.prefix(static_cast<std::size_t>(n_k) + 1);
  RatioInterval out;
  out.k = k;
  out.n_k = n_k;
  bool first = true;
  for (const TailSpec& w : extremal_tails(psi1)) {
    const double u = image_ratio(psi1, pi, zp, w, pressure);
    if (first) {
      out.min_u = out.max_u = u;
      first = false;
    } else {
      out.min_u = std::min(out.min_u, u);
      out.max_u = std::max(out.max_u, u);
    }
  }
  return out;
}

bool intervals_nested(std::span<const RatioInterval> intervals, double slack) {
  for (std::size_t i = 0; i + 1 < intervals.size(); ++i) {
    const RatioInterval& prev = intervals[i];
    const RatioInterval& cur = intervals[i + 1];
    if (std::log(cur.min_u) < std::log(prev.min_u) - slack) return false;
    if (std::log(cur.max_u) > std::log(prev.max_u) + slack) return false;
  }
  return true;
}

bool spreads_monotone(std::span<const double> lambdas, double slack) {
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i)
    if (lambdas[i + 1] > lambdas[i] + slack) return false;
  return true;
}

bool check_interval_nesting(const Potential& psi1, const FactorMap& pi,
                            const Word& z, int k_max,
                            const GibbsTimeSource& source, double pressure,
                            double slack) {
  std::vector<RatioInterval> intervals;
  intervals.reserve(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k)
    intervals.push_back(image_ratio_interval(psi1, pi, z, k, source, pressure));
  return intervals_nested(intervals, slack);
}

bool check_spread_monotone(const Potential& psi1, const FactorMap& pi,
                           const Word& z, int k_max,
                           const GibbsTimeSource& source, double pressure,
                           double slack) {
  std::vector<double> lambdas;
  lambdas.reserve(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k)
    lambdas.push_back(
        image_ratio_interval(psi1, pi, z, k, source, pressure).lambda());
  return spreads_monotone(lambdas, slack);
}

bool check_fiber_weight_ratio(const Potential& psi1, const FactorMap& pi,
                              const Word& z, int i, int k, double K,
                              const GibbsTimeSource& source, double pressure,
                              double slack) {
  const int n_i = source.time(i);
  const int n_k = source.time(k);
  if (!(n_i < n_k))
    throw std::invalid_argument("fiber weight check needs n_i < n_k");
  if (z.length() < static_cast<std::size_t>(n_k) + 1)
    throw std::invalid_argument("prefix too short for the requested level");
  const Word zp = z.prefix(static_cast<std::size_t>(n_k) + 1);
  const double c = std::pow(K, -4.0);
  const std::vector<TailSpec> tails = extremal_tails(psi1);

  // denominators per tail are shared across the pinned words
  std::vector<double> log_den;
  log_den.reserve(tails.size());
  for (const TailSpec& w : tails)
    log_den.push_back(fiber_log_sum(psi1, pi, zp, w, 1, pressure));

  const Word block = zp.suffix(static_cast<std::size_t>(n_i) + 1);
  for (const Word& xbar : FiberWordRange(pi, block)) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (std::size_t t = 0; t < tails.size(); ++t) {
      const double num = fiber_log_sum_pinned(psi1, pi, zp, n_i + 1, xbar,
                                              tails[t], 1, pressure);
      const double log_p = num - log_den[t];
      if (first) {
        lo = hi = log_p;
        first = false;
      } else {
        lo = std::min(lo, log_p);
        hi = std::max(hi, log_p);
      }
    }
    if (std::exp(lo - hi) < c - slack) return false;
  }
  return true;
}

double recursion_variation_term(const Potential& psi1, int i, int k,
                                const GibbsTimeSource& source) {
  const int n_i = source.time(i);
  const int n_k = source.time(k);
  double sum = 0.0;
  for (int n = 0; n <= n_i; ++n) sum += psi1.variation_bound(n_k - n);
  return 2.0 * sum;
}

bool check_spread_recursion(const Potential& psi1, const FactorMap& pi,
                            const Word& z, int i, int k, double K,
                            const GibbsTimeSource& source, double pressure,
                            double slack) {
  if (!(i < k)) throw std::invalid_argument("recursion check needs i < k");
  const double lambda_k =
      image_ratio_interval(psi1, pi, z, k, source, pressure).lambda();
  const double lambda_i =
      image_ratio_interval(psi1, pi, z, i, source, pressure).lambda();
  const double c = std::pow(K, -4.0);
  const double rhs = c * std::exp(recursion_variation_term(psi1, i, k, source)) +
                     (1.0 - c) * lambda_i;
  return lambda_k <= rhs + slack;
}

ImagePotentialEstimate estimate_image_potential(const Potential& psi1,
                                                const FactorMap& pi,
                                                const Word& z, int k,
                                                const GibbsTimeSource& source,
                                                double pressure) {
  const RatioInterval iv = image_ratio_interval(psi1, pi, z, k, source, pressure);
  ImagePotentialEstimate out;
  out.k = k;
  out.n_k = iv.n_k;
  out.value = 0.5 * (std::log(iv.min_u) + std::log(iv.max_u));
  out.error = 0.5 * std::log(iv.lambda()) + iv.inflation_log;
  return out;
}

TelescopeCheck image_birkhoff_residual(const Potential& psi1,
                                       const FactorMap& pi, const Word& z,
                                       int n, int k,
                                       const GibbsTimeSource& source,
                                       double pressure, double slack) {
  const int n_k = source.time(k);
  if (z.length() < static_cast<std::size_t>(n_k) + 1)
    throw std::invalid_argument("prefix too short for the requested level");
  if (!(n + 1 <= n_k))
    throw std::invalid_argument("telescope needs n + 1 <= n_k");
  const Word zp = z.prefix(static_cast<std::size_t>(n_k) + 1);

  double value_sum = 0.0, budget = slack;
  for (int i = 0; i <= n; ++i) {
    const Word shifted = zp.suffix(static_cast<std::size_t>(i));
    const GibbsTimeSource sub = source.shifted(i);
    // level whose time is n_k - i; the shift property guarantees it exists
    // for the identity source, and regular fixtures inherit it.
    int level = -1;
    for (int kk = 0; kk <= n_k; ++kk) {
      if (sub.time(kk) == n_k - i) {
        level = kk;
        break;
      }
      if (sub.time(kk) > n_k - i) break;
    }
    if (level < 0)
      throw std::invalid_argument("shifted Gibbs-time level unavailable");
    const ImagePotentialEstimate est =
        estimate_image_potential(psi1, pi, shifted, level, sub, pressure);
    value_sum += est.value;
    budget += est.error;
  }

  const TailSpec w = TailSpec::zeros(psi1.alphabet());
  const double rhs = fiber_log_sum(psi1, pi, zp, w, 0, pressure) -
                     fiber_log_sum(psi1, pi, zp, w, n + 1, pressure);
  return {std::abs(value_sum - rhs), budget};
}

double image_gibbs_log_ratio(const CylinderMeasure& nu, const Potential& psi1,
                             const FactorMap& pi, const Word& z, int l, int n_i,
                             int k_cap, const GibbsTimeSource& source,
                             double pressure) {
  if (!(0 <= l && l <= n_i && static_cast<std::size_t>(n_i) < z.length()))
    throw std::invalid_argument("image Gibbs window out of range");
  const Word window = z.suffix(static_cast<std::size_t>(l))
                          .prefix(static_cast<std::size_t>(n_i - l) + 1);
  const double log_mass = nu.log_mass(window);
  if (log_mass == kNegInf)
    throw NullCylinderError("image cylinder [" + window.display() +
                            "] has zero mass");
  double value_sum = 0.0;
  for (int t = l; t <= n_i; ++t) {
    const Word shifted = z.suffix(static_cast<std::size_t>(t));
    const GibbsTimeSource sub = source.shifted(t);
    const int avail = static_cast<int>(shifted.length()) - 1;
    const int level = std::min(k_cap, sub.level_for(avail));
    value_sum +=
        estimate_image_potential(psi1, pi, shifted, level, sub, pressure).value;
  }
  return log_mass - value_sum;
}

ImageGibbsScan scan_image_gibbs(const CylinderMeasure& nu, const Potential& psi1,
                                const FactorMap& pi, int depth, double K,
                                int k_cap, const GibbsTimeSource& source,
                                double pressure) {
  ImageGibbsScan out;
  const Alphabet a2 = pi.target();
  const std::size_t words = pow_size(a2.size(), depth);
  std::vector<int> syms(static_cast<std::size_t>(depth));
  for (std::size_t widx = 0; widx < words; ++widx) {
    std::size_t rem = widx;
    for (std::size_t i = syms.size(); i-- > 0;) {
      syms[i] = static_cast<int>(rem % static_cast<std::size_t>(a2.size()));
      rem /= static_cast<std::size_t>(a2.size());
    }
    const Word z(a2, syms);
    for (int n_i = 0; n_i < depth; ++n_i) {
      for (int l = 0; l <= n_i; ++l) {
        const double r =
            image_gibbs_log_ratio(nu, psi1, pi, z, l, n_i, k_cap, source, pressure);
        out.max_abs_log_ratio = std::max(out.max_abs_log_ratio, std::abs(r));
        ++out.windows;
      }
    }
  }
  out.k_prime =
      std::max(1.0, std::exp(out.max_abs_log_ratio) / (K * K));
  return out;
}

double pushforward_mass(const CylinderMeasure& mu, const FactorMap& pi,
                        const Word& z, bool oracle) {
  return CylinderMeasure::pushforward(mu, pi, oracle).mass(z);
}

bool check_fiber_first_time_agreement(const CylinderMeasure& mu,
                                      const Potential& psi1,
                                      const FactorMap& pi, const Word& z,
                                      double pressure, double K, int horizon,
                                      double slack) {
  int agreed = -1;
  const TailSpec tail = TailSpec::zeros(pi.source());
  for (const Word& x : FiberWordRange(pi, z)) {
    const GibbsCertificate cert =
        scan_gibbs_times(mu, psi1, pressure, K, x, tail, horizon, slack);
    const int first = cert.times.empty() ? 0 : cert.times.front();
    if (agreed < 0)
      agreed = first;
    else if (agreed != first)
      return false;
  }
  return true;
}

DecayFit fit_decay(std::span<const int> ks, std::span<const double> osc) {
  if (ks.size() != osc.size())
    throw std::invalid_argument("decay fit needs matching k and osc lengths");
  if (ks.size() < 4)
    throw std::invalid_argument("decay fit needs at least 4 points");
  for (double v : osc)
    if (!(v > 0.0))
      throw std::invalid_argument("decay fit needs strictly positive data");

  std::vector<double> logk(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1) throw std::invalid_argument("decay fit needs k >= 1");
    logk[i] = std::log(static_cast<double>(ks[i]));
  }

  DecayFit out;
  out.k_min = *std::min_element(ks.begin(), ks.end());
  out.k_max = *std::max_element(ks.begin(), ks.end());

  // polynomial: log osc = log Gamma - s log k
  std::vector<double> logosc(osc.size());
  for (std::size_t i = 0; i < osc.size(); ++i) logosc[i] = std::log(osc[i]);
  const LinearFit poly = fit_line(logk, logosc);
  out.residual_polynomial = poly.rms_residual;
  out.gamma = std::exp(poly.intercept);
  out.s_exponent = -poly.slope;

  // stretched: log(-log osc) = log(-log theta) + beta log k; needs osc < 1
  bool stretched_ok = true;
  std::vector<double> loglog(osc.size());
  for (std::size_t i = 0; i < osc.size() && stretched_ok; ++i) {
    if (!(osc[i] < 1.0)) {
      stretched_ok = false;
      break;
    }
    loglog[i] = std::log(-std::log(osc[i]));
  }
  double stretched_residual = std::numeric_limits<double>::infinity();
  double theta = 0.5, beta = 1.0;
  if (stretched_ok) {
    const LinearFit st = fit_line(logk, loglog);
    stretched_residual = st.rms_residual;
    theta = std::exp(-std::exp(st.intercept));
    beta = std::min(std::max(st.slope, 1e-12), 1.0);
  }
  out.residual_stretched = stretched_residual;
  out.theta = theta;
  out.beta = beta;

  if (stretched_residual <= poly.rms_residual) {
    out.model = DecayFit::Model::stretched;
    out.residual = stretched_residual;
    out.gamma = 1.0;  // absorbed by the transformed coordinates
  } else {
    out.model = DecayFit::Model::polynomial;
    out.residual = poly.rms_residual;
  }
  return out;
}

}  // namespace seqgibbs
