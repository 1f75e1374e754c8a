#include "seqgibbs/transfer.hpp"

#include <algorithm>
#include <cmath>

#include "seqgibbs/numerics.hpp"

namespace seqgibbs {

namespace {

std::size_t pow_size(int base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) out *= static_cast<std::size_t>(base);
  return out;
}

}  // namespace

TransferMatrix::TransferMatrix(Alphabet alphabet, int depth,
                               std::vector<double> log_weights)
    : alphabet_(alphabet), depth_(depth) {
  if (depth < 2) throw std::invalid_argument("transfer depth must be >= 2");
  if (log_weights.size() != pow_size(alphabet.size(), depth))
    throw std::invalid_argument("transfer weights must have q^m entries");
  context_count_ = pow_size(alphabet.size(), depth - 1);
  log_weights_ = std::move(log_weights);
}

std::size_t TransferMatrix::encode(std::span<const int> symbols) const {
  std::size_t idx = 0;
  for (int s : symbols)
    idx = idx * static_cast<std::size_t>(alphabet_.size()) +
          static_cast<std::size_t>(s);
  return idx;
}

void TransferMatrix::decode(std::size_t index, std::span<int> symbols) const {
  for (std::size_t i = symbols.size(); i-- > 0;) {
    symbols[i] = static_cast<int>(index % alphabet_.size());
    index /= static_cast<std::size_t>(alphabet_.size());
  }
}

void TransferMatrix::apply(std::span<const double> in,
                           std::span<double> out) const {
  const std::size_t q = static_cast<std::size_t>(alphabet_.size());
  for (std::size_t u = 0; u < context_count_; ++u) {
    double acc = 0.0;
    for (std::size_t a = 0; a < q; ++a) {
      const std::size_t w = u * q + a;
      acc += std::exp(log_weights_[w]) * in[w % context_count_];
    }
    out[u] = acc;
  }
}

void TransferMatrix::apply_transpose(std::span<const double> in,
                                     std::span<double> out) const {
  const std::size_t q = static_cast<std::size_t>(alphabet_.size());
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t w = 0; w < log_weights_.size(); ++w)
    out[w % context_count_] += std::exp(log_weights_[w]) * in[w / q];
}

TransferMatrix build_transfer(const Potential& psi) {
  if (psi.kind() != Potential::Kind::locally_constant)
    throw std::invalid_argument("build_transfer needs a locally constant potential");
  const Alphabet a = psi.alphabet();
  const std::size_t q = static_cast<std::size_t>(a.size());
  if (psi.depth() == 1) {
    // Depth-2 lift: the weight along (a b) is the depth-1 value at a.
    std::vector<double> lifted(q * q);
    for (std::size_t s = 0; s < q; ++s)
      for (std::size_t b = 0; b < q; ++b) lifted[s * q + b] = psi.table()[s];
    return TransferMatrix(a, 2, std::move(lifted));
  }
  return TransferMatrix(a, psi.depth(), psi.table());
}

namespace {

struct PowerResult {
  std::vector<double> vec;
  double lambda = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

PowerResult power_iterate(const TransferMatrix& m, bool transpose, double tol,
                          int max_iterations) {
  const std::size_t n = m.context_count();
  std::vector<double> v(n, 1.0), next(n, 0.0);
  double lambda = 0.0, residual = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    if (transpose)
      m.apply_transpose(v, next);
    else
      m.apply(v, next);
    double dot_nv = 0.0, dot_vv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dot_nv += next[i] * v[i];
      dot_vv += v[i] * v[i];
    }
    lambda = dot_nv / dot_vv;
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      residual = std::max(residual, std::abs(next[i] - lambda * v[i]));
    double sum = 0.0;
    for (double x : next) sum += x;
    if (sum <= 0.0)
      throw ConvergenceError("transfer matrix iteration collapsed to zero", residual);
    for (std::size_t i = 0; i < n; ++i) v[i] = next[i] / sum;
    if (residual <= tol * std::max(1.0, lambda))
      return {std::move(v), lambda, it, residual};
  }
  throw ConvergenceError("power iteration did not converge", residual);
}

}  // namespace

PerronData solve_perron(const TransferMatrix& matrix, double tol,
                        int max_iterations) {
  if (tol <= 0.0) throw std::invalid_argument("tolerance must be positive");
  PowerResult right = power_iterate(matrix, false, tol, max_iterations);
  PowerResult left = power_iterate(matrix, true, tol, max_iterations);

  PerronData out;
  out.lambda = right.lambda;
  out.pressure = std::log(right.lambda);
  out.iterations = right.iterations + left.iterations;
  out.residual = std::max(right.residual, left.residual);

  // Conformal context masses sum to 1.
  double csum = 0.0;
  for (double x : right.vec) csum += x;
  out.conformal = std::move(right.vec);
  for (double& x : out.conformal) x /= csum;

  // Density scaled so the equilibrium context masses sum to 1.
  double z = 0.0;
  for (std::size_t i = 0; i < out.conformal.size(); ++i)
    z += left.vec[i] * out.conformal[i];
  out.density = std::move(left.vec);
  for (double& x : out.density) x /= z;
  return out;
}

TruncationResult truncate_potential(const Potential& psi, int m) {
  return truncate_potential(psi, m, TailSpec::zeros(psi.alphabet()));
}

TruncationResult truncate_potential(const Potential& psi, int m,
                                    const TailSpec& canonical_tail) {
  if (m < 1) throw std::invalid_argument("truncation depth must be >= 1");
  if (psi.kind() == Potential::Kind::locally_constant && psi.depth() <= m)
    return {psi, 0.0};
  const Alphabet a = psi.alphabet();
  const std::size_t count = pow_size(a.size(), m);
  std::vector<double> table(count);
  std::vector<int> symbols(static_cast<std::size_t>(m));
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rem = idx;
    for (std::size_t i = symbols.size(); i-- > 0;) {
      symbols[i] = static_cast<int>(rem % a.size());
      rem /= static_cast<std::size_t>(a.size());
    }
    table[idx] = psi.evaluate(Word(a, symbols), canonical_tail).value;
  }
  return {Potential::locally_constant(a, m, std::move(table)),
          psi.variation_bound(m)};
}

namespace {

// max over length-t continuations (and their own continuations) of the sum of
// the t boundary windows, starting from the given context. Max-plus analogue
// of the transfer recursion, shared by every terminal context.
std::vector<double> boundary_maxima(const TransferMatrix& m) {
  const std::size_t q = static_cast<std::size_t>(m.alphabet().size());
  const std::size_t c = m.context_count();
  std::vector<double> r(c, 0.0), next(c);
  for (int step = 0; step < m.depth() - 1; ++step) {
    for (std::size_t u = 0; u < c; ++u) {
      double best = kNegInf;
      for (std::size_t a = 0; a < q; ++a) {
        const std::size_t w = u * q + a;
        best = std::max(best, m.log_weight(w) + r[w % c]);
      }
      next[u] = best;
    }
    r.swap(next);
  }
  return r;
}

double locally_constant_pressure(const Potential& psi, int n) {
  const TransferMatrix m = build_transfer(psi);
  const std::size_t q = static_cast<std::size_t>(m.alphabet().size());
  const std::size_t c = m.context_count();
  const int ctx_len = m.context_length();

  if (n < m.depth()) {
    // Every window crosses the boundary; enumerate words of length n and the
    // shared completion of length depth-1 directly.
    LogSumAccumulator acc;
    const std::size_t words = pow_size(static_cast<int>(q), n);
    const std::size_t completions = pow_size(static_cast<int>(q), ctx_len);
    std::vector<int> full(static_cast<std::size_t>(n + ctx_len));
    for (std::size_t wi = 0; wi < words; ++wi) {
      std::size_t rem = wi;
      for (std::size_t i = static_cast<std::size_t>(n); i-- > 0;) {
        full[i] = static_cast<int>(rem % q);
        rem /= q;
      }
      double best = kNegInf;
      for (std::size_t ci = 0; ci < completions; ++ci) {
        std::size_t crem = ci;
        for (std::size_t i = full.size(); i-- > static_cast<std::size_t>(n);) {
          full[i] = static_cast<int>(crem % q);
          crem /= q;
        }
        double sum = 0.0;
        for (int j = 0; j < n; ++j)
          sum += m.log_weight(m.encode(
              std::span<const int>(full).subspan(static_cast<std::size_t>(j),
                                                 static_cast<std::size_t>(m.depth()))));
        best = std::max(best, sum);
      }
      acc.add(best);
    }
    return acc.result() / n;
  }

  // Forward log-sum DP over contexts for the interior windows, then the
  // shared max-plus boundary term per terminal context.
  std::vector<double> level(c, 0.0), next(c);
  for (int p = ctx_len; p < n; ++p) {
    std::fill(next.begin(), next.end(), kNegInf);
    for (std::size_t u = 0; u < c; ++u) {
      if (level[u] == kNegInf) continue;
      for (std::size_t a = 0; a < q; ++a) {
        const std::size_t w = u * q + a;
        const std::size_t v = w % c;
        next[v] = log_add(next[v], level[u] + m.log_weight(w));
      }
    }
    level.swap(next);
  }
  const std::vector<double> r = boundary_maxima(m);
  LogSumAccumulator acc;
  for (std::size_t u = 0; u < c; ++u)
    if (level[u] != kNegInf) acc.add(level[u] + r[u]);
  return acc.result() / n;
}

double geometric_pressure(const Potential& psi, int n) {
  const double theta = psi.theta();
  const auto& g = psi.symbol_values();
  const double gmax = *std::max_element(g.begin(), g.end());
  double log_total = 0.0;
  for (int p = 0; p < n; ++p) {
    const double cp = (1.0 - std::pow(theta, p + 1)) / (1.0 - theta);
    LogSumAccumulator acc;
    for (double gv : g) acc.add(cp * gv);
    log_total += acc.result();
  }
  // Every window's unseen coordinates flipped to the maximal symbol.
  log_total += gmax * theta * (1.0 - std::pow(theta, n)) /
               ((1.0 - theta) * (1.0 - theta));
  return log_total / n;
}

// Words grouped by blocks "1^s 0" (weight e^{s_s}, the renewal recursion
//   W(p) = sum_{s<p} e^{s_s} W(p-1-s))
// plus a trailing run of ones whose windows take the supremum over
// continuations, scanned up to the horizon.
std::vector<double> renewal_pressure_profile(const Potential& psi, int n_max) {
  std::vector<double> s(static_cast<std::size_t>(n_max) + 1);
  {
    double acc = 0.0;
    for (int k = 0; k <= n_max; ++k) {
      acc += psi.renewal_coefficient(k);
      s[static_cast<std::size_t>(k)] = acc;
    }
  }
  std::vector<double> log_w(static_cast<std::size_t>(n_max) + 1, kNegInf);
  log_w[0] = 0.0;
  for (int p = 1; p <= n_max; ++p) {
    LogSumAccumulator acc;
    for (int run = 0; run <= p - 1; ++run)
      acc.add(s[static_cast<std::size_t>(run)] +
              log_w[static_cast<std::size_t>(p - 1 - run)]);
    log_w[static_cast<std::size_t>(p)] = acc.result();
  }

  // best_tail[r] = max over the continuation's first-zero position t of
  // sum_{i=t+1}^{t+r} a_i; the all-ones continuation contributes zero.
  const std::int64_t h = psi.horizon();
  std::vector<double> prefix(static_cast<std::size_t>(h) + 1);
  {
    double acc = 0.0;
    for (std::int64_t k = 0; k <= h; ++k) {
      acc += psi.renewal_coefficient(k);
      prefix[static_cast<std::size_t>(k)] = acc;
    }
  }
  std::vector<double> best_tail(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int r = 1; r <= n_max; ++r) {
    double best = 0.0;
    for (std::int64_t t = 0; t + r <= h; ++t)
      best = std::max(best, prefix[static_cast<std::size_t>(t + r)] -
                                prefix[static_cast<std::size_t>(t)]);
    best_tail[static_cast<std::size_t>(r)] = best;
  }

  std::vector<double> out(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    LogSumAccumulator total;
    for (int run = 0; run <= n; ++run)
      total.add(log_w[static_cast<std::size_t>(n - run)] +
                best_tail[static_cast<std::size_t>(run)]);
    out[static_cast<std::size_t>(n - 1)] = total.result() / n;
  }
  return out;
}

}  // namespace

double pressure_at_depth(const Potential& psi, int n) {
  if (n < 1) throw std::invalid_argument("pressure depth must be >= 1");
  switch (psi.kind()) {
    case Potential::Kind::locally_constant:
      return locally_constant_pressure(psi, n);
    case Potential::Kind::geometric_series:
      return geometric_pressure(psi, n);
    case Potential::Kind::renewal:
      return renewal_pressure_profile(psi, n).back();
  }
  return 0.0;
}

std::vector<double> pressure_profile(const Potential& psi, int n_max) {
  if (n_max < 1) throw std::invalid_argument("pressure depth must be >= 1");
  if (psi.kind() == Potential::Kind::renewal)
    return renewal_pressure_profile(psi, n_max);
  std::vector<double> out(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n)
    out[static_cast<std::size_t>(n - 1)] = pressure_at_depth(psi, n);
  return out;
}

double pressure_identity_gap(const TransferMatrix& matrix, const PerronData& e) {
  const std::size_t q = static_cast<std::size_t>(matrix.alphabet().size());
  const std::size_t c = matrix.context_count();
  double entropy = 0.0, integral = 0.0;
  for (std::size_t u = 0; u < c; ++u) {
    const double pi_u = e.conformal[u] * e.density[u];
    if (pi_u <= 0.0) continue;
    for (std::size_t a = 0; a < q; ++a) {
      const std::size_t w = u * q + a;
      const std::size_t v = w % c;
      const double step = std::exp(matrix.log_weight(w)) * e.conformal[v] /
                          (e.lambda * e.conformal[u]);
      if (step <= 0.0) continue;
      entropy -= pi_u * step * std::log(step);
      integral += pi_u * step * matrix.log_weight(w);
    }
  }
  return std::abs(e.pressure - (entropy + integral));
}

}  // namespace seqgibbs
