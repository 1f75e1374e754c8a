#include "seqgibbs/gibbs.hpp"

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

GibbsRatio gibbs_log_ratio(const CylinderMeasure& mu, const Potential& psi,
                           double pressure, const Word& x, const TailSpec& tail,
                           int n, int j) {
  if (j < 0 || j >= n || static_cast<std::size_t>(n) > x.length())
    throw std::invalid_argument("gibbs ratio requires 0 <= j < n <= length(x)");
  const Word window = x.suffix(static_cast<std::size_t>(j))
                          .prefix(static_cast<std::size_t>(n - j));
  const double log_mass = mu.log_mass(window);
  if (log_mass == kNegInf)
    throw NullCylinderError("cylinder [" + window.display() + "] has zero mass");
  const EvalResult sum =
      psi.birkhoff_sum(x.suffix(static_cast<std::size_t>(j)), tail, n - j);
  return {log_mass - (sum.value - (n - j) * pressure), sum.radius};
}

double gibbs_ratio(const CylinderMeasure& mu, const Potential& psi,
                   double pressure, const Word& x, const TailSpec& tail, int n,
                   int j) {
  return std::exp(gibbs_log_ratio(mu, psi, pressure, x, tail, n, j).log_ratio);
}

GibbsCertificate scan_gibbs_times(const CylinderMeasure& mu,
                                  const Potential& psi, double pressure,
                                  double K, const Word& x, const TailSpec& tail,
                                  int horizon, double slack) {
  if (K < 1.0) throw std::invalid_argument("Gibbs constant K must be >= 1");
  if (horizon < 0 || static_cast<std::size_t>(horizon) > x.length())
    throw std::invalid_argument("scan horizon must not exceed the word length");
  GibbsCertificate cert{K, pressure, GibbsPoint{x, tail}, horizon, {}};
  const double log_k = std::log(K);
  for (int n = 1; n <= horizon; ++n) {
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) {
      const GibbsRatio r = gibbs_log_ratio(mu, psi, pressure, x, tail, n, j);
      ok = std::abs(r.log_ratio) + r.radius <= log_k + slack;
    }
    if (ok) cert.times.push_back(n);
  }
  return cert;
}

double minimal_gibbs_constant(const CylinderMeasure& mu, const Potential& psi,
                              double pressure, const Word& x,
                              const TailSpec& tail, int n) {
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    const GibbsRatio r = gibbs_log_ratio(mu, psi, pressure, x, tail, n, j);
    worst = std::max(worst, std::abs(r.log_ratio) + r.radius);
  }
  return std::exp(worst);
}

bool check_shift_consistency(const CylinderMeasure& mu, const Potential& psi,
                             const GibbsCertificate& cert, double slack) {
  const Word& x = cert.point.prefix;
  const TailSpec& tail = cert.point.tail;
  const GibbsCertificate fresh = scan_gibbs_times(mu, psi, cert.P, cert.K, x,
                                                  tail, cert.horizon, slack);
  if (fresh.times != cert.times) return false;
  for (int n = 1; n < cert.horizon; ++n) {
    const Word shifted = x.suffix(static_cast<std::size_t>(n));
    const TailSpec shifted_tail = tail;  // n <= horizon <= |x|
    const GibbsCertificate sub = scan_gibbs_times(
        mu, psi, cert.P, cert.K, shifted, shifted_tail, cert.horizon - n, slack);
    for (int t : cert.times) {
      if (t <= n) continue;
      if (!std::binary_search(sub.times.begin(), sub.times.end(), t - n))
        return false;
    }
  }
  return true;
}

namespace {

// Global sup of the accumulated discrepancy over length-n cylinders of a
// locally constant potential. Only the boundary windows contribute, so the
// sup runs over a suffix class and a pair of completions.
double locally_constant_global_discrepancy(const Potential& psi, int n) {
  const int m = psi.depth();
  const int q = psi.alphabet().size();
  const auto& table = psi.table();
  const int suffix_len = std::min(n, m - 1);
  const std::size_t suffixes = pow_size(q, suffix_len);
  const std::size_t completions = pow_size(q, m - 1);
  const int j0 = n >= m ? n - m + 1 : 0;

  std::vector<int> sym(static_cast<std::size_t>(suffix_len + 2 * (m - 1)));
  double worst = 0.0;
  for (std::size_t si = 0; si < suffixes; ++si) {
    for (std::size_t c1 = 0; c1 < completions; ++c1) {
      for (std::size_t c2 = 0; c2 < completions; ++c2) {
        // positions n-suffix_len..n-1 come from the suffix, then either
        // completion; windows j = j0..n-1.
        double sum = 0.0;
        for (int j = j0; j < n; ++j) {
          std::size_t idx1 = 0, idx2 = 0;
          for (int i = 0; i < m; ++i) {
            const int p = j + i;
            int s1, s2;
            if (p < n) {
              const int off = p - (n - suffix_len);
              const int s = static_cast<int>(
                  (si / pow_size(q, suffix_len - 1 - off)) %
                  static_cast<std::size_t>(q));
              s1 = s2 = s;
            } else {
              const int off = p - n;
              s1 = static_cast<int>((c1 / pow_size(q, m - 2 - off)) %
                                    static_cast<std::size_t>(q));
              s2 = static_cast<int>((c2 / pow_size(q, m - 2 - off)) %
                                    static_cast<std::size_t>(q));
            }
            idx1 = idx1 * static_cast<std::size_t>(q) +
                   static_cast<std::size_t>(s1);
            idx2 = idx2 * static_cast<std::size_t>(q) +
                   static_cast<std::size_t>(s2);
          }
          sum += std::abs(table[idx1] - table[idx2]);
        }
        worst = std::max(worst, sum);
      }
    }
  }
  return worst;
}

}  // namespace

WeakGibbsProfile weak_gibbs_profile(const Potential& psi, int max_depth) {
  WeakGibbsProfile out;
  out.kind = WeakGibbsProfile::Kind::global_sup;
  out.log_constants.resize(static_cast<std::size_t>(max_depth));
  switch (psi.kind()) {
    case Potential::Kind::locally_constant: {
      const int m = psi.depth();
      const int q = psi.alphabet().size();
      // The exact pair sup costs q^{3(m-1)}; beyond budget fall back to the
      // summed variation bounds.
      const bool exact = pow_size(q, 3 * (m - 1)) <= (1u << 22);
      out.bound_mode = !exact;
      double constant_tail = -1.0;
      for (int n = 1; n <= max_depth; ++n) {
        double v;
        if (exact) {
          if (n >= m && constant_tail >= 0.0) {
            v = constant_tail;  // boundary structure no longer depends on n
          } else {
            v = locally_constant_global_discrepancy(psi, n);
            if (n >= m) constant_tail = v;
          }
        } else {
          v = 0.0;
          for (int j = std::max(0, n - m + 1); j < n; ++j)
            v += psi.variation_bound(n - j);
        }
        out.log_constants[static_cast<std::size_t>(n - 1)] = v;
      }
      break;
    }
    case Potential::Kind::geometric_series: {
      // Exact: the discrepancy is one shared linear functional of the free
      // coordinates, extremal at a constant continuation.
      out.bound_mode = false;
      const double theta = psi.theta();
      const auto& g = psi.symbol_values();
      const double range = *std::max_element(g.begin(), g.end()) -
                           *std::min_element(g.begin(), g.end());
      for (int n = 1; n <= max_depth; ++n)
        out.log_constants[static_cast<std::size_t>(n - 1)] =
            theta * (1.0 - std::pow(theta, n)) / (1.0 - theta) * range /
            (1.0 - theta);
      break;
    }
    case Potential::Kind::renewal: {
      // The all-ones cylinder dominates; cylinders with a later last zero
      // drop the corresponding terms.
      out.bound_mode = true;
      double acc = 0.0;
      for (int n = 1; n <= max_depth; ++n) {
        acc += psi.variation_bound(n);
        out.log_constants[static_cast<std::size_t>(n - 1)] = acc;
      }
      break;
    }
  }
  return out;
}

WeakGibbsProfile weak_gibbs_profile(const Potential& psi, int max_depth,
                                    const GibbsPoint& point) {
  if (point.prefix.length() < static_cast<std::size_t>(max_depth))
    throw std::invalid_argument("pointwise profile needs a prefix of length N");
  WeakGibbsProfile out;
  out.kind = WeakGibbsProfile::Kind::pointwise;
  out.bound_mode = false;
  out.log_constants.resize(static_cast<std::size_t>(max_depth));
  for (int n = 1; n <= max_depth; ++n) {
    const Word prefix = point.prefix.prefix(static_cast<std::size_t>(n));
    out.log_constants[static_cast<std::size_t>(n - 1)] =
        psi.cylinder_discrepancy(prefix, point.tail);
    out.bound_mode = out.bound_mode || !psi.discrepancy_exact(prefix);
  }
  return out;
}

std::vector<double> nonlacunarity_profile(const GibbsCertificate& cert) {
  std::vector<double> out;
  if (cert.times.size() < 2) return out;
  out.reserve(cert.times.size() - 1);
  for (std::size_t i = 0; i + 1 < cert.times.size(); ++i)
    out.push_back(static_cast<double>(cert.times[i + 1]) /
                  static_cast<double>(cert.times[i]));
  return out;
}

PathScanner::PathScanner(const MarkovView& view, const Potential& psi,
                         double pressure, const Word& path,
                         const TailSpec& tail)
    : path_length_(path.length()),
      context_length_(view.context_length),
      q_(static_cast<std::size_t>(view.alphabet.size())),
      pressure_(pressure) {
  if (psi.kind() != Potential::Kind::locally_constant)
    throw std::invalid_argument("PathScanner needs a locally constant potential");
  const int m = psi.depth();
  const std::size_t q = static_cast<std::size_t>(view.alphabet.size());
  const std::size_t c = static_cast<std::size_t>(context_length_);
  const std::size_t L = path_length_;
  const std::size_t contexts = view.context_count();

  birkhoff_prefix_.assign(L + 1, 0.0);
  for (std::size_t p = 0; p < L; ++p) {
    std::size_t idx = 0;
    for (int i = 0; i < m; ++i)
      idx = idx * q + static_cast<std::size_t>(
                          point_symbol(path, tail, p + static_cast<std::size_t>(i)));
    birkhoff_prefix_[p + 1] = birkhoff_prefix_[p] + psi.table()[idx];
  }

  context_at_.assign(L >= c ? L - c + 1 : 0, 0);
  if (L >= c) {
    std::size_t ctx = 0;
    for (std::size_t i = 0; i < c; ++i)
      ctx = ctx * q + static_cast<std::size_t>(path[i]);
    context_at_[0] = ctx;
    for (std::size_t p = 1; p + c <= L; ++p) {
      ctx = (ctx * q + static_cast<std::size_t>(path[p + c - 1])) % contexts;
      context_at_[p] = ctx;
    }
  }

  step_prefix_.assign(L, 0.0);
  for (std::size_t p = c; p < L; ++p) {
    const std::size_t w =
        context_at_[p - c] * q + static_cast<std::size_t>(path[p]);
    step_prefix_[p] = step_prefix_[p - 1] + view.log_step[w];
  }

  log_initial_ = view.log_initial;
  log_terminal_ = view.log_terminal;

  // Marginal masses for windows shorter than the context.
  short_mass_.resize(c);
  for (std::size_t len = 1; len < c; ++len) {
    const std::size_t words = pow_size(static_cast<int>(q), static_cast<int>(len));
    const std::size_t block =
        pow_size(static_cast<int>(q), static_cast<int>(c - len));
    short_mass_[len].assign(words, kNegInf);
    for (std::size_t widx = 0; widx < words; ++widx) {
      LogSumAccumulator acc;
      for (std::size_t i = 0; i < block; ++i) {
        const std::size_t ctx = widx * block + i;
        acc.add(view.log_initial[ctx] + view.log_terminal[ctx]);
      }
      short_mass_[len][widx] = acc.result();
    }
  }
  // cache path symbols for short-window lookups
  path_symbols_.assign(path.symbols().begin(), path.symbols().end());
}

double PathScanner::window_log_ratio(int a, int b) const {
  const std::size_t c = static_cast<std::size_t>(context_length_);
  const std::size_t ua = static_cast<std::size_t>(a);
  const std::size_t ub = static_cast<std::size_t>(b);
  const int width = b - a;
  double log_mass;
  if (static_cast<std::size_t>(width) >= c) {
    const double steps =
        step_prefix_[ub - 1] - step_prefix_[ua + c - 1];
    log_mass = log_initial_[context_at_[ua]] + steps +
               log_terminal_[context_at_[ub - c]];
  } else {
    std::size_t widx = 0;
    for (int p = a; p < b; ++p)
      widx = widx * q_ + static_cast<std::size_t>(path_symbols_[static_cast<std::size_t>(p)]);
    log_mass = short_mass_[static_cast<std::size_t>(width)][widx];
  }
  const double birkhoff = birkhoff_prefix_[ub] - birkhoff_prefix_[ua];
  return log_mass - (birkhoff - width * pressure_);
}

int PathScanner::first_gibbs_time(int a, int cap, double log_k,
                                  double slack) const {
  for (int n = 1; n <= cap; ++n) {
    bool ok = true;
    for (int j = 0; j < n && ok; ++j)
      ok = std::abs(window_log_ratio(a + j, a + n)) <= log_k + slack;
    if (ok) return n;
  }
  return 0;
}

GrowthStats gibbs_time_growth(std::span<const Word> paths,
                              const CylinderMeasure& mu, const Potential& psi,
                              double pressure, double K, const TailSpec& tail,
                              int max_first_time, double slack) {
  if (K < 1.0) throw std::invalid_argument("Gibbs constant K must be >= 1");
  GrowthStats stats;
  stats.per_path.reserve(paths.size());
  const double log_k = std::log(K);
  // Keep boundary windows word-determined so the scan is exact.
  const int margin =
      psi.kind() == Potential::Kind::locally_constant ? psi.depth() - 1 : 0;
  const bool fast = psi.kind() == Potential::Kind::locally_constant &&
                    mu.markov_view().has_value();

  std::vector<double> first_times, slopes;
  for (const Word& path : paths) {
    PathGrowth pg;
    const int L = static_cast<int>(path.length());
    std::vector<int> abs_times;
    int offset = 0;
    if (fast) {
      PathScanner scanner(*mu.markov_view(), psi, pressure, path, tail);
      for (;;) {
        const int cap = std::min(max_first_time, L - offset - margin);
        if (cap < 1) break;
        const int n1 = scanner.first_gibbs_time(offset, cap, log_k, slack);
        if (n1 == 0) break;
        offset += n1;
        abs_times.push_back(offset);
      }
    } else {
      for (;;) {
        const int cap = std::min(max_first_time, L - offset - margin);
        if (cap < 1) break;
        const Word suffix = path.suffix(static_cast<std::size_t>(offset));
        int n1 = 0;
        for (int n = 1; n <= cap && n1 == 0; ++n) {
          bool ok = true;
          for (int j = 0; j < n && ok; ++j) {
            const GibbsRatio r =
                gibbs_log_ratio(mu, psi, pressure, suffix, tail, n, j);
            ok = std::abs(r.log_ratio) + r.radius <= log_k + slack;
          }
          if (ok) n1 = n;
        }
        if (n1 == 0) break;
        offset += n1;
        abs_times.push_back(offset);
      }
    }
    pg.steps = static_cast<int>(abs_times.size());
    if (abs_times.empty()) {
      pg.exceptional = true;
      ++stats.exceptional_paths;
    } else {
      pg.first_time = abs_times.front();
      pg.last_time = abs_times.back();
      if (abs_times.size() >= 2) {
        std::vector<double> ks(abs_times.size()), ts(abs_times.size());
        for (std::size_t i = 0; i < abs_times.size(); ++i) {
          ks[i] = static_cast<double>(i + 1);
          ts[i] = static_cast<double>(abs_times[i]);
        }
        pg.slope = fit_line(ks, ts).slope;
      } else {
        pg.slope = static_cast<double>(abs_times.front());
      }
      first_times.push_back(pg.first_time);
      slopes.push_back(pg.slope);
    }
    stats.per_path.push_back(pg);
  }

  const auto mean_stderr = [](const std::vector<double>& v) {
    if (v.empty()) return std::pair<double, double>{0.0, 0.0};
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    if (v.size() > 1) var /= static_cast<double>(v.size() - 1);
    return std::pair<double, double>{
        mean, std::sqrt(var / static_cast<double>(v.size()))};
  };
  std::tie(stats.mean_first_time, stats.first_time_stderr) =
      mean_stderr(first_times);
  std::tie(stats.mean_slope, stats.slope_stderr) = mean_stderr(slopes);
  return stats;
}

}  // namespace seqgibbs
