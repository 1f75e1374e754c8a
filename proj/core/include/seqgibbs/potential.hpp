#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "seqgibbs/word.hpp"

namespace seqgibbs {

/// Value of a potential at a fully specified point, together with a certified
/// radius: |psi(y) - value| <= radius for every y extending the evaluated
/// prefix. Radius 0 means exact to machine rounding.
struct EvalResult {
  double value = 0.0;
  double radius = 0.0;
};

/// Partial-sum diagnostics for the renewal family, evaluated up to the
/// configured horizon. The library reports these numbers and never claims
/// convergence or divergence beyond the horizon.
struct RenewalDiagnostics {
  std::int64_t horizon = 0;
  double last_partial_sum = 0.0;        // s_H = a_0 + ... + a_H
  double sum_exp_partial = 0.0;         // sum_{k<=H} e^{s_k}
  double sum_weighted_exp_partial = 0.0;  // sum_{k<=H} (k+1) e^{s_k}
};

/// One of three potential families on a full shift:
///   locally constant   -- depth m, value a table entry per m-cylinder;
///   geometric series   -- psi(x) = sum_n theta^n g(x_n), theta in (0,1);
///   renewal            -- psi = a_k on the k-th first-zero class, psi = 0 on
///                         the all-ones fixed point (two-symbol alphabet).
class Potential {
 public:
  enum class Kind { locally_constant, geometric_series, renewal };

  static Potential locally_constant(Alphabet alphabet, int depth,
                                    std::vector<double> log_table);
  static Potential geometric_series(Alphabet alphabet, double theta,
                                    std::vector<double> symbol_values);
  static Potential renewal(std::function<double(std::int64_t)> coefficient,
                           std::int64_t horizon);

  Kind kind() const;
  const Alphabet& alphabet() const;

  // Locally constant accessors.
  int depth() const;
  const std::vector<double>& table() const;

  // Geometric series accessors.
  double theta() const;
  const std::vector<double>& symbol_values() const;
  /// sum_{t>=0} theta^t g(tail_t), closed form over the eventually periodic
  /// continuation.
  double geometric_tail_value(const TailSpec& tail) const;

  // Renewal accessors.
  double renewal_coefficient(std::int64_t k) const;
  std::int64_t horizon() const;
  const RenewalDiagnostics& renewal_diagnostics() const;

  /// psi at the point x.tail. See EvalResult for the radius contract.
  EvalResult evaluate(const Word& x, const TailSpec& tail) const;

  /// Birkhoff sum of length n along x.tail; radii accumulate additively.
  EvalResult birkhoff_sum(const Word& x, const TailSpec& tail, int n) const;

  /// Upper bound on var_n(psi), nonincreasing in n. Exact for the locally
  /// constant and geometric families; 2 sup_{k >= n-1} |a_k| over the horizon
  /// for the renewal family.
  double variation_bound(int n) const;

  /// sup over y in the cylinder of x of |psi(x.tail) - psi(y)|.
  double variation_at(const Word& x, const TailSpec& tail) const;

  /// sup over y in the cylinder of x of the accumulated Birkhoff discrepancy
  ///   sum_{j<n} |psi(sigma^j x.tail) - psi(sigma^j y)|,   n = length(x).
  /// Exact for locally constant and geometric potentials and for renewal
  /// words whose suffixes all contain a zero; otherwise an upper bound built
  /// from variation_bound terms.
  double cylinder_discrepancy(const Word& x, const TailSpec& tail) const;

  /// True when cylinder_discrepancy is exact rather than a bound.
  bool discrepancy_exact(const Word& x) const;

 private:
  struct Impl;
  explicit Potential(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

}  // namespace seqgibbs
