#pragma once

#include <span>
#include <vector>

#include "seqgibbs/factor_map.hpp"
#include "seqgibbs/gibbs.hpp"
#include "seqgibbs/measure.hpp"
#include "seqgibbs/potential.hpp"
#include "seqgibbs/word.hpp"

namespace seqgibbs {

/// Supplies the increasing times n_k indexing the fiber sums. For locally
/// constant potentials on full shifts every n qualifies, so the default is
/// n_k = k; truncated fixtures take the times from a certificate.
class GibbsTimeSource {
 public:
  static GibbsTimeSource identity();
  static GibbsTimeSource from_times(std::vector<int> times);
  static GibbsTimeSource from_certificate(const GibbsCertificate& cert);

  /// n_k, with n_0 = 0.
  int time(int k) const;
  /// Largest k with time(k) <= bound, or -1 when even n_0 exceeds it.
  int level_for(int bound) const;
  /// Source seen from the i-shifted point: times n_k - i that stay >= 1.
  GibbsTimeSource shifted(int i) const;

 private:
  GibbsTimeSource(bool identity, std::vector<int> times);
  bool identity_;
  std::vector<int> times_;
};

/// log sum over fiber words x = x_l..x_n (pi(x_i) = z_i) of
/// exp(sum_{j=l}^{n} [psi1(sigma^{j-l} of x.w) - pressure]).
/// Forward pass over (fiber symbol, context) states for locally constant
/// psi1; closed form for the geometric family. Renewal potentials must be
/// truncated first.
double fiber_log_sum(const Potential& psi1, const FactorMap& pi, const Word& z,
                     const TailSpec& w, int l, double pressure = 0.0);

/// Same sum with the symbols at positions pin_from..n fixed to `pinned`.
double fiber_log_sum_pinned(const Potential& psi1, const FactorMap& pi,
                            const Word& z, int pin_from, const Word& pinned,
                            const TailSpec& w, int l, double pressure = 0.0);

/// The ratio of consecutive fiber sums at depth n_k = |z| - 1:
///   exp(fiber_log_sum(l=0) - fiber_log_sum(l=1)).
double image_ratio(const Potential& psi1, const FactorMap& pi, const Word& z,
                   const TailSpec& w, double pressure = 0.0);

/// The closed interval of image ratios over all tails, with its spread
/// lambda = max/min >= 1. Endpoints are certified outer values: exact for
/// locally constant psi1 (finitely many tail contexts) and for the geometric
/// family (the tail enters through one monotone functional).
struct RatioInterval {
  int k = 0;
  int n_k = 0;
  double min_u = 0.0;
  double max_u = 0.0;
  double inflation_log = 0.0;  // extra outer slack beyond the scanned tails

  double lambda() const { return max_u / min_u; }
};

RatioInterval image_ratio_interval(const Potential& psi1, const FactorMap& pi,
                                   const Word& z, int k,
                                   const GibbsTimeSource& source,
                                   double pressure = 0.0);

/// Consecutive intervals nested within slack on the log endpoints.
bool intervals_nested(std::span<const RatioInterval> intervals,
                      double slack = 1e-9);

/// Spread sequence nonincreasing within slack.
bool spreads_monotone(std::span<const double> lambdas, double slack = 1e-9);

/// Lambda_{k+1} inside Lambda_k for all k < k_max, with slack on the log
/// endpoints.
bool check_interval_nesting(const Potential& psi1, const FactorMap& pi,
                            const Word& z, int k_max,
                            const GibbsTimeSource& source, double pressure = 0.0,
                            double slack = 1e-9);

/// lambda_{k+1} <= lambda_k + slack for all k < k_max.
bool check_spread_monotone(const Potential& psi1, const FactorMap& pi,
                           const Word& z, int k_max,
                           const GibbsTimeSource& source, double pressure = 0.0,
                           double slack = 1e-9);

/// The fiber weight vectors P^{k,i} compared across tails: every ratio
/// P^{k,i}(xbar, w) / P^{k,i}(xbar, w') stays >= K^{-4} - slack.
bool check_fiber_weight_ratio(const Potential& psi1, const FactorMap& pi,
                              const Word& z, int i, int k, double K,
                              const GibbsTimeSource& source,
                              double pressure = 0.0, double slack = 1e-9);

/// Sum of variation bounds 2 sum_{n=0}^{n_i} var_{n_k - n}(psi1); zero for a
/// depth-m potential once n_k - n_i >= m.
double recursion_variation_term(const Potential& psi1, int i, int k,
                                const GibbsTimeSource& source);

/// lambda_k <= c e^{variation term} + (1-c) lambda_i with c = K^{-4}.
bool check_spread_recursion(const Potential& psi1, const FactorMap& pi,
                            const Word& z, int i, int k, double K,
                            const GibbsTimeSource& source, double pressure = 0.0,
                            double slack = 1e-9);

/// Certified value of the image potential at the prefix of z: the log
/// midpoint of the ratio interval, with error half the log spread.
struct ImagePotentialEstimate {
  int k = 0;
  int n_k = 0;
  double value = 0.0;
  double error = 0.0;
};

ImagePotentialEstimate estimate_image_potential(const Potential& psi1,
                                                const FactorMap& pi,
                                                const Word& z, int k,
                                                const GibbsTimeSource& source,
                                                double pressure = 0.0);

/// Telescoped Birkhoff identity: the sum of n+1 certified image-potential
/// values against the closed fiber-sum form; residual must stay within the
/// accumulated error budget.
struct TelescopeCheck {
  double residual = 0.0;
  double budget = 0.0;
  bool pass() const { return residual <= budget; }
};

TelescopeCheck image_birkhoff_residual(const Potential& psi1,
                                       const FactorMap& pi, const Word& z,
                                       int n, int k,
                                       const GibbsTimeSource& source,
                                       double pressure = 0.0,
                                       double slack = 1e-9);

/// log of nu([z_l..z_{n_i}]) / exp(sum of image-potential values along the
/// shifted prefixes), the quantitative form of the image Gibbs property.
double image_gibbs_log_ratio(const CylinderMeasure& nu, const Potential& psi1,
                             const FactorMap& pi, const Word& z, int l, int n_i,
                             int k_cap, const GibbsTimeSource& source,
                             double pressure = 0.0);

struct ImageGibbsScan {
  double k_prime = 1.0;  // smallest K' with all ratios in [1/(K^2 K'), K^2 K']
  std::size_t windows = 0;
  double max_abs_log_ratio = 0.0;
};

/// Exhaustive scan over the target cylinders of the given depth and all
/// (l, n_i) windows inside them.
ImageGibbsScan scan_image_gibbs(const CylinderMeasure& nu, const Potential& psi1,
                                const FactorMap& pi, int depth, double K,
                                int k_cap, const GibbsTimeSource& source,
                                double pressure = 0.0);

/// Exact push-forward mass of [z] under pi; enumeration when `oracle` is set.
double pushforward_mass(const CylinderMeasure& mu, const FactorMap& pi,
                        const Word& z, bool oracle = false);

/// Regularity of the factor map over a fixture: the first Gibbs time agrees
/// across every fiber word of z (scanned with canonical tails).
bool check_fiber_first_time_agreement(const CylinderMeasure& mu,
                                      const Potential& psi1,
                                      const FactorMap& pi, const Word& z,
                                      double pressure, double K, int horizon,
                                      double slack = 1e-9);

/// Decay-model fit in transformed coordinates:
///   stretched:   log(-log osc_k) against log k  ->  osc ~ theta^{k^beta}
///   polynomial:  log osc_k       against log k  ->  osc ~ Gamma k^{-s}
/// The lower-residual model wins; residuals are RMS in fit coordinates.
struct DecayFit {
  enum class Model { stretched, polynomial };
  Model model = Model::stretched;
  double gamma = 1.0;
  double theta = 0.5;
  double beta = 1.0;
  double s_exponent = 0.0;
  double residual = 0.0;
  double residual_stretched = 0.0;
  double residual_polynomial = 0.0;
  int k_min = 0;
  int k_max = 0;
};

DecayFit fit_decay(std::span<const int> ks, std::span<const double> osc);

}  // namespace seqgibbs
