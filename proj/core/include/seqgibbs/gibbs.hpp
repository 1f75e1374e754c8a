#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seqgibbs/measure.hpp"
#include "seqgibbs/potential.hpp"
#include "seqgibbs/word.hpp"

namespace seqgibbs {

struct GibbsPoint {
  Word prefix;
  TailSpec tail;
};

/// Verified Gibbs times of one point at fixed constants K and P: every listed
/// n passes the two-sided cylinder/Birkhoff comparison for all offsets
/// 0 <= j <= n-1, and the list is the maximal such subset of 1..horizon.
struct GibbsCertificate {
  double K = 1.0;
  double P = 0.0;
  GibbsPoint point;
  int horizon = 0;
  std::vector<int> times;
};

struct GibbsRatio {
  double log_ratio = 0.0;  // log of mass([x_j..x_{n-1}]) / e^{S - (n-j)P}
  double radius = 0.0;     // certified inflation carried by the Birkhoff sum
};

/// The comparison of the cylinder mass against the Birkhoff weight along the
/// shifted point sigma^j(x.tail). Throws NullCylinderError on mass zero.
GibbsRatio gibbs_log_ratio(const CylinderMeasure& mu, const Potential& psi,
                           double pressure, const Word& x, const TailSpec& tail,
                           int n, int j);

double gibbs_ratio(const CylinderMeasure& mu, const Potential& psi,
                   double pressure, const Word& x, const TailSpec& tail, int n,
                   int j);

/// Inclusive-maximal scan at fixed K: n is a Gibbs time iff every offset's
/// certified log-ratio interval lies within [-log K - slack, log K + slack].
GibbsCertificate scan_gibbs_times(const CylinderMeasure& mu,
                                  const Potential& psi, double pressure,
                                  double K, const Word& x, const TailSpec& tail,
                                  int horizon, double slack = 1e-9);

/// Smallest K making n a Gibbs time of the point (diagnostic).
double minimal_gibbs_constant(const CylinderMeasure& mu, const Potential& psi,
                              double pressure, const Word& x,
                              const TailSpec& tail, int n);

/// Recomputes the certificate and every shifted certificate: true iff the
/// stored list is the maximal scan result and each listed n_i yields
/// n_i - n as a Gibbs time of the n-shifted point for all n <= n_i.
bool check_shift_consistency(const CylinderMeasure& mu, const Potential& psi,
                             const GibbsCertificate& certificate,
                             double slack = 1e-9);

/// K_n profile of the weak-Gibbs comparison, n = 1..N. Global kind takes the
/// sup of the accumulated discrepancy over n-cylinder representatives with
/// canonical tails; pointwise evaluates along one point's prefixes.
struct WeakGibbsProfile {
  enum class Kind { global_sup, pointwise };
  Kind kind = Kind::global_sup;
  bool bound_mode = false;  // true when entries are upper bounds, not sups
  std::vector<double> log_constants;  // log K_n, index n-1

  double normalized(int n) const {
    return log_constants[static_cast<std::size_t>(n - 1)] / n;
  }
};

WeakGibbsProfile weak_gibbs_profile(const Potential& psi, int max_depth);
WeakGibbsProfile weak_gibbs_profile(const Potential& psi, int max_depth,
                                    const GibbsPoint& point);

/// Consecutive ratios n_{i+1}/n_i of the certified times; empty when fewer
/// than two times are listed.
std::vector<double> nonlacunarity_profile(const GibbsCertificate& certificate);

struct PathGrowth {
  bool exceptional = false;  // no Gibbs time within the cap
  int first_time = 0;
  int steps = 0;          // number of chained times found
  int last_time = 0;      // n_steps
  double slope = 0.0;     // least squares of n_k against k
};

struct GrowthStats {
  double mean_first_time = 0.0;
  double first_time_stderr = 0.0;
  double mean_slope = 0.0;
  double slope_stderr = 0.0;
  std::size_t exceptional_paths = 0;
  std::vector<PathGrowth> per_path;
};

/// Chains first Gibbs times along each sampled path:
/// n_k = n_{k-1} + n_1(sigma^{n_{k-1}} x). Paths with no Gibbs time within
/// max_first_time are reported as exceptional, never dropped.
GrowthStats gibbs_time_growth(std::span<const Word> paths,
                              const CylinderMeasure& mu, const Potential& psi,
                              double pressure, double K, const TailSpec& tail,
                              int max_first_time, double slack = 1e-9);

/// O(1)-per-window ratio evaluation along one fixed path, for measures in
/// closed Markov form and locally constant potentials. Same comparison as
/// gibbs_log_ratio; used by the Monte Carlo scans.
class PathScanner {
 public:
  PathScanner(const MarkovView& view, const Potential& locally_constant,
              double pressure, const Word& path, const TailSpec& tail);

  int length() const { return static_cast<int>(path_length_); }
  /// log-ratio of the window [a, b) of the path (cylinder x_a..x_{b-1})
  /// against the Birkhoff sum at sigma^a of the path point.
  double window_log_ratio(int a, int b) const;
  /// First n in [1, cap] with all offsets inside [-logK-slack, logK+slack],
  /// starting the point at path offset `a`; 0 when none exists.
  int first_gibbs_time(int a, int cap, double log_k, double slack) const;

 private:
  std::size_t path_length_ = 0;
  int context_length_ = 0;
  std::size_t q_ = 2;
  double pressure_ = 0.0;
  std::vector<int> path_symbols_;
  std::vector<double> birkhoff_prefix_;  // V[p] = psi^p at the path point
  std::vector<double> step_prefix_;      // S[p] = sum of step weights through p
  std::vector<std::size_t> context_at_;  // context index starting at position p
  std::vector<double> log_initial_, log_terminal_;
  std::vector<std::vector<double>> short_mass_;  // per length < context_length
};

}  // namespace seqgibbs
