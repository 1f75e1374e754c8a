#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "seqgibbs/factor_map.hpp"
#include "seqgibbs/transfer.hpp"
#include "seqgibbs/word.hpp"

namespace seqgibbs {

/// Signals a cylinder of exactly zero mass, distinct from numeric underflow
/// (log-domain masses never underflow to zero silently).
class NullCylinderError : public std::runtime_error {
 public:
  explicit NullCylinderError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Closed Markov form of a cylinder provider on contexts of a fixed length:
///   log mass(w) = initial(ctx_0) + sum of step weights + terminal(ctx_end)
/// for |w| > context_length; shorter words marginalize over extensions.
struct MarkovView {
  Alphabet alphabet{2};
  int context_length = 0;
  std::vector<double> log_initial;   // per context
  std::vector<double> log_step;      // per (context_length+1)-word
  std::vector<double> log_terminal;  // per context

  std::size_t context_count() const { return log_initial.size(); }
  double log_mass(std::span<const int> word) const;
};

/// Abstract cylinder-mass provider word -> [0,1] with the additivity
/// contract mass([w]) = sum_a mass([w a]) and mass(empty) = 1.
class CylinderMeasure {
 public:
  enum class Kind { conformal, equilibrium, pushforward, empirical };

  Kind kind() const;
  const Alphabet& alphabet() const;

  double log_mass(const Word& w) const;  // -inf on a genuinely null cylinder
  double mass(const Word& w) const;

  /// Present when the provider has the closed Markov form (exact providers
  /// and their push-forwards under a one-block factor).
  const std::optional<MarkovView>& markov_view() const;

  /// Sample count for empirical providers.
  std::optional<std::size_t> sample_size() const;

  /// 1e-10 for exact providers, 3/sqrt(N) for empirical ones.
  double additivity_tolerance() const;

  static CylinderMeasure conformal(const TransferMatrix& matrix,
                                   const PerronData& eigendata);
  static CylinderMeasure equilibrium(const TransferMatrix& matrix,
                                     const PerronData& eigendata);
  /// Push-forward under pi; exact fiber sums via a forward pass over the
  /// base Markov view, or brute-force enumeration when forced or when the
  /// base has no Markov view.
  static CylinderMeasure pushforward(const CylinderMeasure& base,
                                     const FactorMap& pi,
                                     bool brute_force = false);
  /// Empirical provider from sampled words; masses are prefix frequencies,
  /// defined up to the given depth.
  static CylinderMeasure empirical(const std::vector<Word>& samples,
                                   int max_depth);

 private:
  struct Impl;
  explicit CylinderMeasure(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// |mass(w) - sum_a mass(w a)|.
double additivity_gap(const CylinderMeasure& mu, const Word& w);

/// Word of length n distributed as the equilibrium measure on n-cylinders;
/// deterministic per seed.
Word sample_path(const TransferMatrix& matrix, const PerronData& eigendata,
                 int n, std::uint64_t seed);

}  // namespace seqgibbs
