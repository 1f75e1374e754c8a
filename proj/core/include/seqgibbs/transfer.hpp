#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "seqgibbs/potential.hpp"
#include "seqgibbs/word.hpp"

namespace seqgibbs {

/// Raised when power iteration fails to reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Transfer matrix of a depth-m locally constant potential. States are the
/// (m-1)-symbol contexts; the entry on the transition along the m-word w is
/// e^{psi(w)}. Depth-1 potentials are lifted to the depth-2 convention so a
/// single code path serves every m >= 1.
class TransferMatrix {
 public:
  TransferMatrix(Alphabet alphabet, int depth, std::vector<double> log_weights);

  const Alphabet& alphabet() const { return alphabet_; }
  int depth() const { return depth_; }
  int context_length() const { return depth_ - 1; }
  std::size_t context_count() const { return context_count_; }
  std::size_t word_count() const { return log_weights_.size(); }

  /// log weight (the potential value) on the m-word with the given index.
  double log_weight(std::size_t word_index) const {
    return log_weights_[word_index];
  }

  std::size_t encode(std::span<const int> symbols) const;
  void decode(std::size_t index, std::span<int> symbols) const;

  /// v' = B v with B[u][v] = e^{psi(u a)} for v the successor context of
  /// u under the symbol a appended on the right.
  void apply(std::span<const double> in, std::span<double> out) const;
  /// v' = B^T v.
  void apply_transpose(std::span<const double> in, std::span<double> out) const;

 private:
  Alphabet alphabet_;
  int depth_;
  std::size_t context_count_;
  std::vector<double> log_weights_;  // indexed by m-word, high symbol first
};

/// Perron eigendata of a transfer matrix: spectral radius lambda, pressure
/// log lambda, the conformal context masses (eigenvector of B, normalized to
/// sum 1) and the density (eigenvector of B^T, scaled so the equilibrium
/// context masses conformal*density sum to 1).
struct PerronData {
  double lambda = 0.0;
  double pressure = 0.0;
  std::vector<double> conformal;
  std::vector<double> density;
  int iterations = 0;
  double residual = 0.0;
};

TransferMatrix build_transfer(const Potential& locally_constant);

/// Deterministic power iteration: all-ones start, Rayleigh quotient estimate.
PerronData solve_perron(const TransferMatrix& matrix, double tol = 1e-12,
                        int max_iterations = 100000);

/// Depth-m table psi_m(w) = psi(w . canonical tail), with a certified bound
/// on ||psi - psi_m||_inf. A locally constant potential of depth <= m passes
/// through unchanged with error 0.
struct TruncationResult {
  Potential truncated;
  double error = 0.0;
};
TruncationResult truncate_potential(const Potential& psi, int m);
TruncationResult truncate_potential(const Potential& psi, int m,
                                    const TailSpec& canonical_tail);

/// Finite-level cylinder pressure at uniform depth n:
///   P_n = (1/n) log sum_{|w|=n} exp(sup over [w] of the n-step Birkhoff sum).
/// Converges to log lambda for locally constant potentials.
double pressure_at_depth(const Potential& psi, int n);

/// P_1 ... P_{n_max} in one pass (the renewal family shares one horizon scan).
std::vector<double> pressure_profile(const Potential& psi, int n_max);

/// |log lambda - (h_mu + int psi d mu)| with the entropy and integral taken in
/// the closed Markov form of the equilibrium chain on contexts.
double pressure_identity_gap(const TransferMatrix& matrix, const PerronData& e);

}  // namespace seqgibbs
