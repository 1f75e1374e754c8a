#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "seqgibbs/measure.hpp"

using namespace seqgibbs;
using doctest::Approx;

namespace {

const oracles::Matrix kLumpable = {
    {0.2, 0.3, 0.5}, {0.4, 0.1, 0.5}, {0.3, 0.3, 0.4}};

CylinderMeasure lumpable_equilibrium(TransferMatrix& t_out, PerronData& e_out) {
  const Potential psi = Potential::locally_constant(
      Alphabet(3), 2, oracles::log_flatten(kLumpable));
  t_out = build_transfer(psi);
  e_out = solve_perron(t_out);
  return CylinderMeasure::equilibrium(t_out, e_out);
}

}  // namespace

TEST_CASE("pushforward masses") {
  TransferMatrix t = build_transfer(Potential::locally_constant(
      Alphabet(3), 2, oracles::log_flatten(kLumpable)));
  PerronData e;
  const CylinderMeasure mu = lumpable_equilibrium(t, e);
  const FactorMap pi(Alphabet(3), Alphabet(2), {0, 0, 1});
  const CylinderMeasure nu = CylinderMeasure::pushforward(mu, pi);
  const CylinderMeasure nu_brute = CylinderMeasure::pushforward(mu, pi, true);

  SUBCASE("identity factor is a no-op") {
    const FactorMap id = FactorMap::identity(Alphabet(3));
    const CylinderMeasure same = CylinderMeasure::pushforward(mu, id);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<int> syms;
      const int len = static_cast<int>(rng() % 7);
      for (int i = 0; i < len; ++i) syms.push_back(static_cast<int>(rng() % 3));
      const Word w(Alphabet(3), syms);
      CHECK(same.mass(w) == Approx(mu.mass(w)).epsilon(1e-12));
    }
  }

  SUBCASE("forward pass agrees with enumeration") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<int> syms;
      const int len = static_cast<int>(rng() % 9);
      for (int i = 0; i < len; ++i) syms.push_back(static_cast<int>(rng() % 2));
      const Word z(Alphabet(2), syms);
      const double dp = nu.mass(z);
      const double brute = nu_brute.mass(z);
      CHECK(dp == Approx(brute).epsilon(1e-11));
    }
  }

  SUBCASE("lumped closed form") {
    // the lumped kernel and its stationary vector, both solved independently
    const oracles::Matrix lumped = {{0.5, 0.5}, {0.6, 0.4}};
    const auto pi_hat = oracles::stationary_distribution(lumped);
    CHECK(pi_hat[0] == Approx(6.0 / 11.0).epsilon(1e-12));
    const Word ab(Alphabet(2), {0, 1});
    CHECK(nu.mass(ab) == Approx(3.0 / 11.0).epsilon(1e-10));
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<int> syms;
      const int len = 1 + static_cast<int>(rng() % 8);
      for (int i = 0; i < len; ++i) syms.push_back(static_cast<int>(rng() % 2));
      double expected = pi_hat[static_cast<std::size_t>(syms[0])];
      for (std::size_t i = 0; i + 1 < syms.size(); ++i)
        expected *= lumped[static_cast<std::size_t>(syms[i])]
                          [static_cast<std::size_t>(syms[i + 1])];
      CHECK(nu.mass(Word(Alphabet(2), syms)) == Approx(expected).epsilon(1e-10));
    }
  }

  SUBCASE("two-to-one counting fixture") {
    const Potential uniform4 = Potential::locally_constant(
        Alphabet(4), 1, std::vector<double>(4, 0.0));
    const TransferMatrix t4 = build_transfer(uniform4);
    const PerronData e4 = solve_perron(t4);
    const FactorMap two_to_one(Alphabet(4), Alphabet(2), {0, 0, 1, 1});
    const CylinderMeasure img = CylinderMeasure::pushforward(
        CylinderMeasure::equilibrium(t4, e4), two_to_one);
    for (int len = 1; len <= 6; ++len) {
      const Word z(Alphabet(2), std::vector<int>(static_cast<std::size_t>(len), 1));
      CHECK(img.mass(z) ==
            Approx(std::pow(2.0, -static_cast<double>(len))).epsilon(1e-11));
    }
  }

  SUBCASE("pushforward additivity") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<int> syms;
      const int len = static_cast<int>(rng() % 8);
      for (int i = 0; i < len; ++i) syms.push_back(static_cast<int>(rng() % 2));
      CHECK(additivity_gap(nu, Word(Alphabet(2), syms)) <= 1e-10);
    }
  }
}

TEST_CASE("empirical provider") {
  TransferMatrix t = build_transfer(Potential::locally_constant(
      Alphabet(3), 2, oracles::log_flatten(kLumpable)));
  PerronData e;
  const CylinderMeasure mu = lumpable_equilibrium(t, e);
  std::vector<Word> samples;
  const int count = 4000;
  for (int i = 0; i < count; ++i)
    samples.push_back(sample_path(t, e, 12, 1000 + static_cast<std::uint64_t>(i)));
  const CylinderMeasure emp = CylinderMeasure::empirical(samples, 8);

  CHECK(emp.sample_size() == count);
  CHECK(emp.mass(Word(Alphabet(3))) == Approx(1.0).epsilon(1e-12));
  CHECK(emp.additivity_tolerance() ==
        Approx(3.0 / std::sqrt(static_cast<double>(count))).epsilon(1e-12));

  SUBCASE("additivity within the sampling tolerance") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<int> syms;
      const int len = static_cast<int>(rng() % 5);
      for (int i = 0; i < len; ++i) syms.push_back(static_cast<int>(rng() % 3));
      CHECK(additivity_gap(emp, Word(Alphabet(3), syms)) <=
            emp.additivity_tolerance());
    }
  }

  SUBCASE("frequencies track the chain") {
    const Word w(Alphabet(3), {0, 2});
    const double expected = mu.mass(w);
    const double sd = std::sqrt(expected * (1 - expected) / count);
    CHECK(std::abs(emp.mass(w) - expected) < 4 * sd);
  }

  SUBCASE("unseen cylinders have exactly zero mass") {
    // depth-8 words of one rare shape may be absent; construct an impossible
    // query instead: beyond the recorded depth the provider refuses.
    CHECK_THROWS_AS(
        emp.mass(Word(Alphabet(3), std::vector<int>(9, 0))),
        std::invalid_argument);
  }
}

TEST_CASE("markov view marginals") {
  // depth-3 potential so contexts have length 2 and short words marginalize
  std::vector<double> table(27);
  std::mt19937_64 rng(12);
  for (double& v : table)
    v = -2.0 + 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const Potential psi = Potential::locally_constant(Alphabet(3), 3, table);
  const TransferMatrix t = build_transfer(psi);
  const PerronData e = solve_perron(t);
  const CylinderMeasure nu = CylinderMeasure::conformal(t, e);

  // length-1 masses must equal the sum over the length-2 context masses
  for (int a = 0; a < 3; ++a) {
    double direct = 0.0;
    for (int b = 0; b < 3; ++b) direct += nu.mass(Word(Alphabet(3), {a, b}));
    CHECK(nu.mass(Word(Alphabet(3), {a})) == Approx(direct).epsilon(1e-11));
  }
  CHECK(nu.mass(Word(Alphabet(3))) == Approx(1.0).epsilon(1e-11));
}
