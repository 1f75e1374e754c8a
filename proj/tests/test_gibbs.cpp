#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "seqgibbs/gibbs.hpp"

using namespace seqgibbs;
using doctest::Approx;

namespace {

struct Fixture {
  Potential psi;
  TransferMatrix transfer;
  PerronData perron;
};

Fixture bernoulli_fixture() {
  Potential psi = Potential::locally_constant(Alphabet(2), 1,
                                              {std::log(0.3), std::log(0.7)});
  TransferMatrix t = build_transfer(psi);
  PerronData e = solve_perron(t);
  return {std::move(psi), std::move(t), std::move(e)};
}

Fixture lumpable_fixture() {
  const oracles::Matrix p = {{0.2, 0.3, 0.5}, {0.4, 0.1, 0.5}, {0.3, 0.3, 0.4}};
  Potential psi =
      Potential::locally_constant(Alphabet(3), 2, oracles::log_flatten(p));
  TransferMatrix t = build_transfer(psi);
  PerronData e = solve_perron(t);
  return {std::move(psi), std::move(t), std::move(e)};
}

double renewal_coeff(std::int64_t k) {
  if (k == 0) return 0.0;
  return 2.0 * std::log(static_cast<double>(k + 1) / static_cast<double>(k + 2));
}

}  // namespace

TEST_CASE("gibbs ratios") {
  SUBCASE("Bernoulli ratios are exactly one") {
    const Fixture f = bernoulli_fixture();
    const CylinderMeasure mu = CylinderMeasure::equilibrium(f.transfer, f.perron);
    const TailSpec zeros = TailSpec::zeros(Alphabet(2));
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<int> syms;
      for (int i = 0; i < 8; ++i) syms.push_back(static_cast<int>(rng() % 2));
      const Word x(Alphabet(2), syms);
      for (int n = 1; n <= 8; ++n)
        for (int j = 0; j < n; ++j)
          CHECK(gibbs_ratio(mu, f.psi, 0.0, x, zeros, n, j) ==
                Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("uniform measure with P = log 2") {
    const Potential psi =
        Potential::locally_constant(Alphabet(2), 1, {0.0, 0.0});
    const TransferMatrix t = build_transfer(psi);
    const PerronData e = solve_perron(t);
    const CylinderMeasure mu = CylinderMeasure::equilibrium(t, e);
    const Word x(Alphabet(2), {1, 0, 1, 1});
    CHECK(gibbs_ratio(mu, psi, std::log(2.0), x, TailSpec::zeros(Alphabet(2)),
                      4, 1) == Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("null cylinders are flagged, not underflowed") {
    const Fixture f = bernoulli_fixture();
    std::vector<Word> samples = {Word(Alphabet(2), {0, 0, 0}),
                                 Word(Alphabet(2), {0, 0, 1})};
    const CylinderMeasure emp = CylinderMeasure::empirical(samples, 3);
    const Word x(Alphabet(2), {1, 1, 1});
    CHECK_THROWS_AS(
        gibbs_ratio(emp, f.psi, 0.0, x, TailSpec::zeros(Alphabet(2)), 3, 0),
        NullCylinderError);
  }
}

TEST_CASE("gibbs time scans") {
  const TailSpec zeros2 = TailSpec::zeros(Alphabet(2));

  SUBCASE("Bernoulli: every time within a hair of K = 1") {
    const Fixture f = bernoulli_fixture();
    const CylinderMeasure mu = CylinderMeasure::equilibrium(f.transfer, f.perron);
    const Word x = sample_path(f.transfer, f.perron, 16, 3);
    const GibbsCertificate cert =
        scan_gibbs_times(mu, f.psi, 0.0, 1.0 + 1e-9, x, zeros2, 12);
    REQUIRE(cert.times.size() == 12);
    for (int n = 1; n <= 12; ++n) CHECK(cert.times[n - 1] == n);
    CHECK(check_shift_consistency(mu, f.psi, cert));
  }

  SUBCASE("strict K = 1 on a non-product chain excludes times") {
    const Fixture f = lumpable_fixture();
    const CylinderMeasure mu = CylinderMeasure::equilibrium(f.transfer, f.perron);
    const Word x = sample_path(f.transfer, f.perron, 16, 4);
    const GibbsCertificate cert = scan_gibbs_times(
        mu, f.psi, 0.0, 1.0, x, TailSpec::zeros(Alphabet(3)), 10);
    CHECK(cert.times.empty());
  }

  SUBCASE("corrupted certificates fail the consistency check") {
    const Fixture f = bernoulli_fixture();
    const CylinderMeasure mu = CylinderMeasure::equilibrium(f.transfer, f.perron);
    const Word x = sample_path(f.transfer, f.perron, 16, 3);
    GibbsCertificate cert =
        scan_gibbs_times(mu, f.psi, 0.0, 1.0 + 1e-9, x, zeros2, 12);
    cert.times.erase(cert.times.begin() + 5);  // puncture the maximal list
    CHECK_FALSE(check_shift_consistency(mu, f.psi, cert));
  }

  SUBCASE("minimal constant diagnostic") {
    const Fixture f = lumpable_fixture();
    const CylinderMeasure mu = CylinderMeasure::equilibrium(f.transfer, f.perron);
    const TailSpec zeros3 = TailSpec::zeros(Alphabet(3));
    const Word x = sample_path(f.transfer, f.perron, 12, 5);
    for (int n = 1; n <= 6; ++n) {
      const double k_min = minimal_gibbs_constant(mu, f.psi, 0.0, x, zeros3, n);
      const GibbsCertificate at = scan_gibbs_times(mu, f.psi, 0.0, k_min + 1e-9,
                                                   x, zeros3, n);
      CHECK(std::binary_search(at.times.begin(), at.times.end(), n));
      if (k_min > 1.0 + 1e-9) {
        const GibbsCertificate below = scan_gibbs_times(
            mu, f.psi, 0.0, (k_min - 1.0) * 0.5 + 1.0, x, zeros3, n);
        CHECK_FALSE(std::binary_search(below.times.begin(), below.times.end(), n));
      }
    }
  }

  SUBCASE("truncated renewal point with markers at 2, 5, 9") {
    const Potential g = Potential::renewal(renewal_coeff, 100000);
    const TruncationResult tr = truncate_potential(g, 12);
    const TransferMatrix t = build_transfer(tr.truncated);
    const PerronData e = solve_perron(t);
    const CylinderMeasure nu = CylinderMeasure::conformal(t, e);
    std::vector<int> syms(24, 1);
    syms[2] = syms[5] = syms[9] = 0;
    const Word x(Alphabet(2), syms);
    const GibbsCertificate cert = scan_gibbs_times(
        nu, tr.truncated, e.pressure, std::exp(tr.error) + 1e-9, x, zeros2, 12);
    // marker-anchored times are certified (inclusion, not equality)
    for (int expected : {3, 6, 10})
      CHECK(std::binary_search(cert.times.begin(), cert.times.end(), expected));
    CHECK(check_shift_consistency(nu, tr.truncated, cert));
  }

  SUBCASE("exact discrepancy grants membership under the conformal measure") {
    // the Prop.-style inclusion: xi_n exact => n is a Gibbs time at e^{xi+eps}
    const Fixture f = lumpable_fixture();
    const CylinderMeasure nu = CylinderMeasure::conformal(f.transfer, f.perron);
    const TailSpec zeros3 = TailSpec::zeros(Alphabet(3));
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<int> syms;
      for (int i = 0; i < 9; ++i) syms.push_back(static_cast<int>(rng() % 3));
      const Word x(Alphabet(3), syms);
      for (int n = 2; n <= 5; ++n) {
        const double xi =
            f.psi.cylinder_discrepancy(x.prefix(static_cast<std::size_t>(n)), zeros3);
        const GibbsCertificate cert = scan_gibbs_times(
            nu, f.psi, 0.0, std::exp(xi) + 1e-9, x, zeros3, n);
        CHECK(std::binary_search(cert.times.begin(), cert.times.end(), n));
      }
    }
  }
}

TEST_CASE("weak Gibbs profiles") {
  SUBCASE("depth-1 tables have constant profile 1") {
    const Potential psi = Potential::locally_constant(
        Alphabet(2), 1, {std::log(0.3), std::log(0.7)});
    const WeakGibbsProfile p = weak_gibbs_profile(psi, 12);
    CHECK_FALSE(p.bound_mode);
    for (double c : p.log_constants) CHECK(c == 0.0);
  }

  SUBCASE("geometric profile is bounded and normalizes to zero") {
    const Potential psi = Potential::geometric_series(Alphabet(2), 0.5, {0.0, 1.0});
    const WeakGibbsProfile p = weak_gibbs_profile(psi, 40);
    for (double c : p.log_constants) CHECK(c <= 2.0 + 1e-12);
    CHECK(p.normalized(40) < p.normalized(10));
    CHECK(p.normalized(40) < 0.06);
  }

  SUBCASE("locally constant profiles become constant beyond the depth") {
    std::vector<double> table = {0.2, -0.3, 0.7, -0.1};
    const Potential psi = Potential::locally_constant(Alphabet(2), 2, table);
    const WeakGibbsProfile p = weak_gibbs_profile(psi, 10);
    CHECK_FALSE(p.bound_mode);
    for (int n = 2; n < 10; ++n)
      CHECK(p.log_constants[static_cast<std::size_t>(n)] ==
            Approx(p.log_constants[1]).epsilon(1e-12));
  }

  SUBCASE("renewal profile decreases in normalized form") {
    const Potential g = Potential::renewal(renewal_coeff, 10000);
    const WeakGibbsProfile p = weak_gibbs_profile(g, 30);
    CHECK(p.bound_mode);
    CHECK(p.normalized(30) < p.normalized(10));
    // closed form at a_0 = 0: the n = 1 term takes sup_k |a_k| = |a_1|, so
    // (1/n) log K_n = (4 log((n+1)/2) + 2|a_1|) / n
    CHECK(p.normalized(30) ==
          Approx((4.0 * std::log(15.5) + 4.0 * std::log(1.5)) / 30.0)
              .epsilon(1e-10));
  }

  SUBCASE("pointwise profile along a renewal point") {
    const Potential g = Potential::renewal(renewal_coeff, 10000);
    std::vector<int> syms(12, 1);
    syms[3] = 0;
    syms[9] = 0;
    const GibbsPoint point{Word(Alphabet(2), syms), TailSpec::zeros(Alphabet(2))};
    const WeakGibbsProfile p = weak_gibbs_profile(g, 12, point);
    CHECK(p.log_constants[3] == 0.0);   // n = 4 ends at the marker
    CHECK(p.log_constants[9] == 0.0);   // n = 10 ends at the marker
    CHECK(p.log_constants[11] > 0.0);
  }
}

TEST_CASE("nonlacunarity profiles") {
  GibbsCertificate cert{1.5, 0.0,
                        GibbsPoint{Word(Alphabet(2), {0, 1}),
                                   TailSpec::zeros(Alphabet(2))},
                        0, {}};
  SUBCASE("consecutive integers drift to one") {
    cert.times = {1, 2, 3, 4, 5, 6};
    const auto r = nonlacunarity_profile(cert);
    REQUIRE(r.size() == 5);
    CHECK(r.front() == Approx(2.0));
    CHECK(r.back() == Approx(1.2));
    for (std::size_t i = 0; i + 1 < r.size(); ++i) CHECK(r[i + 1] < r[i]);
  }
  SUBCASE("powers of two stay lacunary") {
    cert.times = {1, 2, 4, 8, 16, 32};
    const auto r = nonlacunarity_profile(cert);
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] == Approx(2.0));
  }
  SUBCASE("fewer than two times gives an empty profile") {
    cert.times = {3};
    CHECK(nonlacunarity_profile(cert).empty());
  }
}

TEST_CASE("growth statistics") {
  SUBCASE("Bernoulli chains step by exactly one") {
    const Fixture f = bernoulli_fixture();
    const CylinderMeasure mu = CylinderMeasure::equilibrium(f.transfer, f.perron);
    std::vector<Word> paths;
    for (int i = 0; i < 10; ++i)
      paths.push_back(sample_path(f.transfer, f.perron, 200,
                                  static_cast<std::uint64_t>(100 + i)));
    const GrowthStats stats = gibbs_time_growth(
        paths, mu, f.psi, 0.0, 1.0 + 1e-9, TailSpec::zeros(Alphabet(2)), 32);
    CHECK(stats.exceptional_paths == 0);
    CHECK(stats.mean_first_time == Approx(1.0));
    CHECK(stats.mean_slope == Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("scanner route equals the generic route") {
    const Fixture f = lumpable_fixture();
    const CylinderMeasure mu = CylinderMeasure::equilibrium(f.transfer, f.perron);
    const TailSpec zeros3 = TailSpec::zeros(Alphabet(3));
    const double log_k = std::log(1.2);
    for (std::uint64_t seed = 40; seed < 46; ++seed) {
      const Word path = sample_path(f.transfer, f.perron, 64, seed);
      const PathScanner scanner(*mu.markov_view(), f.psi, 0.0, path, zeros3);
      for (int a = 0; a + 8 < 60; a += 7) {
        const int fast = scanner.first_gibbs_time(a, 6, log_k, 1e-9);
        // generic route: scan the shifted word directly
        int slow = 0;
        const Word suffix = path.suffix(static_cast<std::size_t>(a));
        for (int n = 1; n <= 6 && slow == 0; ++n) {
          bool ok = true;
          for (int j = 0; j < n && ok; ++j) {
            const GibbsRatio r =
                gibbs_log_ratio(mu, f.psi, 0.0, suffix, zeros3, n, j);
            ok = std::abs(r.log_ratio) + r.radius <= log_k + 1e-9;
          }
          if (ok) slow = n;
        }
        CHECK(fast == slow);
      }
    }
  }

  SUBCASE("points without Gibbs times are reported as exceptional") {
    const Fixture f = lumpable_fixture();
    const CylinderMeasure mu = CylinderMeasure::equilibrium(f.transfer, f.perron);
    std::vector<Word> paths = {sample_path(f.transfer, f.perron, 50, 7)};
    const GrowthStats stats = gibbs_time_growth(
        paths, mu, f.psi, 0.0, 1.0, TailSpec::zeros(Alphabet(3)), 16);
    CHECK(stats.exceptional_paths == 1);
    CHECK(stats.per_path.front().exceptional);
  }
}
