#include "oracles.hpp"

#include <tpslab/construction.hpp>
#include <tpslab/spectra.hpp>

#include <gtest/gtest.h>

using namespace tpslab;

namespace {

struct Fixture {
  HermitianOperator h;
  EigenSystem eig;
  StateVector psi;
};

Fixture make(Eigen::Index n, std::uint64_t seed) {
  auto h = random_hermitian(n, seed);
  auto eig = eig_decompose(h);
  return {std::move(h), std::move(eig), random_state(n, seed + 10000)};
}

}  // namespace

TEST(CanonicalTps, PullBackHasModuliInAscendingSlots) {
  const auto f = make(6, 1);
  const Tps tau = canonical_tps(f.eig, f.psi, TpsShape({2, 3}));
  const ComplexVector a = pull_back(tau, f.psi);
  const ComplexVector c = f.eig.eigenvectors.adjoint() * f.psi.amplitudes();
  for (Eigen::Index j = 0; j < 6; ++j) {
    EXPECT_NEAR(a(j).real(), std::abs(c(j)), 1e-12);
    EXPECT_NEAR(a(j).imag(), 0.0, 1e-12);
  }
}

TEST(CanonicalTps, ShapeMismatchAndConditionFailure) {
  const auto f = make(4, 2);
  EXPECT_THROW(canonical_tps(f.eig, f.psi, TpsShape({2, 3})), DimensionError);
  EXPECT_THROW(canonical_tps(f.eig, StateVector(f.eig.vector(0)), TpsShape({2, 2})), ConditionError);
}

// Comoving entropies equal the Schmidt entropy of the fixed vector sum_j |c_j| e_j.
TEST(TimeDrift, ComovingEntropiesAreFrozenAtOracleValue) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = make(4, seed);
    const TpsShape shape({2, 2});
    const ComplexVector moduli = (f.eig.eigenvectors.adjoint() * f.psi.amplitudes()).cwiseAbs().cast<Complex>();
    const double expected = oracle::schmidt_entropy(moduli, 2, 2);
    const auto rep = time_drift_experiment(f.eig, f.psi, shape, {0.0, 0.4, 1.1, 2.9, 5.0}, {});
    for (const auto& row : rep.entropies_comoving) {
      EXPECT_NEAR(row[0], expected, 1e-9);
      EXPECT_NEAR(row[1], expected, 1e-9);
    }
    EXPECT_LT(spread(rep.entropies_comoving), 1e-9);
  }
}

TEST(TimeDrift, FixedEntropiesDriftAndTpsMoves) {
  const auto f = make(4, 3);
  std::vector<double> times;
  for (int i = 0; i < 20; ++i) times.push_back(0.25 * i);
  const auto rep = time_drift_experiment(f.eig, f.psi, TpsShape({2, 2}), times, {});
  EXPECT_GT(spread(rep.entropies_fixed), 1e-3);
  EXPECT_GE(inequivalent_pair_fraction(rep), 0.9);
  for (double r : rep.covariance_residuals) EXPECT_LT(r, 1e-9);
  ASSERT_TRUE(rep.locking.has_value());
  EXPECT_TRUE(rep.locking->moduli_match);
}

TEST(TimeDrift, KroneckerSumHamiltonianIsStatic) {
  const TpsShape shape({2, 2});
  const auto h = kronecker_sum({random_hermitian(2, 1), random_hermitian(2, 2)});
  const auto eig = eig_decompose(h);
  const auto psi = random_state(4, 3);
  const auto rep = time_drift_experiment(eig, psi, shape, {0.0, 0.7, 1.9, 3.3, 5.0}, {});
  EXPECT_LT(spread(rep.entropies_fixed), 1e-9);
  for (const auto& p : rep.tps_equivalence) EXPECT_TRUE(p.equivalent) << p.first << "," << p.second;
}

TEST(TimeDrift, EmptyGridRejected) {
  const auto f = make(4, 4);
  EXPECT_THROW(time_drift_experiment(f.eig, f.psi, TpsShape({2, 2}), {}, {}), std::invalid_argument);
}

TEST(Profile, DeduplicatesAndSkipsZeroProbes) {
  const auto f = make(4, 5);
  const Tps tau = canonical_tps(f.eig, f.psi, TpsShape({2, 2}));
  std::vector<LabelPolynomial> probes = {LabelPolynomial::monomial(1), LabelPolynomial(), LabelPolynomial::monomial(1),
                                         LabelPolynomial::monomial(0)};
  const auto profile = compute_profile(tau, f.eig, f.psi, probes);
  EXPECT_EQ(profile.probes.size(), 2u);
  EXPECT_EQ(profile.notices.size(), 1u);
  for (const auto& row : profile.table)
    for (double s : row) {
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, std::log(2.0) + 1e-12);
    }
}

TEST(Profile, DefaultProbeSet) {
  const auto probes = default_probes(4, 1);
  ASSERT_EQ(probes.size(), 24u);
  EXPECT_EQ(probes[3], LabelPolynomial::monomial(3));
  EXPECT_EQ(probes[10].degree(), 3u);
  EXPECT_EQ(default_probes(4, 1), default_probes(4, 1));
}

TEST(Profile, TauSatisfiesItsOwnProfile) {
  for (const auto& shape : {TpsShape({2, 2}), TpsShape({2, 3}), TpsShape({2, 2, 2})}) {
    const auto f = make(shape.total(), 6);
    const Tps tau = canonical_tps(f.eig, f.psi, shape);
    const auto profile = compute_profile(tau, f.eig, f.psi, default_probes(shape.total(), 6));
    EXPECT_TRUE(verify_profile(tau, f.eig, f.psi, profile, 1e-10).passed);
  }
}

TEST(Profile, InjectedCellPerturbationFails) {
  const auto f = make(4, 7);
  const Tps tau = canonical_tps(f.eig, f.psi, TpsShape({2, 2}));
  auto profile = compute_profile(tau, f.eig, f.psi, default_probes(4, 7));
  profile.table[2][1] += 0.1;
  const auto check = verify_profile(tau, f.eig, f.psi, profile, 1e-10);
  EXPECT_FALSE(check.passed);
  EXPECT_NEAR(check.max_deviation, 0.1, 1e-12);
  EXPECT_EQ(check.worst_probe, 2u);
  EXPECT_EQ(check.worst_subsystem, 1u);
}

TEST(Profile, DiscriminatingProbeSeparatesInequivalentTps) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = make(4, seed + 20);
    const TpsShape shape({2, 2});
    const Tps tau = canonical_tps(f.eig, f.psi, shape);
    const Tps other(shape, random_unitary(4, seed + 99));
    const auto d = find_discriminating_state(tau, other, 1000, seed);
    ASSERT_TRUE(d.found);
    const auto probe = solve_label(f.eig, f.psi, d.state);
    const auto profile = compute_profile(tau, f.eig, f.psi, {probe});
    EXPECT_GE(verify_profile(other, f.eig, f.psi, profile, 1e-10).max_deviation, 1e-3);
  }
}

// Randomized search for a TPS that reproduces tau's profile without being
// equivalent to it. Candidates mix Haar draws, perturbations of tau at
// several scales, diagonal rephasings and genuine local/permutation moves.
TEST(Profile, UniquenessAtNFourOverThousandCandidates) {
  const auto f = make(4, 30);
  const TpsShape shape({2, 2});
  const Tps tau = canonical_tps(f.eig, f.psi, shape);
  auto probes = default_probes(4, 30);
  const Tps cnot_frame(shape, tau.matrix() * oracle::cnot());
  probes.push_back(solve_label(f.eig, f.psi, find_discriminating_state(tau, cnot_frame).state));
  const auto profile = compute_profile(tau, f.eig, f.psi, probes);

  Rng rng(31);
  int passing = 0, counterexamples = 0, candidates = 0;
  for (int i = 0; i < 1200; ++i, ++candidates) {
    ComplexMatrix u;
    switch (i % 4) {
      case 0: u = random_unitary(rng, 4); break;
      case 1: {
        const double scale = std::pow(10.0, -1.0 - 5.0 * rng.uniform());
        u = tau.matrix() * exp_anti_hermitian(Complex(0, scale) * random_hermitian(rng, 4).matrix());
        break;
      }
      case 2: {
        ComplexMatrix d = ComplexMatrix::Zero(4, 4);
        for (int j = 0; j < 4; ++j) d(j, j) = std::polar(1.0, 2 * std::numbers::pi * rng.uniform());
        u = tau.matrix() * d;
        break;
      }
      default:
        u = tau.matrix() * factor_permutation(shape, rng.uniform() < 0.5 ? std::vector<int>{0, 1} : std::vector<int>{1, 0}) *
            random_local_unitary(rng, shape);
    }
    const Tps cand(shape, u);
    if (!verify_profile(cand, f.eig, f.psi, profile, 1e-8).passed) continue;
    ++passing;
    if (!are_equivalent(cand, tau).equivalent) ++counterexamples;
  }
  EXPECT_GE(candidates, 1000);
  EXPECT_GE(passing, 300);  // every local/permutation move passes
  EXPECT_EQ(counterexamples, 0);
}

TEST(Locking, EvolvedInputIsTransportedRandomInputIsInequivalent) {
  const auto f = make(4, 40);
  const TpsShape shape({2, 2});
  const auto probes = default_probes(4, 40);
  const auto same = locking_experiment(f.eig, f.psi, evolve(f.eig, f.psi, 1.3), shape, probes);
  EXPECT_TRUE(are_equivalent(same.tps_second, transform(same.tps_first, propagator(f.eig, 1.3))).equivalent);
  EXPECT_TRUE(same.moduli_match);
  EXPECT_LT(same.pinned_deviation, 1e-9);
  int inequivalent = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto other = locking_experiment(f.eig, f.psi, random_state(4, 500 + s), shape, probes);
    inequivalent += other.verdict.equivalent ? 0 : 1;
  }
  EXPECT_GE(inequivalent, 18);
}
