#include "oracles.hpp"

#include <tpslab/linalg.hpp>

#include <gtest/gtest.h>

using namespace tpslab;

TEST(StateVector, NormalizesOnConstruction) {
  ComplexVector v(3);
  v << 3.0, Complex(0, 4), 0.0;
  StateVector psi(v);
  EXPECT_NEAR(psi.amplitudes().norm(), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(psi[1]), 0.8, 1e-15);
}

TEST(StateVector, RejectsZeroAndEmpty) {
  EXPECT_THROW(StateVector(ComplexVector::Zero(4)), std::invalid_argument);
  EXPECT_THROW(StateVector(ComplexVector(0)), DimensionError);
  EXPECT_THROW(StateVector::basis(2, 2), DimensionError);
}

TEST(HermitianOperator, RejectsNonHermitianWithDefect) {
  ComplexMatrix m(2, 2);
  m << 1.0, 2.0, 2.5, 0.0;
  try {
    HermitianOperator h(m);
    FAIL() << "accepted a non-Hermitian matrix";
  } catch (const NotHermitianError& e) {
    EXPECT_NEAR(e.defect(), 0.5, 1e-12);
  }
}

TEST(HermitianOperator, RejectsNonSquareAndNonFinite) {
  EXPECT_THROW(HermitianOperator(ComplexMatrix::Zero(2, 3)), DimensionError);
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(0, 0) = std::nan("");
  EXPECT_THROW(HermitianOperator{m}, std::invalid_argument);
}

TEST(EigDecompose, PauliXHasEigenvaluesMinusOnePlusOne) {
  const auto eig = eig_decompose(HermitianOperator(oracle::pauli('X')));
  EXPECT_NEAR(eig.eigenvalues(0), -1.0, 1e-14);
  EXPECT_NEAR(eig.eigenvalues(1), 1.0, 1e-14);
  EXPECT_EQ(eig.degeneracy_groups.size(), 2u);
}

TEST(EigDecompose, PhaseConventionLargestComponentRealPositive) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto eig = eig_decompose(random_hermitian(6, seed));
    for (Eigen::Index j = 0; j < eig.dim(); ++j) {
      const ComplexVector v = eig.vector(j);
      Eigen::Index arg = 0;
      v.cwiseAbs().maxCoeff(&arg);
      EXPECT_NEAR(v(arg).imag(), 0.0, 1e-14);
      EXPECT_GT(v(arg).real(), 0.0);
    }
  }
}

TEST(EigDecompose, PhaseTieGoesToLowestIndex) {
  // both eigenvectors have equal-modulus components
  ComplexMatrix h(2, 2);
  h << 0.0, Complex(0, -1), Complex(0, 1), 0.0;  // Pauli Y
  const auto eig = eig_decompose(HermitianOperator(h));
  for (Eigen::Index j = 0; j < 2; ++j) {
    EXPECT_NEAR(eig.eigenvectors(0, j).imag(), 0.0, 1e-14);
    EXPECT_GT(eig.eigenvectors(0, j).real(), 0.0);
  }
}

TEST(EigDecompose, RoundTripAndOrthonormality) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto h = random_hermitian(8, seed);
    const auto eig = eig_decompose(h);
    const ComplexMatrix& v = eig.eigenvectors;
    EXPECT_LE(unitarity_defect(v), 1e-9);
    const ComplexMatrix back = v * eig.eigenvalues.cast<Complex>().asDiagonal() * v.adjoint();
    EXPECT_LE(max_abs(back - h.matrix()), 1e-8 * max_abs(h.matrix()));
    for (Eigen::Index j = 1; j < eig.dim(); ++j) EXPECT_LE(eig.eigenvalues(j - 1), eig.eigenvalues(j));
  }
}

TEST(EigDecompose, DegeneracyGroups) {
  Eigen::Vector4d d(2.0, 1.0, 1.0 + 1e-12, 3.0);
  const auto eig = eig_decompose(HermitianOperator(d.cast<Complex>().asDiagonal().toDenseMatrix()));
  ASSERT_EQ(eig.degeneracy_groups.size(), 3u);
  EXPECT_EQ(eig.degeneracy_groups[0].size(), 2u);
  const auto id = eig_decompose(HermitianOperator(ComplexMatrix::Identity(4, 4)));
  EXPECT_EQ(id.degeneracy_groups.size(), 1u);
}

TEST(Propagator, MatchesScalingAndSquaringExponential) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto h = random_hermitian(6, seed);
    const auto eig = eig_decompose(h);
    for (double t : {0.0, 0.3, 1.7, 5.0}) {
      EXPECT_LE(max_abs(propagator(eig, t) - oracle::expm_minus_i(h.matrix(), t)), 1e-10);
    }
  }
}

TEST(ExpAntiHermitian, MatchesOracle) {
  const auto h = random_hermitian(4, 3);
  const ComplexMatrix a = (Complex(0, -0.8) * h.matrix()).eval();
  EXPECT_LE(max_abs(exp_anti_hermitian(a) - oracle::expm_minus_i(h.matrix(), 0.8)), 1e-10);
}

TEST(Evolve, NormGroupLawAndWeightInvariance) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto eig = eig_decompose(random_hermitian(5, seed));
    const auto psi = random_state(5, seed + 100);
    const auto w0 = projection_weights(eig, psi);
    for (double t1 : {0.1, 1.3, 4.0}) {
      const auto a = evolve(eig, psi, t1);
      EXPECT_NEAR(a.amplitudes().norm(), 1.0, 1e-12);
      for (double t2 : {0.2, 2.5}) {
        const auto b = evolve(eig, a, t2);
        const auto c = evolve(eig, psi, t1 + t2);
        EXPECT_LE((b.amplitudes() - c.amplitudes()).cwiseAbs().maxCoeff(), 1e-9);
      }
      const auto w = projection_weights(eig, a);
      for (std::size_t g = 0; g < w.size(); ++g) EXPECT_NEAR(w[g], w0[g], 1e-10);
    }
  }
}

TEST(Kron, MatchesElementFormula) {
  const ComplexMatrix a = random_unitary(2, 1), b = random_unitary(3, 2);
  const ComplexMatrix k = kron(a, b);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 6; ++j) EXPECT_EQ(k(i, j), a(i / 3, j / 3) * b(i % 3, j % 3));
}

TEST(Random, SameSeedSameOutput) {
  EXPECT_EQ(random_unitary(4, 9), random_unitary(4, 9));
  EXPECT_EQ(random_hermitian(4, 9).matrix(), random_hermitian(4, 9).matrix());
  EXPECT_EQ(random_state(4, 9).amplitudes(), random_state(4, 9).amplitudes());
  EXPECT_NE(random_state(4, 9).amplitudes(), random_state(4, 10).amplitudes());
}

TEST(Random, UnitaryAndHermitian) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_LE(unitarity_defect(random_unitary(7, seed)), 1e-12);
    EXPECT_EQ(random_hermitian(7, seed).hermiticity_defect(), 0.0);
  }
}

// Haar / sphere moments: E|U_00|^2 = E|psi_0|^2 = 1/N, E psi_0 = 0.
TEST(Random, MonteCarloMoments) {
  const int samples = 10000;
  const Eigen::Index n = 4;
  double u2 = 0.0, p2 = 0.0;
  Complex p1 = 0.0;
  for (int s = 0; s < samples; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    u2 += std::norm(random_unitary(rng, n)(0, 0));
    const auto psi = random_state(rng, n);
    p2 += std::norm(psi[0]);
    p1 += psi[0];
  }
  // standard error of |x|^2 with mean 1/4 is about 0.0019 at 1e4 samples
  EXPECT_NEAR(u2 / samples, 0.25, 0.01);
  EXPECT_NEAR(p2 / samples, 0.25, 0.01);
  EXPECT_NEAR(std::abs(p1 / static_cast<double>(samples)), 0.0, 0.02);
}

// E U_00 = 0 under the Haar measure.
TEST(Random, HaarDiagonalUnbiased) {
  Complex mean = 0.0;
  const int samples = 10000;
  for (int s = 0; s < samples; ++s) mean += random_unitary(3, static_cast<std::uint64_t>(s))(0, 0);
  EXPECT_LT(std::abs(mean / static_cast<double>(samples)), 0.02);
}

TEST(Random, GueSpectrumScale) {
  double lo = 0.0, hi = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto eig = eig_decompose(random_hermitian(32, seed));
    lo += eig.eigenvalues(0);
    hi += eig.eigenvalues(31);
  }
  EXPECT_NEAR(lo / 50, -2.0, 0.25);
  EXPECT_NEAR(hi / 50, 2.0, 0.25);
}
