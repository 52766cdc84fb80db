#include "oracles.hpp"

#include <tpslab/spectra.hpp>

#include <gtest/gtest.h>

using namespace tpslab;

namespace {

// (2,2): sorted s is a sumset iff some pairing of {s1..s4} into
// {a0+b0, a0+b1, a1+b0, a1+b1} exists, i.e. iff s1 + s4 = s2 + s3.
bool exhaustive_two_by_two(std::vector<double> s, double tol) {
  std::sort(s.begin(), s.end());
  std::vector<int> idx = {0, 1, 2, 3};
  do {
    const double a0 = 0.0, b0 = s[idx[0]];
    const double b1 = s[idx[1]] - a0, a1 = s[idx[2]] - b0;
    if (std::abs(a1 + b1 - s[idx[3]]) <= tol) return true;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return false;
}

std::vector<double> random_list(Rng& rng, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(rng.normal());
  return v;
}

}  // namespace

TEST(KroneckerSum, MatchesExplicitKroneckerProducts) {
  const auto a = random_hermitian(2, 1), b = random_hermitian(3, 2);
  const ComplexMatrix expected = kron(a.matrix(), ComplexMatrix::Identity(3, 3)) + kron(ComplexMatrix::Identity(2, 2), b.matrix());
  EXPECT_LE(max_abs(kronecker_sum({a, b}).matrix() - expected), 1e-15);
  EXPECT_THROW(kronecker_sum({a}), std::invalid_argument);
}

TEST(KroneckerSum, SpectrumIsCrossSums) {
  Rng rng(3);
  const auto a = random_hermitian(rng, 2), b = random_hermitian(rng, 2), c = random_hermitian(rng, 3);
  auto sums = cross_sums({spectrum_of(eig_decompose(a)), spectrum_of(eig_decompose(b)), spectrum_of(eig_decompose(c))});
  std::sort(sums.begin(), sums.end());
  const auto expected = spectrum_of(eig_decompose(kronecker_sum({a, b, c})));
  for (std::size_t i = 0; i < sums.size(); ++i) EXPECT_NEAR(sums[i], expected[i], 1e-12);
}

TEST(CrossSums, LexicographicOrder) {
  EXPECT_EQ(cross_sums({{0, 10}, {1, 2, 3}}), (std::vector<double>{1, 2, 3, 11, 12, 13}));
}

TEST(Sumset, RoundTripOnRandomLocalSpectra) {
  Rng rng(4);
  for (const auto& shape : {TpsShape({2, 2}), TpsShape({2, 3}), TpsShape({3, 2}), TpsShape({3, 3}), TpsShape({2, 2, 2}), TpsShape({2, 2, 3})}) {
    for (int i = 0; i < 20; ++i) {
      std::vector<std::vector<double>> locals;
      for (int d : shape.dims()) locals.push_back(random_list(rng, d));
      const auto spectrum = cross_sums(locals);
      const auto dec = sumset_decompose(spectrum, shape);
      ASSERT_TRUE(dec.has_value()) << to_string(shape);
      ASSERT_EQ(dec->local_spectra.size(), shape.factors());
      for (std::size_t k = 0; k < shape.factors(); ++k) {
        EXPECT_EQ(dec->local_spectra[k].size(), static_cast<std::size_t>(shape.dim(k)));
        EXPECT_TRUE(std::is_sorted(dec->local_spectra[k].begin(), dec->local_spectra[k].end()));
        if (k > 0) EXPECT_EQ(dec->local_spectra[k].front(), 0.0);
      }
      EXPECT_LE(cross_sum_mismatch(*dec, spectrum), 1e-9);
    }
  }
}

TEST(Sumset, RecoversLocalSpectraUpToOffset) {
  const std::vector<std::vector<double>> locals = {{0.3, 1.7}, {-2.0, 0.5, 0.9}};
  const auto dec = sumset_decompose(cross_sums(locals), TpsShape({2, 3}));
  ASSERT_TRUE(dec.has_value());
  // 2x3 with these gaps has a unique splitting
  EXPECT_NEAR(dec->local_spectra[0][0], -1.7, 1e-12);
  EXPECT_NEAR(dec->local_spectra[0][1], -0.3, 1e-12);
  EXPECT_NEAR(dec->local_spectra[1][1], 2.5, 1e-12);
  EXPECT_NEAR(dec->local_spectra[1][2], 2.9, 1e-12);
}

TEST(Sumset, AgreesWithExhaustiveOracleAtNFour) {
  Rng rng(5);
  int accepted = 0;
  for (int i = 0; i < 400; ++i) {
    std::vector<double> s;
    if (i % 2) {
      s = cross_sums({random_list(rng, 2), random_list(rng, 2)});
    } else {
      s = random_list(rng, 4);
    }
    const bool got = sumset_decompose(s, TpsShape({2, 2})).has_value();
    EXPECT_EQ(got, exhaustive_two_by_two(s, 1e-9 * 8)) << i;
    accepted += got ? 1 : 0;
  }
  EXPECT_EQ(accepted, 200);
}

TEST(Sumset, RejectsGaussianSpectra) {
  Rng rng(6);
  for (const auto& shape : {TpsShape({2, 2}), TpsShape({2, 3}), TpsShape({2, 2, 2})}) {
    for (int i = 0; i < 100; ++i) EXPECT_FALSE(sumset_decompose(random_list(rng, static_cast<int>(shape.total())), shape).has_value());
  }
}

TEST(Sumset, HandlesDegenerateCrossSums) {
  // equally spaced locals collide: {0,1} + {0,1} = {0,1,1,2}
  const auto dec = sumset_decompose({0, 1, 1, 2}, TpsShape({2, 2}));
  ASSERT_TRUE(dec.has_value());
  EXPECT_LE(cross_sum_mismatch(*dec, {0, 1, 1, 2}), 1e-12);
  const auto three = sumset_decompose(cross_sums({{0, 1}, {0, 1}, {0, 1}}), TpsShape({2, 2, 2}));
  EXPECT_TRUE(three.has_value());
}

TEST(Sumset, SizeMismatchThrows) {
  EXPECT_THROW(sumset_decompose({1, 2, 3}, TpsShape({2, 2})), DimensionError);
}

TEST(InteractionFree, KroneckerSumInNativeTps) {
  const TpsShape shape({2, 3});
  const auto h = kronecker_sum({random_hermitian(2, 1), random_hermitian(3, 2)});
  EXPECT_TRUE(is_interaction_free(h, identity_tps(shape)).interaction_free);
}

TEST(InteractionFree, CouplingDetected) {
  const TpsShape shape({2, 2});
  const ComplexMatrix xx = oracle::pauli_word("XX");
  const auto h = HermitianOperator(oracle::pauli_word("ZI") + 0.3 * xx);
  const auto check = is_interaction_free(h, identity_tps(shape));
  EXPECT_FALSE(check.interaction_free);
  EXPECT_NEAR(check.residual, 0.3 * xx.norm(), 1e-12);
}

TEST(InteractionFree, ConsistentWithDecomposition) {
  for (const auto& shape : {TpsShape({2, 2}), TpsShape({2, 3}), TpsShape({2, 2, 2})}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      // hide the Kronecker structure behind a random unitary
      std::vector<HermitianOperator> locals;
      for (int d : shape.dims()) locals.push_back(random_hermitian(d, seed * 10 + static_cast<std::uint64_t>(d) + locals.size()));
      const ComplexMatrix u = random_unitary(shape.total(), seed + 77);
      ComplexMatrix hm = u * kronecker_sum(locals).matrix() * u.adjoint();
      hm = (0.5 * (hm + hm.adjoint())).eval();
      const HermitianOperator h(hm);
      const auto eig = eig_decompose(h);
      const auto dec = sumset_decompose(spectrum_of(eig), shape);
      ASSERT_TRUE(dec.has_value());
      const Tps tps = tps_from_decomposition(eig, *dec, shape);
      EXPECT_TRUE(is_interaction_free(h, tps).interaction_free);
      // in that TPS, H is the Kronecker sum of the diagonal local spectra
      std::vector<HermitianOperator> diag;
      for (const auto& l : dec->local_spectra) diag.push_back(diagonal_operator(l));
      const ComplexMatrix pulled = tps.matrix().adjoint() * hm * tps.matrix();
      EXPECT_LE(max_abs(pulled - kronecker_sum(diag).matrix()), 1e-9);

      const auto generic = random_hermitian(shape.total(), seed + 200);
      EXPECT_FALSE(sumset_decompose(spectrum_of(eig_decompose(generic)), shape).has_value());
    }
  }
}
