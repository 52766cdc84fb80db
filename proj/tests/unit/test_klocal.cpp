#include "oracles.hpp"

#include <tpslab/klocal.hpp>

#include <gtest/gtest.h>

using namespace tpslab;

TEST(PauliBasis, WordsMatchExplicitKroneckerProducts) {
  const PauliBasis basis(3);
  ASSERT_EQ(basis.size(), 64u);
  for (std::size_t w = 0; w < basis.size(); ++w) {
    EXPECT_EQ(basis.matrix(w), oracle::pauli_word(basis.name(w))) << basis.name(w);
    EXPECT_EQ(basis.index_of(basis.name(w)), w);
  }
  EXPECT_EQ(basis.name(basis.index_of("XIZ")), "XIZ");
  EXPECT_EQ(basis.weight(basis.index_of("XIZ")), 2);
  EXPECT_THROW(basis.index_of("XQ"), std::invalid_argument);
  EXPECT_THROW(PauliBasis(7), DimensionError);
}

TEST(PauliBasis, CoefficientsMatchTraceFormula) {
  const PauliBasis basis(2);
  const auto h = random_hermitian(4, 1);
  const auto c = basis.coefficients(h.matrix());
  for (std::size_t w = 0; w < basis.size(); ++w) {
    const Complex tr = (oracle::pauli_word(basis.name(w)) * h.matrix()).trace() / 4.0;
    EXPECT_NEAR(c[w], tr.real(), 1e-14);
    EXPECT_NEAR(tr.imag(), 0.0, 1e-14);
  }
}

TEST(PauliDecomposition, ReconstructionAndParseval) {
  Rng rng(2);
  const TpsShape shape({2, 2, 2});
  const auto h = random_hermitian(rng, 8);
  for (int i = 0; i < 20; ++i) {
    const Tps tps(shape, random_unitary(rng, 8));
    const auto dec = pauli_coefficients(h, tps);
    EXPECT_LE(max_abs(reconstruct(dec) - pulled_back_operator(h, tps)), 1e-9);
    double sum = 0.0;
    for (double c : dec.coefficients) sum += c * c;
    EXPECT_NEAR(sum, (h.matrix() * h.matrix()).trace().real() / 8.0, 1e-9);
  }
}

TEST(PauliDecomposition, TermsOfKnownOperator) {
  const HermitianOperator h(2.0 * oracle::pauli_word("ZZ") - 0.5 * oracle::pauli_word("XI"));
  const auto terms = pauli_coefficients(h, identity_tps(TpsShape({2, 2}))).terms(1e-12);
  ASSERT_EQ(terms.size(), 2u);
  EXPECT_NEAR(terms.at("ZZ"), 2.0, 1e-15);
  EXPECT_NEAR(terms.at("XI"), -0.5, 1e-15);
}

TEST(PauliDecomposition, RequiresQubits) {
  EXPECT_THROW(pauli_coefficients(random_hermitian(6, 1), identity_tps(TpsShape({2, 3}))), DimensionError);
}

TEST(NonlocalityCost, ZeroForNativeKLocal) {
  Rng rng(3);
  const auto h = random_klocal_hamiltonian(rng, 3, 2);
  const TpsShape shape({2, 2, 2});
  EXPECT_LE(nonlocality_cost(h, identity_tps(shape), 2), 1e-28);
  EXPECT_GT(nonlocality_cost(h, Tps(shape, random_unitary(rng, 8)), 2), 1e-3);
  const auto terms = pauli_coefficients(h, identity_tps(shape)).terms(1e-12);
  for (const auto& [name, c] : terms) EXPECT_LE(std::count_if(name.begin(), name.end(), [](char x) { return x != 'I'; }), 2);
  EXPECT_EQ(terms.count("III"), 0u);
}

TEST(NonlocalityCost, InvariantUnderStabilizer) {
  Rng rng(4);
  const TpsShape shape({2, 2, 2});
  const auto h = random_hermitian(rng, 8);
  const Tps tps(shape, random_unitary(rng, 8));
  const double base = nonlocality_cost(h, tps, 2);
  for (const auto& sigma : dimension_preserving_permutations(shape)) {
    const Tps moved(shape, tps.matrix() * factor_permutation(shape, sigma) * random_local_unitary(rng, shape));
    EXPECT_NEAR(nonlocality_cost(h, moved, 2), base, 1e-10);
  }
}

TEST(Search, RecoversScrambledInstance) {
  const auto inst = scrambled_klocal(2, 3, 2);
  KLocalSearchOptions opt;
  opt.seeds = {0, 1, 2, 3, 4};
  const auto res = search_klocal_tps(inst.scrambled, 2, TpsShape({2, 2, 2}), opt);
  EXPECT_LT(res.cost, 1e-6);
  EXPECT_NEAR(res.cost, nonlocality_cost(inst.scrambled, res.best_tps, 2), 1e-12);
  EXPECT_LE(res.max_parseval_defect, 1e-9);
  EXPECT_EQ(res.restarts.size(), 5u);
}

TEST(Search, TraceNeverIncreasesAndIsDeterministic) {
  const auto inst = scrambled_klocal(3, 3, 2);
  KLocalSearchOptions opt;
  opt.seeds = {5, 6};
  opt.iterations = 400;
  const auto a = search_klocal_tps(inst.scrambled, 2, TpsShape({2, 2, 2}), opt);
  const auto b = search_klocal_tps(inst.scrambled, 2, TpsShape({2, 2, 2}), opt);
  for (const auto& r : a.restarts) {
    ASSERT_EQ(r.trace.size(), 401u);
    for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]);
  }
  EXPECT_EQ(a.cost, b.cost);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.best_tps.matrix(), b.best_tps.matrix());
}

TEST(Search, TiesGoToLowestSeed) {
  // with k = n no word is penalized, so every restart has cost exactly 0
  KLocalSearchOptions opt;
  opt.seeds = {9, 4, 7};
  opt.iterations = 3;
  const auto res = search_klocal_tps(random_hermitian(8, 1), 3, TpsShape({2, 2, 2}), opt);
  EXPECT_EQ(res.cost, 0.0);
  EXPECT_EQ(res.seed, 4u);
}

TEST(Search, IdentityStartKeepsNativeTps) {
  const HermitianOperator h(oracle::pauli_word("ZII") + oracle::pauli_word("IXI"));
  KLocalSearchOptions opt;
  opt.seeds = {9, 4};
  opt.iterations = 5;
  const auto res = search_klocal_tps(h, 2, TpsShape({2, 2, 2}), opt);
  EXPECT_EQ(res.cost, 0.0);
  EXPECT_EQ(res.best_tps.matrix(), ComplexMatrix::Identity(8, 8));
}

TEST(Search, RejectsLargeOrNonQubitShapes) {
  EXPECT_THROW(search_klocal_tps(random_hermitian(6, 1), 2, TpsShape({2, 3}), {}), DimensionError);
  EXPECT_THROW(search_klocal_tps(random_hermitian(32, 1), 2, TpsShape({2, 2, 2, 2, 2}), {}), DimensionError);
}
