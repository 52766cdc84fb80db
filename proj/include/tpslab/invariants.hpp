#pragma once

// The invariant suite run by `tpslab check`: every module's properties
// evaluated on seeded instances, one summary row per invariant.

#include "construction.hpp"
#include "experiments.hpp"
#include "io.hpp"
#include "klocal.hpp"
#include "labeling.hpp"
#include "linalg.hpp"
#include "spectra.hpp"
#include "tps.hpp"

#include <chrono>
#include <functional>
#include <string>
#include <vector>

namespace tpslab {

struct InvariantResult {
  std::string module;
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool upper = true;  // value <= bound when true, value >= bound otherwise
  bool passed = false;
  double seconds = 0.0;
  std::string error;  // set when the check threw
};

struct CheckOptions {
  std::uint64_t seed = 0;
  std::size_t instances = 5;
  bool inject_fault = false;  // perturb a canonical T by 1e-3 before the unitarity check
};

namespace detail {

struct Instance {
  HermitianOperator h;
  EigenSystem eig;
  StateVector psi;
  TpsShape shape;
};

inline Instance seeded_instance(const TpsShape& shape, std::uint64_t seed) {
  auto g = generate_random_h(shape.total(), seed);
  EigenSystem eig = eig_decompose(g.hamiltonian);
  return {std::move(g.hamiltonian), std::move(eig), std::move(g.state), shape};
}

inline double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace detail

inline std::vector<InvariantResult> check(const CheckOptions& opt = {}) {
  using detail::Instance;
  std::vector<InvariantResult> results;
  auto record = [&](const std::string& module, const std::string& name, double bound, bool upper,
                    const std::function<double()>& measure) {
    InvariantResult r{module, name, 0.0, bound, upper, false, 0.0, {}};
    const auto start = std::chrono::steady_clock::now();
    try {
      r.value = measure();
      r.passed = upper ? r.value <= bound : r.value >= bound;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  };

  const std::vector<TpsShape> shapes = {TpsShape({2, 2}), TpsShape({2, 3}), TpsShape({2, 2, 2})};
  std::vector<Instance> instances;
  for (const auto& shape : shapes)
    for (std::size_t i = 0; i < opt.instances; ++i)
      instances.push_back(detail::seeded_instance(shape, opt.seed * 1000 + i));
  const std::vector<double> times = linspace(0.0, 5.0, 11);

  // linalg
  record("linalg", "state norm within 1e-12 of 1", 1e-12, true, [&] {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      auto psi = random_state(8, opt.seed + static_cast<std::uint64_t>(i));
      worst = std::max(worst, std::abs(psi.amplitudes().norm() - 1.0));
    }
    return worst;
  });
  record("linalg", "hermiticity defect of generated H", 1e-10, true, [&] {
    double worst = 0.0;
    for (const auto& in : instances) worst = std::max(worst, in.h.hermiticity_defect());
    return worst;
  });
  record("linalg", "eigenvectors orthonormal (V^dag V = I)", 1e-9, true, [&] {
    double worst = 0.0;
    for (const auto& in : instances) worst = std::max(worst, unitarity_defect(in.eig.eigenvectors));
    return worst;
  });
  record("linalg", "eigenvalues sorted ascending (violations)", 0.0, true, [&] {
    double bad = 0.0;
    for (const auto& in : instances)
      for (Eigen::Index j = 1; j < in.eig.dim(); ++j)
        bad += in.eig.eigenvalues(j) < in.eig.eigenvalues(j - 1) ? 1.0 : 0.0;
    return bad;
  });
  record("linalg", "eigendecomposition round trip / max|H|", 1e-8, true, [&] {
    double worst = 0.0;
    for (const auto& in : instances) {
      const ComplexMatrix v = in.eig.eigenvectors;
      const ComplexMatrix back = v * in.eig.eigenvalues.cast<Complex>().asDiagonal() * v.adjoint();
      worst = std::max(worst, max_abs(back - in.h.matrix()) / max_abs(in.h.matrix()));
    }
    return worst;
  });
  record("linalg", "evolution preserves the norm", 1e-12, true, [&] {
    double worst = 0.0;
    for (const auto& in : instances)
      for (double t : times) worst = std::max(worst, std::abs(evolve(in.eig, in.psi, t).amplitudes().norm() - 1.0));
    return worst;
  });
  record("linalg", "evolution group law", 1e-9, true, [&] {
    double worst = 0.0;
    for (const auto& in : instances) {
      const auto a = evolve(in.eig, evolve(in.eig, in.psi, 0.7), 1.9);
      const auto b = evolve(in.eig, in.psi, 2.6);
      worst = std::max(worst, (a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff());
    }
    return worst;
  });
  record("linalg", "projection weights constant in time", 1e-10, true, [&] {
    double worst = 0.0;
    for (const auto& in : instances) {
      const auto w0 = projection_weights(in.eig, in.psi);
      for (double t : times) worst = std::max(worst, detail::max_diff(w0, projection_weights(in.eig, evolve(in.eig, in.psi, t))));
    }
    return worst;
  });

  // tps
  record("tps", "canonical T unitary (T^dag T = I)", Tps::kUnitarityTolerance, true, [&] {
    double worst = 0.0;
    for (const auto& in : instances) {
      ComplexMatrix t = canonical_basis(in.eig, in.psi).vectors;
      if (opt.inject_fault) t(0, 0) += 1e-3;
      worst = std::max(worst, unitarity_defect(t));
    }
    return worst;
  });
  record("tps", "entropy above ln d_k (excess)", 1e-12, true, [&] {
    double worst = 0.0;
    for (const auto& in : instances) {
      const Tps tps(in.shape, random_unitary(in.shape.total(), opt.seed + 17));
      for (std::size_t k = 0; k < in.shape.factors(); ++k) {
        const double s = entropy(tps, in.psi, k);
        worst = std::max({worst, s - std::log(in.shape.dim(k)), -s});
      }
    }
    return worst;
  });
  record("tps", "entropies invariant under local unitaries", 1e-10, true, [&] {
    double worst = 0.0;
    Rng rng(opt.seed, 0x10C);
    for (const auto& in : instances) {
      const Tps tps = canonical_tps(in.eig, in.psi, in.shape);
      const Tps moved(in.shape, tps.matrix() * random_local_unitary(rng, in.shape));
      worst = std::max(worst, detail::max_diff(entropies(tps, in.psi), entropies(moved, in.psi)));
    }
    return worst;
  });
  record("tps", "equivalence relation (reflexive, symmetric, transitive) violations", 0.0, true, [&] {
    double bad = 0.0;
    Rng rng(opt.seed, 0xE0);
    for (const auto& in : instances) {
      const Tps a = canonical_tps(in.eig, in.psi, in.shape);
      const Tps b(in.shape, a.matrix() * random_local_unitary(rng, in.shape));
      const auto perms = dimension_preserving_permutations(in.shape);
      const Tps c(in.shape, b.matrix() * factor_permutation(in.shape, perms.back()) *
                                random_local_unitary(rng, in.shape));
      const Tps r(in.shape, random_unitary(rng, in.shape.total()));
      bad += are_equivalent(a, a).equivalent ? 0 : 1;
      bad += are_equivalent(a, b).equivalent && are_equivalent(b, a).equivalent ? 0 : 1;
      bad += are_equivalent(b, c).equivalent && are_equivalent(a, c).equivalent ? 0 : 1;
      bad += are_equivalent(a, r).equivalent == are_equivalent(r, a).equivalent ? 0 : 1;
    }
    return bad;
  });
  record("tps", "inequivalent pairs at N=4,6,8 without a discriminating state", 0.0, true, [&] {
    double misses = 0.0;
    for (const auto& shape : {TpsShape({2, 2}), TpsShape({2, 3}), TpsShape({2, 2, 2})}) {
      for (std::uint64_t i = 0; i < 3; ++i) {
        const Tps a(shape, random_unitary(shape.total(), opt.seed * 100 + 2 * i));
        const Tps b(shape, random_unitary(shape.total(), opt.seed * 100 + 2 * i + 1));
        if (are_equivalent(a, b).equivalent) continue;
        const auto d = find_discriminating_state(a, b, 1000, opt.seed + i);
        misses += d.found ? 0 : 1;
      }
    }
    return misses;
  });
  record("tps", "stab_h_dim mismatches (nondegenerate N, scalar N^2)", 0.0, true, [&] {
    double bad = 0.0;
    for (const auto& in : instances) {
      const auto n = in.eig.dim();
      bad += stab_h_dim(in.eig) == n ? 0 : 1;
      const auto scalar = eig_decompose(HermitianOperator(ComplexMatrix::Identity(n, n)));
      bad += stab_h_dim(scalar) == n * n ? 0 : 1;
    }
    return bad;
  });

  // labeling
  record("labeling", "linearity of v", 1e-10, true, [&] {
    double worst = 0.0;
    Rng rng(opt.seed, 0x11);
    for (const auto& in : instances) {
      const auto deg = static_cast<std::size_t>(in.eig.dim() - 1);
      for (int i = 0; i < 20; ++i) {
        const Complex a = rng.complex_normal(), b = rng.complex_normal();
        const auto r = random_label(rng, deg), s = random_label(rng, deg);
        const ComplexVector lhs = vector_from_label(in.eig, in.psi, a * r + b * s);
        const ComplexVector rhs = a * vector_from_label(in.eig, in.psi, r) + b * vector_from_label(in.eig, in.psi, s);
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1.0, rhs.cwiseAbs().maxCoeff()));
      }
    }
    return worst;
  });
  record("labeling", "solve_label round trip", 1e-7, true, [&] {
    double worst = 0.0;
    Rng rng(opt.seed, 0x12);
    for (const auto& in : instances)
      for (int i = 0; i < 20; ++i) {
        const ComplexVector target = complex_gaussian(rng, in.eig.dim(), 1);
        const auto r = solve_label(in.eig, in.psi, target);
        worst = std::max(worst, (vector_from_label(in.eig, in.psi, r) - target).norm());
      }
    return worst;
  });
  record("labeling", "canonical components real positive, basis orthonormal", 1e-9, true, [&] {
    double worst = 0.0;
    for (const auto& in : instances) {
      const auto cb = canonical_basis(in.eig, in.psi);
      const ComplexVector c = cb.vectors.adjoint() * in.psi.amplitudes();
      for (Eigen::Index j = 0; j < c.size(); ++j) {
        worst = std::max({worst, std::abs(c(j).imag()), c(j).real() > 0 ? 0.0 : 1.0});
      }
      worst = std::max(worst, unitarity_defect(cb.vectors));
    }
    return worst;
  });
  record("labeling", "canonical basis unitary equivariance", 1e-9, true, [&] {
    double worst = 0.0;
    Rng rng(opt.seed, 0x13);
    for (const auto& in : instances) {
      const ComplexMatrix u = random_unitary(rng, in.eig.dim());
      ComplexMatrix hu = u * in.h.matrix() * u.adjoint();
      hu = (0.5 * (hu + hu.adjoint())).eval();
      const auto moved = canonical_basis(eig_decompose(HermitianOperator(hu)), StateVector(u * in.psi.amplitudes()));
      worst = std::max(worst, max_abs(moved.vectors - u * canonical_basis(in.eig, in.psi).vectors));
    }
    return worst;
  });
  record("labeling", "canonical basis time covariance", 1e-9, true, [&] {
    double worst = 0.0;
    for (const auto& in : instances) {
      const ComplexMatrix b0 = canonical_basis(in.eig, in.psi).vectors;
      for (double t : times) {
        const ComplexMatrix bt = canonical_basis(in.eig, evolve(in.eig, in.psi, t)).vectors;
        worst = std::max(worst, max_abs(bt - propagator(in.eig, t) * b0));
      }
    }
    return worst;
  });
  record("labeling", "Krylov basis rank deficits on valid instances", 0.0, true, [&] {
    double bad = 0.0;
    for (const auto& in : instances) bad += numeric_rank(krylov_basis(in.eig, in.psi)) == in.eig.dim() ? 0 : 1;
    return bad;
  });

  // construction
  std::vector<TrilemmaReport> drift;
  for (const auto& in : instances) {
    drift.push_back(time_drift_experiment(in.eig, in.psi, in.shape, times, {}));
  }
  record("construction", "comoving entropies frozen in time", 1e-9, true, [&] {
    double worst = 0.0;
    for (const auto& r : drift) worst = std::max(worst, spread(r.entropies_comoving));
    return worst;
  });
  record("construction", "tau(t) equivalent to e^{-iHt} tau(0) (residual)", 1e-9, true, [&] {
    double worst = 0.0;
    for (const auto& r : drift)
      for (double x : r.covariance_residuals) worst = std::max(worst, x);
    return worst;
  });
  record("construction", "tau satisfies its own entropy profile", 1e-10, true, [&] {
    double worst = 0.0;
    for (const auto& in : instances) {
      const Tps tau = canonical_tps(in.eig, in.psi, in.shape);
      const auto profile = compute_profile(tau, in.eig, in.psi, default_probes(in.eig.dim(), opt.seed));
      worst = std::max(worst, verify_profile(tau, in.eig, in.psi, profile, 1e-10).max_deviation);
    }
    return worst;
  });
  record("construction", "profile-passing inequivalent TPS at N=4 (counterexamples)", 0.0, true, [&] {
    double found = 0.0;
    const Instance& in = instances.front();
    const Tps tau = canonical_tps(in.eig, in.psi, in.shape);
    const auto profile = compute_profile(tau, in.eig, in.psi, default_probes(in.eig.dim(), opt.seed));
    Rng rng(opt.seed, 0x0C);
    for (int i = 0; i < 200; ++i) {
      // half Haar candidates, half small perturbations of tau
      ComplexMatrix u = random_unitary(rng, 4);
      if (i % 2) u = tau.matrix() * exp_anti_hermitian(1e-2 * kI * random_hermitian(rng, 4).matrix());
      const Tps cand(in.shape, u);
      if (verify_profile(cand, in.eig, in.psi, profile, 1e-6).passed && !are_equivalent(cand, tau).equivalent) {
        found += 1;
      }
    }
    return found;
  });

  // spectra
  record("spectra", "Kronecker-sum spectra decomposed (cross-sum mismatch)", 1e-9, true, [&] {
    double worst = 0.0;
    for (const auto& shape : shapes) {
      for (std::uint64_t i = 0; i < opt.instances; ++i) {
        const auto g = generate_kronecker_h(shape, opt.seed * 1000 + i);
        const auto spectrum = spectrum_of(eig_decompose(g.hamiltonian));
        const auto dec = sumset_decompose(spectrum, shape);
        worst = std::max(worst, dec ? cross_sum_mismatch(*dec, spectrum) : 1.0);
      }
    }
    return worst;
  });
  record("spectra", "Gaussian-random spectra accepted", 0.0, true, [&] {
    double accepted = 0.0;
    Rng rng(opt.seed, 0x55);
    for (const auto& shape : shapes)
      for (int i = 0; i < 20; ++i) {
        std::vector<double> s;
        for (Eigen::Index j = 0; j < shape.total(); ++j) s.push_back(rng.normal());
        accepted += sumset_decompose(s, shape) ? 1 : 0;
      }
    return accepted;
  });
  record("spectra", "interaction-free iff decomposition (mismatches)", 0.0, true, [&] {
    double bad = 0.0;
    for (const auto& shape : shapes) {
      const auto g = generate_kronecker_h(shape, opt.seed + 3);
      const auto eig = eig_decompose(g.hamiltonian);
      const auto dec = sumset_decompose(spectrum_of(eig), shape);
      bad += dec && is_interaction_free(g.hamiltonian, tps_from_decomposition(eig, *dec, shape)).interaction_free ? 0 : 1;
      const auto h = random_hermitian(shape.total(), opt.seed + 4);
      bad += !sumset_decompose(spectrum_of(eig_decompose(h)), shape) &&
                     !is_interaction_free(h, identity_tps(shape)).interaction_free
                 ? 0
                 : 1;
    }
    return bad;
  });
  record("spectra", "entropies constant in t under Kronecker-sum H", 1e-10, true, [&] {
    double worst = 0.0;
    for (const auto& shape : shapes) {
      const auto g = generate_kronecker_h(shape, opt.seed + 5);
      const auto eig = eig_decompose(g.hamiltonian);
      const Tps native = identity_tps(shape);
      std::vector<std::vector<double>> table;
      for (double t : times) table.push_back(entropies(native, evolve(eig, g.state, t)));
      worst = std::max(worst, spread(table));
    }
    return worst;
  });

  // klocal
  const auto scrambled = scrambled_klocal(opt.seed, 3, 2);
  record("klocal", "Parseval identity under random TPSs", 1e-9, true, [&] {
    double worst = 0.0;
    const TpsShape shape({2, 2, 2});
    for (std::uint64_t i = 0; i < 10; ++i) {
      const auto dec = pauli_coefficients(scrambled.scrambled, Tps(shape, random_unitary(8, opt.seed + i)));
      worst = std::max(worst, detail::parseval_defect(dec.coefficients, pauli_norm_squared(scrambled.scrambled)));
    }
    return worst;
  });
  record("klocal", "Pauli reconstruction of the pulled-back H", 1e-9, true, [&] {
    const Tps tps(TpsShape({2, 2, 2}), random_unitary(8, opt.seed + 1));
    return max_abs(reconstruct(pauli_coefficients(scrambled.scrambled, tps)) -
                   pulled_back_operator(scrambled.scrambled, tps));
  });
  record("klocal", "cost invariant under the TPS stabilizer", 1e-10, true, [&] {
    const TpsShape shape({2, 2, 2});
    Rng rng(opt.seed, 0x5AB);
    const Tps tps(shape, random_unitary(rng, 8));
    const double base = nonlocality_cost(scrambled.scrambled, tps, 2);
    double worst = 0.0;
    for (const auto& sigma : dimension_preserving_permutations(shape)) {
      const Tps moved(shape, tps.matrix() * factor_permutation(shape, sigma) * random_local_unitary(rng, shape));
      worst = std::max(worst, std::abs(nonlocality_cost(scrambled.scrambled, moved, 2) - base));
    }
    return worst;
  });
  record("klocal", "search trace increases (violations)", 0.0, true, [&] {
    KLocalSearchOptions so;
    so.seeds = {opt.seed, opt.seed + 1};
    so.iterations = 300;
    const auto res = search_klocal_tps(scrambled.scrambled, 2, TpsShape({2, 2, 2}), so);
    double bad = std::abs(res.cost - nonlocality_cost(scrambled.scrambled, res.best_tps, 2)) <= 1e-12 ? 0 : 1;
    for (const auto& r : res.restarts)
      for (std::size_t i = 1; i < r.trace.size(); ++i) bad += r.trace[i] > r.trace[i - 1] ? 1 : 0;
    return bad;
  });

  // experiments
  record("experiments", "identical configs give identical tables (differences)", 0.0, true, [&] {
    Json doc = {{"experiment", "frozen-entropy"}, {"seed", opt.seed}, {"time_grid", {{"start", 0}, {"stop", 5}, {"count", 20}}}};
    const auto cfg = parse_config(doc);
    const auto a = run(cfg), b = run(cfg);
    double diffs = 0.0;
    for (const auto& [name, table] : a.tables) diffs += to_csv(table) == to_csv(b.tables.at(name)) ? 0 : 1;
    return diffs;
  });
  record("experiments", "reports missing convention stamps", 0.0, true, [&] {
    const auto rep = run(parse_config(Json{{"experiment", "dims-audit"}}));
    double missing = 0.0;
    for (const char* key : {"flattening", "eigenvector_phase", "offset"}) {
      missing += rep.document.at("conventions").contains(key) ? 0 : 1;
    }
    return missing;
  });
  return results;
}

inline bool all_passed(const std::vector<InvariantResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

inline Table summary_table(const std::vector<InvariantResult>& results) {
  Table t{{"module", "invariant", "value", "bound", "passed", "seconds"}, {}};
  for (const auto& r : results) {
    t.rows.push_back({r.module, r.name, r.value, r.bound, r.passed, r.seconds});
  }
  return t;
}

}  // namespace tpslab
