#pragma once

// The canonical TPS map tau(H, psi, shape), entropy profiles s_{R,k} over
// probe labels, and the locking / time-drift / frozen-entropy experiments.

#include "labeling.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "tps.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace tpslab {

/// T maps the product basis vector of flat index j to the canonical basis
/// vector b_j (ascending eigenvalue order).
inline Tps canonical_tps(const EigenSystem& eig, const StateVector& psi, const TpsShape& shape) {
  if (shape.total() != eig.dim()) {
    throw DimensionError("canonical_tps: shape " + to_string(shape) + " does not match dim " +
                         std::to_string(eig.dim()));
  }
  return Tps(shape, canonical_basis(eig, psi).vectors);
}

// ---------------------------------------------------------------------------
// Entropy profiles.

struct EntropyProfile {
  std::vector<LabelPolynomial> probes;
  std::vector<std::vector<double>> table;  // table[probe][subsystem]
  std::vector<std::string> notices;        // skipped probes
};

/// Monomials 1, X, ..., X^{N-1} followed by `random_count` seeded random
/// polynomials of degree N-1.
inline std::vector<LabelPolynomial> default_probes(Eigen::Index dim, std::uint64_t seed,
                                                   std::size_t random_count = 20) {
  std::vector<LabelPolynomial> probes;
  for (Eigen::Index j = 0; j < dim; ++j) probes.push_back(LabelPolynomial::monomial(j));
  Rng rng(seed, 0x9E0BE);
  for (std::size_t i = 0; i < random_count; ++i) {
    probes.push_back(random_label(rng, static_cast<std::size_t>(dim - 1)));
  }
  return probes;
}

/// s_{R,k} = S_k(v(R)/||v(R)||) under the given TPS. Duplicate probes are
/// dropped; probes with v(R) = 0 are skipped with a notice.
inline EntropyProfile compute_profile(const Tps& tps, const EigenSystem& eig,
                                      const StateVector& psi,
                                      const std::vector<LabelPolynomial>& probes) {
  EntropyProfile profile;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& r = probes[i];
    if (std::find(profile.probes.begin(), profile.probes.end(), r) != profile.probes.end()) {
      continue;
    }
    auto v = unit_vector_from_label(eig, psi, r);
    if (!v) {
      profile.notices.push_back("probe " + std::to_string(i) +
                                " annihilates the state (v(R) = 0); skipped");
      continue;
    }
    profile.probes.push_back(r);
    profile.table.push_back(entropies(tps, *v));
  }
  return profile;
}

struct ProfileCheck {
  double max_deviation = 0.0;
  std::size_t worst_probe = 0;
  std::size_t worst_subsystem = 0;
  bool passed = false;
};

inline ProfileCheck verify_profile(const Tps& tps, const EigenSystem& eig, const StateVector& psi,
                                   const EntropyProfile& profile, double tol) {
  ProfileCheck check;
  for (std::size_t p = 0; p < profile.probes.size(); ++p) {
    auto v = unit_vector_from_label(eig, psi, profile.probes[p]);
    const auto row = v ? entropies(tps, *v) : std::vector<double>{};
    for (std::size_t k = 0; k < profile.table[p].size(); ++k) {
      const double dev = v ? std::abs(row.at(k) - profile.table[p][k])
                           : std::numeric_limits<double>::infinity();
      if (dev > check.max_deviation) {
        check.max_deviation = dev;
        check.worst_probe = p;
        check.worst_subsystem = k;
      }
    }
  }
  check.passed = check.max_deviation <= tol;
  return check;
}

// ---------------------------------------------------------------------------
// Locking: the same constraints built from two different input vectors.

struct LockingReport {
  Tps tps_first;   // tau(H, psi)
  Tps tps_second;  // tau(H, psi')
  EquivalenceVerdict verdict;
  EntropyProfile profile_first;   // labels applied to psi, under tau(H, psi)
  EntropyProfile profile_second;  // labels applied to psi', under tau(H, psi')
  std::vector<double> input_entropies_first;   // psi under tau(H, psi)
  std::vector<double> input_entropies_second;  // psi' under tau(H, psi')
  std::vector<double> cross_entropies;         // psi' under tau(H, psi)
  bool moduli_match = false;                   // |<w_j|psi'>| == |<w_j|psi>| for all j
  double pinned_deviation = 0.0;               // max_k |input_first - input_second|
};

inline LockingReport locking_experiment(const EigenSystem& eig, const StateVector& psi,
                                        const StateVector& psi_prime, const TpsShape& shape,
                                        const std::vector<LabelPolynomial>& probes,
                                        double tol = kEquivalenceTolerance) {
  LockingReport rep;
  rep.tps_first = canonical_tps(eig, psi, shape);
  rep.tps_second = canonical_tps(eig, psi_prime, shape);
  rep.verdict = are_equivalent(rep.tps_first, rep.tps_second, tol);
  rep.profile_first = compute_profile(rep.tps_first, eig, psi, probes);
  rep.profile_second = compute_profile(rep.tps_second, eig, psi_prime, probes);
  rep.input_entropies_first = entropies(rep.tps_first, psi);
  rep.input_entropies_second = entropies(rep.tps_second, psi_prime);
  rep.cross_entropies = entropies(rep.tps_first, psi_prime);

  const ComplexVector c = eig.eigenvectors.adjoint() * psi.amplitudes();
  const ComplexVector c2 = eig.eigenvectors.adjoint() * psi_prime.amplitudes();
  rep.moduli_match = (c.cwiseAbs() - c2.cwiseAbs()).cwiseAbs().maxCoeff() <= 1e-10;
  for (std::size_t k = 0; k < rep.input_entropies_first.size(); ++k) {
    rep.pinned_deviation =
        std::max(rep.pinned_deviation,
                 std::abs(rep.input_entropies_first[k] - rep.input_entropies_second[k]));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Time drift and frozen entropies.

struct PairVerdict {
  std::size_t first = 0;
  std::size_t second = 0;
  bool equivalent = false;
  double residual = 0.0;
};

struct TrilemmaReport {
  std::vector<double> time_grid;
  std::vector<Tps> tps_at;                       // tau(t) per grid point
  std::vector<PairVerdict> tps_equivalence;      // all pairs i < j
  std::vector<double> covariance_residuals;      // tau(t) vs e^{-iH(t-t0)} tau(t0)
  std::vector<std::vector<double>> entropies_comoving;  // [t][k] under tau(t)
  std::vector<std::vector<double>> entropies_fixed;     // [t][k] under tau(t0)
  std::optional<LockingReport> locking;          // psi(t0) vs psi(t_last)
};

/// max over subsystems of (max_t - min_t)
inline double spread(const std::vector<std::vector<double>>& table) {
  if (table.empty()) return 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < table.front().size(); ++k) {
    double lo = table.front()[k], hi = lo;
    for (const auto& row : table) {
      lo = std::min(lo, row[k]);
      hi = std::max(hi, row[k]);
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

inline double inequivalent_pair_fraction(const TrilemmaReport& report) {
  if (report.tps_equivalence.empty()) return 0.0;
  std::size_t count = 0;
  for (const auto& p : report.tps_equivalence) count += p.equivalent ? 0 : 1;
  return static_cast<double>(count) / static_cast<double>(report.tps_equivalence.size());
}

inline TrilemmaReport time_drift_experiment(const EigenSystem& eig, const StateVector& psi0,
                                            const TpsShape& shape,
                                            const std::vector<double>& times,
                                            const std::vector<LabelPolynomial>& probes,
                                            double tol = kEquivalenceTolerance) {
  if (times.empty()) throw std::invalid_argument("time_drift_experiment: empty time grid");
  require_conditions(eig, psi0);
  const std::size_t nt = times.size();
  TrilemmaReport rep;
  rep.time_grid = times;
  rep.tps_at.resize(nt);
  rep.covariance_residuals.resize(nt);
  rep.entropies_comoving.resize(nt);
  rep.entropies_fixed.resize(nt);

  std::vector<StateVector> states(nt);
  parallel_for(nt, [&](std::size_t i) {
    states[i] = evolve(eig, psi0, times[i]);
    rep.tps_at[i] = canonical_tps(eig, states[i], shape);
    rep.entropies_comoving[i] = entropies(rep.tps_at[i], states[i]);
  });
  const Tps& reference = rep.tps_at.front();
  parallel_for(nt, [&](std::size_t i) {
    rep.entropies_fixed[i] = entropies(reference, states[i]);
    const Tps moved = transform(reference, propagator(eig, times[i] - times.front()));
    rep.covariance_residuals[i] = are_equivalent(rep.tps_at[i], moved, tol).residual;
  });

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = i + 1; j < nt; ++j) pairs.emplace_back(i, j);
  rep.tps_equivalence.resize(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    const auto v = are_equivalent(rep.tps_at[i], rep.tps_at[j], tol);
    rep.tps_equivalence[p] = {i, j, v.equivalent, v.residual};
  });

  if (nt > 1) {
    rep.locking = locking_experiment(eig, states.front(), states.back(), shape, probes, tol);
  }
  return rep;
}

}  // namespace tpslab
