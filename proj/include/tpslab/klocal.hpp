#pragma once

// Toy locality-from-spectrum search on qubits: Pauli decomposition of a
// Hamiltonian pulled back through a TPS, the weight->k cost, and a
// random-restart proposal search over the unitary defining the TPS.

#include "linalg.hpp"
#include "parallel.hpp"
#include "tps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace tpslab {

/// Pauli words on n qubits. Word index = sum_q letter_q * 4^{n-1-q} with
/// letters I=0, X=1, Y=2, Z=3; qubit 0 is the most significant bit of the
/// flat index. Each word is stored as a signed permutation: row i has its
/// single nonzero entry `phase[i]` in column `column[i]`.
class PauliBasis {
 public:
  explicit PauliBasis(std::size_t qubits) : n_(qubits), dim_(Eigen::Index{1} << qubits) {
    if (qubits == 0 || qubits > 6) throw DimensionError("PauliBasis supports 1..6 qubits");
    const std::size_t words = std::size_t{1} << (2 * qubits);
    columns_.resize(words);
    phases_.resize(words);
    for (std::size_t w = 0; w < words; ++w) {
      columns_[w].resize(static_cast<std::size_t>(dim_));
      phases_[w].resize(static_cast<std::size_t>(dim_));
      for (Eigen::Index i = 0; i < dim_; ++i) {
        Eigen::Index col = 0;
        Complex phase = 1.0;
        for (std::size_t q = 0; q < n_; ++q) {
          const int letter = letter_of(w, q);
          const int bit = static_cast<int>((i >> (n_ - 1 - q)) & 1);
          int out = bit;
          switch (letter) {
            case 1: out = bit ^ 1; break;
            case 2: out = bit ^ 1; phase *= bit == 0 ? -kI : kI; break;
            case 3: phase *= bit == 0 ? 1.0 : -1.0; break;
            default: break;
          }
          col = (col << 1) | out;
        }
        columns_[w][static_cast<std::size_t>(i)] = col;
        phases_[w][static_cast<std::size_t>(i)] = phase;
      }
    }
  }

  std::size_t qubits() const noexcept { return n_; }
  std::size_t size() const noexcept { return columns_.size(); }

  int letter_of(std::size_t word, std::size_t q) const {
    return static_cast<int>((word >> (2 * (n_ - 1 - q))) & 3);
  }
  int weight(std::size_t word) const {
    int count = 0;
    for (std::size_t q = 0; q < n_; ++q) count += letter_of(word, q) != 0 ? 1 : 0;
    return count;
  }
  std::string name(std::size_t word) const {
    static constexpr char kLetters[] = {'I', 'X', 'Y', 'Z'};
    std::string s(n_, 'I');
    for (std::size_t q = 0; q < n_; ++q) s[q] = kLetters[letter_of(word, q)];
    return s;
  }
  std::size_t index_of(const std::string& name) const {
    if (name.size() != n_) throw std::invalid_argument("Pauli word length mismatch: " + name);
    std::size_t w = 0;
    for (char c : name) {
      const auto pos = std::string("IXYZ").find(c);
      if (pos == std::string::npos) throw std::invalid_argument("bad Pauli letter in " + name);
      w = w * 4 + pos;
    }
    return w;
  }

  ComplexMatrix matrix(std::size_t word) const {
    ComplexMatrix m = ComplexMatrix::Zero(dim_, dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) {
      m(i, columns_[word][static_cast<std::size_t>(i)]) = phases_[word][static_cast<std::size_t>(i)];
    }
    return m;
  }

  /// 2^{-n} Re tr(W^dagger A) for every word.
  std::vector<double> coefficients(const ComplexMatrix& a) const {
    std::vector<double> c(size());
    const double norm = 1.0 / static_cast<double>(dim_);
    for (std::size_t w = 0; w < size(); ++w) {
      Complex acc = 0.0;
      for (Eigen::Index i = 0; i < dim_; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        acc += std::conj(phases_[w][ui]) * a(i, columns_[w][ui]);
      }
      c[w] = acc.real() * norm;
    }
    return c;
  }

 private:
  std::size_t n_;
  Eigen::Index dim_;
  std::vector<std::vector<Eigen::Index>> columns_;
  std::vector<std::vector<Complex>> phases_;
};

inline std::size_t require_qubits(const TpsShape& shape) {
  for (int d : shape.dims()) {
    if (d != 2) throw DimensionError("Pauli decomposition needs an all-qubit shape, got " +
                                     to_string(shape));
  }
  return shape.factors();
}

struct PauliDecomposition {
  std::size_t qubits = 0;
  std::vector<double> coefficients;  // indexed by PauliBasis word index

  /// Nonzero terms keyed by word name.
  std::map<std::string, double> terms(double threshold = 0.0) const {
    PauliBasis basis(qubits);
    std::map<std::string, double> out;
    for (std::size_t w = 0; w < coefficients.size(); ++w) {
      if (std::abs(coefficients[w]) > threshold) out.emplace(basis.name(w), coefficients[w]);
    }
    return out;
  }
};

inline ComplexMatrix pulled_back_operator(const HermitianOperator& h, const Tps& tps) {
  require_same_dim(h.dim(), tps.dim(), "pull back of operator");
  return tps.matrix().adjoint() * h.matrix() * tps.matrix();
}

inline PauliDecomposition pauli_coefficients(const HermitianOperator& h, const Tps& tps) {
  const std::size_t n = require_qubits(tps.shape());
  PauliBasis basis(n);
  return {n, basis.coefficients(pulled_back_operator(h, tps))};
}

inline ComplexMatrix reconstruct(const PauliDecomposition& dec) {
  PauliBasis basis(dec.qubits);
  const Eigen::Index dim = Eigen::Index{1} << dec.qubits;
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (std::size_t w = 0; w < dec.coefficients.size(); ++w) {
    if (dec.coefficients[w] != 0.0) m += dec.coefficients[w] * basis.matrix(w);
  }
  return m;
}

namespace detail {

inline double cost_from_coefficients(const PauliBasis& basis, const std::vector<double>& c,
                                     int k) {
  double cost = 0.0;
  for (std::size_t w = 0; w < c.size(); ++w) {
    if (basis.weight(w) > k) cost += c[w] * c[w];
  }
  return cost;
}

inline double parseval_defect(const std::vector<double>& c, double expected) {
  double sum = 0.0;
  for (double x : c) sum += x * x;
  return std::abs(sum - expected);
}

}  // namespace detail

/// sum of c_w^2 over words of weight > k; zero iff H is k-local in the TPS.
inline double nonlocality_cost(const HermitianOperator& h, const Tps& tps, int k) {
  const std::size_t n = require_qubits(tps.shape());
  PauliBasis basis(n);
  return detail::cost_from_coefficients(basis, basis.coefficients(pulled_back_operator(h, tps)), k);
}

/// 2^{-n} tr(H^2), the Parseval total of the Pauli coefficients.
inline double pauli_norm_squared(const HermitianOperator& h) {
  return (h.matrix() * h.matrix()).trace().real() / static_cast<double>(h.dim());
}

struct KLocalSearchOptions {
  std::vector<std::uint64_t> seeds{0};
  std::size_t iterations = 2000;
  double initial_step = 0.3;
  double min_step = 1e-10;
  bool identity_first = true;  // restart 0 starts from the identity TPS
};

struct RestartOutcome {
  std::uint64_t seed = 0;
  double cost = 0.0;
  Tps tps;
  std::vector<double> trace;  // best cost after each iteration (index 0 = start)
  double max_parseval_defect = 0.0;
};

struct KLocalSearchResult {
  Tps best_tps;
  double cost = 0.0;
  std::vector<double> trace;
  std::uint64_t seed = 0;
  std::vector<RestartOutcome> restarts;  // in seed order
  double max_parseval_defect = 0.0;      // over all accepted states of all restarts
};

namespace detail {

inline RestartOutcome run_restart(const HermitianOperator& h, const TpsShape& shape, int k,
                                  const PauliBasis& basis, std::uint64_t seed, bool from_identity,
                                  const KLocalSearchOptions& opt) {
  Rng rng(seed, 0x10CA1);
  const Eigen::Index dim = shape.total();
  ComplexMatrix t = from_identity ? ComplexMatrix::Identity(dim, dim) : random_unitary(rng, dim);
  const double parseval = pauli_norm_squared(h);

  auto coefficients_at = [&](const ComplexMatrix& u) {
    return basis.coefficients(u.adjoint() * h.matrix() * u);
  };
  auto c = coefficients_at(t);
  double cost = cost_from_coefficients(basis, c, k);

  RestartOutcome out;
  out.seed = seed;
  out.max_parseval_defect = parseval_defect(c, parseval);
  out.trace.reserve(opt.iterations + 1);
  out.trace.push_back(cost);

  double step = opt.initial_step;
  for (std::size_t it = 0; it < opt.iterations; ++it) {
    if (cost == 0.0) {
      out.trace.push_back(cost);
      continue;
    }
    // Random Hermitian direction G; trial unitaries exp(-i alpha G) share one
    // eigendecomposition. alpha = +-step, then the vertex of the parabola
    // through the three costs.
    ComplexMatrix g = complex_gaussian(rng, dim, dim);
    g = ((g + g.adjoint()) / (g + g.adjoint()).norm()).eval();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> dir(g);
    auto trial = [&](double alpha) {
      ComplexVector d(dim);
      for (Eigen::Index j = 0; j < dim; ++j) d(j) = std::exp(-kI * alpha * dir.eigenvalues()(j));
      ComplexMatrix u = t * (dir.eigenvectors() * d.asDiagonal() * dir.eigenvectors().adjoint());
      auto c_new = coefficients_at(u);
      const double f = cost_from_coefficients(basis, c_new, k);
      return std::tuple{f, std::move(u), std::move(c_new)};
    };
    auto plus = trial(step);
    auto minus = trial(-step);
    const double f_plus = std::get<0>(plus), f_minus = std::get<0>(minus);
    const double curvature = (f_plus + f_minus - 2.0 * cost) / (2.0 * step * step);
    const double slope = (f_plus - f_minus) / (2.0 * step);

    auto best = f_plus <= f_minus ? std::move(plus) : std::move(minus);
    double best_alpha = f_plus <= f_minus ? step : -step;
    if (curvature > 0.0) {
      const double vertex = std::clamp(-slope / (2.0 * curvature), -4.0 * step, 4.0 * step);
      auto fitted = trial(vertex);
      if (std::get<0>(fitted) < std::get<0>(best)) {
        best = std::move(fitted);
        best_alpha = vertex;
      }
    }
    if (std::get<0>(best) < cost) {
      cost = std::get<0>(best);
      t = std::move(std::get<1>(best));
      out.max_parseval_defect =
          std::max(out.max_parseval_defect, parseval_defect(std::get<2>(best), parseval));
      step = std::max(opt.min_step, 0.5 * step + std::abs(best_alpha));
    } else {
      step = std::max(opt.min_step, 0.5 * step);
    }
    step = std::min(step, 1.0);
    out.trace.push_back(cost);
  }
  out.tps = Tps(shape, std::move(t));
  out.cost = nonlocality_cost(h, out.tps, k);
  return out;
}

}  // namespace detail

/// Random-restart local search for a TPS in which H is k-local. Each restart
/// proposes T <- T exp(A) with A a random anti-Hermitian matrix of adaptive
/// (shrinking) norm and accepts strict cost decreases. The best restart wins;
/// ties go to the lowest seed value.
inline KLocalSearchResult search_klocal_tps(const HermitianOperator& h, int k,
                                            const TpsShape& shape,
                                            const KLocalSearchOptions& opt = {}) {
  const std::size_t n = require_qubits(shape);
  if (shape.total() > 16) throw DimensionError("search_klocal_tps supports N <= 16");
  require_same_dim(h.dim(), shape.total(), "search_klocal_tps");
  if (opt.seeds.empty()) throw std::invalid_argument("search_klocal_tps needs at least one seed");
  const PauliBasis basis(n);

  KLocalSearchResult result;
  result.restarts.resize(opt.seeds.size());
  parallel_for(opt.seeds.size(), [&](std::size_t r) {
    result.restarts[r] = detail::run_restart(h, shape, k, basis, opt.seeds[r],
                                             opt.identity_first && r == 0, opt);
  });
  std::size_t best = 0;
  for (std::size_t r = 0; r < result.restarts.size(); ++r) {
    const auto& cand = result.restarts[r];
    const auto& incumbent = result.restarts[best];
    if (cand.cost < incumbent.cost || (cand.cost == incumbent.cost && cand.seed < incumbent.seed)) {
      best = r;
    }
    result.max_parseval_defect =
        std::max(result.max_parseval_defect, result.restarts[r].max_parseval_defect);
  }
  result.best_tps = result.restarts[best].tps;
  result.cost = result.restarts[best].cost;
  result.trace = result.restarts[best].trace;
  result.seed = result.restarts[best].seed;
  return result;
}

/// A 2-local-style instance: Gaussian coefficients on every Pauli word of
/// weight <= k (identity excluded).
inline HermitianOperator random_klocal_hamiltonian(Rng& rng, std::size_t qubits, int k) {
  PauliBasis basis(qubits);
  const Eigen::Index dim = Eigen::Index{1} << qubits;
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (std::size_t w = 1; w < basis.size(); ++w) {
    if (basis.weight(w) <= k) m += rng.normal() * basis.matrix(w);
  }
  return HermitianOperator(0.5 * (m + m.adjoint()));
}

struct ScrambledInstance {
  HermitianOperator native;     // k-local in the identity TPS
  ComplexMatrix hidden;         // Haar unitary
  HermitianOperator scrambled;  // hidden * native * hidden^dagger
};

inline ScrambledInstance scrambled_klocal(std::uint64_t seed, std::size_t qubits, int k) {
  Rng rng(seed, 0x5C4A);
  ScrambledInstance inst;
  inst.native = random_klocal_hamiltonian(rng, qubits, k);
  inst.hidden = random_unitary(rng, inst.native.dim());
  ComplexMatrix s = inst.hidden * inst.native.matrix() * inst.hidden.adjoint();
  s = (0.5 * (s + s.adjoint())).eval();
  inst.scrambled = HermitianOperator(std::move(s));
  return inst;
}

}  // namespace tpslab
