#pragma once

// Tensor product structures as values: pull-back, reduced density operators,
// entanglement entropy, the local-unitary equivalence decision, dimension
// counting and the discriminating-state search.
//
// Flattening convention (shared by every module): the multi-index
// (i_1, ..., i_n) maps to sum_k i_k * prod_{m>k} d_m.

#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace tpslab {

class TpsShape {
 public:
  TpsShape() = default;
  explicit TpsShape(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw DimensionError("TPS shape needs at least one factor");
    total_ = 1;
    for (int d : dims_) {
      if (d < 2) throw DimensionError("every factor dimension must be >= 2");
      total_ *= d;
    }
  }

  const std::vector<int>& dims() const noexcept { return dims_; }
  std::size_t factors() const noexcept { return dims_.size(); }
  int dim(std::size_t k) const { return dims_.at(k); }
  Eigen::Index total() const noexcept { return total_; }

  /// prod_{m<k} d_m
  Eigen::Index left(std::size_t k) const {
    Eigen::Index l = 1;
    for (std::size_t m = 0; m < k; ++m) l *= dims_[m];
    return l;
  }
  /// prod_{m>k} d_m
  Eigen::Index right(std::size_t k) const { return total_ / (left(k) * dims_.at(k)); }

  std::vector<int> multi_index(Eigen::Index flat) const {
    std::vector<int> idx(dims_.size());
    for (std::size_t k = dims_.size(); k-- > 0;) {
      idx[k] = static_cast<int>(flat % dims_[k]);
      flat /= dims_[k];
    }
    return idx;
  }
  Eigen::Index flat_index(const std::vector<int>& idx) const {
    Eigen::Index flat = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) flat = flat * dims_[k] + idx[k];
    return flat;
  }

  bool operator==(const TpsShape&) const = default;

 private:
  std::vector<int> dims_;
  Eigen::Index total_ = 0;
};

inline std::string to_string(const TpsShape& shape) {
  std::string s = "(";
  for (std::size_t k = 0; k < shape.factors(); ++k) {
    if (k) s += ",";
    s += std::to_string(shape.dim(k));
  }
  return s + ")";
}

class Tps {
 public:
  static constexpr double kUnitarityTolerance = 1e-9;

  Tps() = default;
  Tps(TpsShape shape, ComplexMatrix t) : shape_(std::move(shape)), t_(std::move(t)) {
    if (t_.rows() != shape_.total() || t_.cols() != shape_.total()) {
      throw DimensionError("TPS matrix must be N x N with N = prod d_k = " +
                           std::to_string(shape_.total()));
    }
    const double defect = unitarity_defect(t_);
    if (!(defect <= kUnitarityTolerance)) {
      throw std::invalid_argument("TPS matrix is not unitary: defect " + std::to_string(defect));
    }
  }

  const TpsShape& shape() const noexcept { return shape_; }
  const ComplexMatrix& matrix() const noexcept { return t_; }
  Eigen::Index dim() const noexcept { return shape_.total(); }

 private:
  TpsShape shape_;
  ComplexMatrix t_;
};

inline Tps identity_tps(const TpsShape& shape) {
  return Tps(shape, ComplexMatrix::Identity(shape.total(), shape.total()));
}

/// T^{-1} psi, i.e. the amplitudes in the lexicographic product basis.
inline ComplexVector pull_back(const Tps& tps, const StateVector& psi) {
  require_same_dim(tps.dim(), psi.dim(), "pull_back");
  return tps.matrix().adjoint() * psi.amplitudes();
}

/// T (v_1 (x) ... (x) v_n).
inline StateVector push_forward(const Tps& tps, const std::vector<ComplexVector>& factors) {
  if (factors.size() != tps.shape().factors()) throw DimensionError("push_forward: factor count");
  ComplexVector v = ComplexVector::Ones(1);
  for (std::size_t k = 0; k < factors.size(); ++k) {
    require_same_dim(factors[k].size(), tps.shape().dim(k), "push_forward");
    ComplexVector next(v.size() * factors[k].size());
    for (Eigen::Index a = 0; a < v.size(); ++a)
      next.segment(a * factors[k].size(), factors[k].size()) = v(a) * factors[k];
    v = std::move(next);
  }
  return StateVector(tps.matrix() * v);
}

/// rho_k = tr_{not k} |psi><psi| in the TPS; k is 0-based.
inline ComplexMatrix reduced_density(const Tps& tps, const StateVector& psi, std::size_t k) {
  const TpsShape& shape = tps.shape();
  if (k >= shape.factors()) {
    throw std::out_of_range("subsystem index " + std::to_string(k) + " out of range for shape " +
                            to_string(shape));
  }
  const ComplexVector a = pull_back(tps, psi);
  const Eigen::Index l = shape.left(k), d = shape.dim(k), r = shape.right(k);
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  for (Eigen::Index li = 0; li < l; ++li) {
    // block (d x r) of amplitudes with fixed left index
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> blk(
        a.data() + li * d * r, d, r);
    rho.noalias() += blk * blk.adjoint();
  }
  return rho;
}

/// Von Neumann entropy (natural log) of the reduced density operator of
/// subsystem k. Negative eigenvalues are clamped to 0; the result lies in [0, ln d_k].
inline double entropy(const Tps& tps, const StateVector& psi, std::size_t k) {
  const ComplexMatrix rho = reduced_density(tps, psi, k);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lambda = std::max(0.0, solver.eigenvalues()(i));
    if (lambda > 0.0) s -= lambda * std::log(lambda);
  }
  return std::clamp(s, 0.0, std::log(static_cast<double>(tps.shape().dim(k))));
}

inline std::vector<double> entropies(const Tps& tps, const StateVector& psi) {
  std::vector<double> out(tps.shape().factors());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = entropy(tps, psi, k);
  return out;
}

inline constexpr double kProductTolerance = 1e-9;

inline bool is_product_state(const Tps& tps, const StateVector& psi,
                             double tol = kProductTolerance) {
  for (std::size_t k = 0; k < tps.shape().factors(); ++k) {
    if (!(entropy(tps, psi, k) < tol)) return false;
  }
  return true;
}

inline Tps transform(const Tps& tps, const ComplexMatrix& u) {
  require_same_dim(u.rows(), tps.dim(), "transform");
  const double defect = unitarity_defect(u);
  if (!(defect <= Tps::kUnitarityTolerance)) {
    throw std::invalid_argument("transform needs a unitary: defect " + std::to_string(defect));
  }
  return Tps(tps.shape(), u * tps.matrix());
}

// ---------------------------------------------------------------------------
// Factor permutations and local unitaries.

/// Permutations sigma of the factors with d_{sigma(k)} = d_k, identity first.
inline std::vector<std::vector<int>> dimension_preserving_permutations(const TpsShape& shape) {
  std::vector<int> perm(shape.factors());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    bool ok = true;
    for (std::size_t k = 0; k < perm.size() && ok; ++k) ok = shape.dim(perm[k]) == shape.dim(k);
    if (ok) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

/// P_sigma: the content of slot k moves to slot sigma[k].
inline ComplexMatrix factor_permutation(const TpsShape& shape, const std::vector<int>& sigma) {
  const Eigen::Index n = shape.total();
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  for (Eigen::Index flat = 0; flat < n; ++flat) {
    const auto in = shape.multi_index(flat);
    std::vector<int> out(in.size());
    for (std::size_t k = 0; k < in.size(); ++k) out[static_cast<std::size_t>(sigma[k])] = in[k];
    p(shape.flat_index(out), flat) = 1.0;
  }
  return p;
}

inline ComplexMatrix random_local_unitary(Rng& rng, const TpsShape& shape) {
  std::vector<ComplexMatrix> factors;
  for (int d : shape.dims()) factors.push_back(random_unitary(rng, d));
  return kron_all(factors);
}

struct EquivalenceVerdict {
  bool equivalent = false;
  std::vector<int> permutation;                 // empty unless equivalent
  std::vector<ComplexMatrix> local_unitaries;   // empty unless equivalent
  double residual = 0.0;        // ||T1^{-1} T2 - P_sigma (U_1 (x) ... (x) U_n)||_max
  double schmidt_ratio = 0.0;   // worst sigma_2 / sigma_1 over the bipartite splits
};

inline constexpr double kEquivalenceTolerance = 1e-7;

namespace detail {

struct ProductFit {
  std::vector<ComplexMatrix> factors;
  double worst_ratio = 0.0;
};

// Iterated operator-Schmidt factorization: split off factor 0 against the
// rest, keep the leading rank-one term, recurse on the remainder.
inline ProductFit fit_product(const ComplexMatrix& m, const std::vector<int>& dims) {
  ProductFit fit;
  ComplexMatrix rest = m;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    const Eigen::Index d = dims[k];
    const Eigen::Index r = rest.rows() / d;
    ComplexMatrix realigned(d * d, r * r);
    for (Eigen::Index i1 = 0; i1 < d; ++i1)
      for (Eigen::Index j1 = 0; j1 < d; ++j1)
        for (Eigen::Index i2 = 0; i2 < r; ++i2)
          for (Eigen::Index j2 = 0; j2 < r; ++j2)
            realigned(i1 * d + j1, i2 * r + j2) = rest(i1 * r + i2, j1 * r + j2);
    Eigen::JacobiSVD<ComplexMatrix> svd(realigned, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    const double ratio = s.size() > 1 && s(0) > 0.0 ? s(1) / s(0) : (s(0) > 0.0 ? 0.0 : 1.0);
    fit.worst_ratio = std::max(fit.worst_ratio, ratio);

    const double root = std::sqrt(s(0));
    ComplexMatrix a(d, d), b(r, r);
    for (Eigen::Index i1 = 0; i1 < d; ++i1)
      for (Eigen::Index j1 = 0; j1 < d; ++j1) a(i1, j1) = svd.matrixU()(i1 * d + j1, 0) * root;
    for (Eigen::Index i2 = 0; i2 < r; ++i2)
      for (Eigen::Index j2 = 0; j2 < r; ++j2)
        b(i2, j2) = std::conj(svd.matrixV()(i2 * r + j2, 0)) * root;
    // |det| = 1 for a scaled unitary <=> ||A||_F = sqrt(d)
    const double scale = a.norm() > 0.0 ? std::sqrt(static_cast<double>(d)) / a.norm() : 1.0;
    fit.factors.push_back(a * scale);
    rest = b / scale;
  }
  const double last = rest.norm();
  if (last > 0.0) rest *= std::sqrt(static_cast<double>(rest.rows())) / last;
  fit.factors.push_back(std::move(rest));
  return fit;
}

}  // namespace detail

/// Decides whether T1^{-1} T2 = P_sigma (U_1 (x) ... (x) U_n) for some
/// dimension-preserving factor permutation sigma and local unitaries U_k.
inline EquivalenceVerdict are_equivalent(const Tps& tps1, const Tps& tps2,
                                         double tol = kEquivalenceTolerance) {
  if (!(tps1.shape() == tps2.shape())) {
    throw DimensionError("are_equivalent: shapes differ " + to_string(tps1.shape()) + " vs " +
                         to_string(tps2.shape()));
  }
  const TpsShape& shape = tps1.shape();
  const ComplexMatrix w = tps1.matrix().adjoint() * tps2.matrix();
  const auto n = static_cast<double>(shape.total());

  EquivalenceVerdict best;
  best.residual = std::numeric_limits<double>::infinity();
  for (const auto& sigma : dimension_preserving_permutations(shape)) {
    const ComplexMatrix p = factor_permutation(shape, sigma);
    auto fit = detail::fit_product(p.adjoint() * w, shape.dims());
    ComplexMatrix product = kron_all(fit.factors);
    const Complex overlap = (product.adjoint() * p.adjoint() * w).trace() / n;
    if (std::abs(overlap) > 0.0) {
      const Complex phase = overlap / std::abs(overlap);
      fit.factors[0] *= phase;
      product *= phase;
    }
    const double residual = max_abs(w - p * product);
    const bool ok = fit.worst_ratio <= tol && residual <= tol;
    if (ok || residual < best.residual) {
      best.equivalent = ok;
      best.residual = residual;
      best.schmidt_ratio = fit.worst_ratio;
      best.permutation = sigma;
      best.local_unitaries = std::move(fit.factors);
    }
    if (ok) return best;
  }
  best.permutation.clear();
  best.local_unitaries.clear();
  return best;
}

// ---------------------------------------------------------------------------
// Dimension counting.

/// dim SU(N) / (SU(d_1) x ... x SU(d_n)) = prod d_k^2 - sum d_k^2 + n - 1
inline long long tps_manifold_dim(const TpsShape& shape) {
  long long prod = 1, sum = 0;
  for (int d : shape.dims()) {
    prod *= static_cast<long long>(d) * d;
    sum += static_cast<long long>(d) * d;
  }
  return prod - sum + static_cast<long long>(shape.factors()) - 1;
}

/// sum d_k^2 - n + 1
inline long long stab_tps_dim(const TpsShape& shape) {
  long long sum = 0;
  for (int d : shape.dims()) sum += static_cast<long long>(d) * d;
  return sum - static_cast<long long>(shape.factors()) + 1;
}

/// sum over degeneracy groups of multiplicity^2; lies in [N, N^2].
inline long long stab_h_dim(const EigenSystem& eig) {
  long long total = 0;
  for (const auto& g : eig.degeneracy_groups) {
    total += static_cast<long long>(g.size()) * static_cast<long long>(g.size());
  }
  return total;
}

// ---------------------------------------------------------------------------
// Discriminating states: product in one TPS, entangled in the other.

struct DiscriminationResult {
  bool found = false;
  StateVector state;             // the witness, or the best candidate when !found
  std::vector<double> entropies_first;
  std::vector<double> entropies_second;
  std::size_t candidates_examined = 0;
};

inline constexpr double kEntangledThreshold = 1e-3;

namespace detail {

inline ComplexVector fourier_vector(int d, int m) {
  ComplexVector v(d);
  for (int j = 0; j < d; ++j) {
    v(j) = std::polar(1.0 / std::sqrt(static_cast<double>(d)),
                      2.0 * std::numbers::pi * j * m / static_cast<double>(d));
  }
  return v;
}

// Per-factor vocabulary: computational basis then the Fourier basis.
inline ComplexVector vocabulary_vector(int d, int index) {
  if (index < d) {
    ComplexVector v = ComplexVector::Zero(d);
    v(index) = 1.0;
    return v;
  }
  return fourier_vector(d, index - d);
}

}  // namespace detail

/// Scans candidate product states of tps1 (images under T_1 of the product
/// basis, then products of computational/Fourier vectors, then seeded random
/// product states) and returns the first one entangled in tps2.
/// Throws std::invalid_argument when the two TPSs are equivalent.
inline DiscriminationResult find_discriminating_state(const Tps& tps1, const Tps& tps2,
                                                      std::size_t budget = 1000,
                                                      std::uint64_t seed = 0,
                                                      double tol = kEquivalenceTolerance) {
  if (are_equivalent(tps1, tps2, tol).equivalent) {
    throw std::invalid_argument("find_discriminating_state: TPSs are equivalent");
  }
  const TpsShape& shape = tps1.shape();
  const std::size_t n = shape.factors();
  DiscriminationResult result;
  double best_score = -1.0;

  auto try_candidate = [&](const std::vector<ComplexVector>& factors) {
    ++result.candidates_examined;
    StateVector psi = push_forward(tps1, factors);
    auto first = entropies(tps1, psi);
    auto second = entropies(tps2, psi);
    const double first_max = *std::max_element(first.begin(), first.end());
    const double second_max = *std::max_element(second.begin(), second.end());
    const double score = first_max <= kProductTolerance ? second_max : -first_max;
    if (score > best_score) {
      best_score = score;
      result.state = psi;
      result.entropies_first = std::move(first);
      result.entropies_second = std::move(second);
    }
    if (first_max <= kProductTolerance && second_max >= kEntangledThreshold) {
      result.found = true;
    }
    return result.found || result.candidates_examined >= budget;
  };

  // Stage 1 and 2: odometer over the vocabulary; stage 1 is the all-computational subset.
  for (int stage = 0; stage < 2; ++stage) {
    std::vector<int> idx(n, 0);
    while (true) {
      bool computational = true;
      for (std::size_t k = 0; k < n; ++k) computational = computational && idx[k] < shape.dim(k);
      if (computational == (stage == 0)) {
        std::vector<ComplexVector> factors;
        for (std::size_t k = 0; k < n; ++k) {
          factors.push_back(detail::vocabulary_vector(shape.dim(k), idx[k]));
        }
        if (try_candidate(factors)) return result;
      }
      std::size_t k = n;
      const int limit_factor = stage == 0 ? 1 : 2;
      while (k-- > 0) {
        if (++idx[k] < limit_factor * shape.dim(k)) break;
        idx[k] = 0;
      }
      if (k == static_cast<std::size_t>(-1)) break;
    }
  }

  Rng rng(seed, 0xD15C);
  while (true) {
    std::vector<ComplexVector> factors;
    for (int d : shape.dims()) factors.push_back(random_state(rng, d).amplitudes());
    if (try_candidate(factors)) return result;
  }
}

}  // namespace tpslab
