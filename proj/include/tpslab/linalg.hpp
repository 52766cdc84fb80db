#pragma once

// Dense complex linear algebra at desk scale (N <= 64): eigendecomposition,
// time evolution, projection weights and seeded random instances.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace tpslab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotHermitianError : public std::invalid_argument {
 public:
  NotHermitianError(double defect)
      : std::invalid_argument("operator is not Hermitian: max |A - A^dagger| = " +
                              std::to_string(defect)),
        defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m.data()[i].real()) || !std::isfinite(m.data()[i].imag())) return false;
  }
  return true;
}

/// Entrywise max of |U^dagger U - I|.
inline double unitarity_defect(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()));
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline ComplexMatrix kron_all(const std::vector<ComplexMatrix>& factors) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

/// Unit vector in C^N. Construction normalizes; a zero vector is rejected.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0) throw DimensionError("state vector must have dim >= 1");
    const double norm = amps_.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw std::invalid_argument("state vector has zero or non-finite norm");
    }
    amps_ /= norm;
  }

  static StateVector basis(Eigen::Index dim, Eigen::Index index) {
    if (index < 0 || index >= dim) throw DimensionError("basis index out of range");
    ComplexVector v = ComplexVector::Zero(dim);
    v(index) = 1.0;
    return StateVector(std::move(v));
  }

  Eigen::Index dim() const noexcept { return amps_.size(); }
  const ComplexVector& amplitudes() const noexcept { return amps_; }
  Complex operator[](Eigen::Index i) const { return amps_(i); }

 private:
  ComplexVector amps_;
};

class HermitianOperator {
 public:
  static constexpr double kDefaultTolerance = 1e-10;

  HermitianOperator() = default;
  explicit HermitianOperator(ComplexMatrix m, double tol = kDefaultTolerance) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
      throw DimensionError("Hermitian operator must be square and non-empty");
    }
    if (!all_finite(m_)) throw std::invalid_argument("Hermitian operator has non-finite entries");
    defect_ = max_abs(m_ - m_.adjoint());
    if (defect_ > tol) throw NotHermitianError(defect_);
  }

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  double hermiticity_defect() const noexcept { return defect_; }

 private:
  ComplexMatrix m_;
  double defect_ = 0.0;
};

struct EigenSystem {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // columns |omega_j>
  std::vector<std::vector<std::size_t>> degeneracy_groups;

  Eigen::Index dim() const noexcept { return eigenvalues.size(); }
  ComplexVector vector(Eigen::Index j) const { return eigenvectors.col(j); }
};

/// Relative degeneracy tolerance, scaled by the spectral range.
inline constexpr double kDegeneracyRelTol = 1e-9;

inline std::vector<std::vector<std::size_t>> group_degenerate(const RealVector& sorted_values) {
  std::vector<std::vector<std::size_t>> groups;
  if (sorted_values.size() == 0) return groups;
  const double range = sorted_values(sorted_values.size() - 1) - sorted_values(0);
  const double tol = kDegeneracyRelTol * range;
  groups.push_back({0});
  for (Eigen::Index j = 1; j < sorted_values.size(); ++j) {
    if (sorted_values(j) - sorted_values(j - 1) <= tol) {
      groups.back().push_back(static_cast<std::size_t>(j));
    } else {
      groups.push_back({static_cast<std::size_t>(j)});
    }
  }
  return groups;
}

/// Multiplies the column by a phase so that its largest-magnitude entry is real
/// positive; ties go to the lowest index.
inline void fix_column_phase(Eigen::Ref<ComplexVector> col) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < col.size(); ++i) best = std::max(best, std::abs(col(i)));
  if (best == 0.0) return;
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    if (std::abs(col(i)) >= best * (1.0 - 1e-12)) {
      col *= std::conj(col(i)) / std::abs(col(i));
      col(i) = Complex(std::abs(col(i)), 0.0);
      return;
    }
  }
}

inline EigenSystem eig_decompose(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  EigenSystem out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  for (Eigen::Index j = 0; j < out.eigenvectors.cols(); ++j) {
    fix_column_phase(out.eigenvectors.col(j));
  }
  out.degeneracy_groups = group_degenerate(out.eigenvalues);
  return out;
}

/// f(H) = V f(D) V^dagger.
template <typename F>
ComplexMatrix matrix_function(const EigenSystem& eig, F&& f) {
  ComplexVector d(eig.dim());
  for (Eigen::Index j = 0; j < eig.dim(); ++j) d(j) = f(eig.eigenvalues(j));
  return eig.eigenvectors * d.asDiagonal() * eig.eigenvectors.adjoint();
}

/// e^{-iHt} (hbar = 1).
inline ComplexMatrix propagator(const EigenSystem& eig, double t) {
  return matrix_function(eig, [t](double w) { return std::exp(-kI * w * t); });
}

/// Unitary exponential exp(A) of an anti-Hermitian A, via the eigensystem of iA.
inline ComplexMatrix exp_anti_hermitian(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(kI * a);
  const RealVector& w = solver.eigenvalues();
  ComplexVector d(w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) d(j) = std::exp(-kI * w(j));
  return solver.eigenvectors() * d.asDiagonal() * solver.eigenvectors().adjoint();
}

inline StateVector evolve(const EigenSystem& eig, const StateVector& psi, double t) {
  require_same_dim(eig.dim(), psi.dim(), "evolve");
  ComplexVector c = eig.eigenvectors.adjoint() * psi.amplitudes();
  for (Eigen::Index j = 0; j < c.size(); ++j) c(j) *= std::exp(-kI * eig.eigenvalues(j) * t);
  return StateVector(eig.eigenvectors * c);
}

/// <psi|P_omega|psi> for every degeneracy group, in ascending-eigenvalue order.
inline std::vector<double> projection_weights(const EigenSystem& eig, const StateVector& psi) {
  require_same_dim(eig.dim(), psi.dim(), "projection_weights");
  const ComplexVector c = eig.eigenvectors.adjoint() * psi.amplitudes();
  std::vector<double> out;
  out.reserve(eig.degeneracy_groups.size());
  for (const auto& group : eig.degeneracy_groups) {
    double w = 0.0;
    for (auto j : group) w += std::norm(c(static_cast<Eigen::Index>(j)));
    out.push_back(w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Seeded random instances.

/// mt19937_64 with hand-rolled uniform/normal draws, so that a seed produces
/// the same numbers regardless of the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(mix(seed, stream)) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }
  /// Complex normal with E|z|^2 = 1.
  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
  }
  std::uint64_t next_u64() { return engine_(); }

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over the combined words
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline ComplexMatrix complex_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  ComplexMatrix z(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) z(i, j) = rng.complex_normal();
  return z;
}

/// Haar unitary: QR of a complex Gaussian matrix with the diagonal phase correction.
inline ComplexMatrix random_unitary(Rng& rng, Eigen::Index dim) {
  if (dim < 1) throw DimensionError("random_unitary: dim must be >= 1");
  const ComplexMatrix z = complex_gaussian(rng, dim, dim);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

/// GUE sample scaled so the spectrum fills roughly [-2, 2].
inline HermitianOperator random_hermitian(Rng& rng, Eigen::Index dim) {
  if (dim < 1) throw DimensionError("random_hermitian: dim must be >= 1");
  const ComplexMatrix g = complex_gaussian(rng, dim, dim);
  ComplexMatrix h = (g + g.adjoint()) / std::sqrt(2.0 * static_cast<double>(dim));
  // exact symmetry, not just up to rounding
  for (Eigen::Index i = 0; i < dim; ++i) {
    h(i, i) = h(i, i).real();
    for (Eigen::Index j = i + 1; j < dim; ++j) h(j, i) = std::conj(h(i, j));
  }
  return HermitianOperator(std::move(h));
}

inline StateVector random_state(Rng& rng, Eigen::Index dim) {
  if (dim < 1) throw DimensionError("random_state: dim must be >= 1");
  ComplexVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.complex_normal();
  return StateVector(std::move(v));
}

inline ComplexMatrix random_unitary(Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_unitary(rng, dim);
}
inline HermitianOperator random_hermitian(Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_hermitian(rng, dim);
}
inline StateVector random_state(Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_state(rng, dim);
}

}  // namespace tpslab
