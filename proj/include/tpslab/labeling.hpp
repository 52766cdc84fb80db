#pragma once

// Polynomial labels of Hilbert-space vectors: R(H)|psi> for R of degree
// <= N-1, interpolation of the label reaching a target vector, the Krylov
// basis and the canonical phase-fixed eigenbasis.

#include "linalg.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace tpslab {

class LabelPolynomial {
 public:
  LabelPolynomial() : coeffs_{Complex{0.0, 0.0}} {}
  explicit LabelPolynomial(std::vector<Complex> coefficients) : coeffs_(std::move(coefficients)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    while (coeffs_.size() > 1 && coeffs_.back() == Complex{0.0, 0.0}) coeffs_.pop_back();
  }

  static LabelPolynomial constant(Complex c) { return LabelPolynomial({c}); }
  static LabelPolynomial monomial(std::size_t degree) {
    std::vector<Complex> c(degree + 1, 0.0);
    c[degree] = 1.0;
    return LabelPolynomial(std::move(c));
  }

  const std::vector<Complex>& coefficients() const noexcept { return coeffs_; }
  std::size_t degree() const noexcept { return coeffs_.size() - 1; }

  Complex operator()(Complex x) const {
    Complex acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  friend LabelPolynomial operator+(const LabelPolynomial& a, const LabelPolynomial& b) {
    std::vector<Complex> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
    return LabelPolynomial(std::move(c));
  }
  friend LabelPolynomial operator*(Complex s, const LabelPolynomial& a) {
    std::vector<Complex> c = a.coeffs_;
    for (auto& x : c) x *= s;
    return LabelPolynomial(std::move(c));
  }

  bool operator==(const LabelPolynomial&) const = default;

 private:
  std::vector<Complex> coeffs_;
};

inline LabelPolynomial random_label(Rng& rng, std::size_t degree) {
  std::vector<Complex> c(degree + 1);
  for (auto& x : c) x = rng.complex_normal();
  return LabelPolynomial(std::move(c));
}

// ---------------------------------------------------------------------------
// Nondegeneracy / full-support conditions.

struct ConditionReport {
  double min_gap = 0.0;      // smallest spacing of consecutive eigenvalues
  double min_overlap = 0.0;  // smallest |<omega_j|psi>|
  bool nondegenerate = false;
  bool full_support = false;

  bool passed() const noexcept { return nondegenerate && full_support; }
  std::string describe() const {
    std::ostringstream os;
    os.precision(3);
    if (passed()) {
      os << "conditions hold";
    } else {
      if (!nondegenerate) os << "degenerate spectrum (min gap " << min_gap << ")";
      if (!nondegenerate && !full_support) os << "; ";
      if (!full_support) os << "state has (near-)zero overlap with an eigenvector (min overlap "
                            << min_overlap << ")";
    }
    return os.str();
  }
};

class ConditionError : public std::runtime_error {
 public:
  explicit ConditionError(ConditionReport report)
      : std::runtime_error("construction conditions violated: " + report.describe()),
        report_(report) {}
  const ConditionReport& report() const noexcept { return report_; }

 private:
  ConditionReport report_;
};

inline constexpr double kGapTolerance = 1e-9;
inline constexpr double kOverlapTolerance = 1e-8;

inline ConditionReport check_conditions(const EigenSystem& eig, const StateVector& psi,
                                        double gap_tol = kGapTolerance,
                                        double overlap_tol = kOverlapTolerance) {
  require_same_dim(eig.dim(), psi.dim(), "check_conditions");
  ConditionReport report;
  report.min_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 1; j < eig.dim(); ++j) {
    report.min_gap = std::min(report.min_gap, eig.eigenvalues(j) - eig.eigenvalues(j - 1));
  }
  const ComplexVector c = eig.eigenvectors.adjoint() * psi.amplitudes();
  report.min_overlap = c.cwiseAbs().minCoeff();
  report.nondegenerate = report.min_gap > gap_tol;
  report.full_support = report.min_overlap > overlap_tol;
  return report;
}

inline void require_conditions(const EigenSystem& eig, const StateVector& psi) {
  auto report = check_conditions(eig, psi);
  if (!report.passed()) throw ConditionError(report);
}

// ---------------------------------------------------------------------------
// v(R) = R(H)|psi>

/// sum_j R(omega_j) <omega_j|psi> |omega_j>
inline ComplexVector apply_polynomial(const EigenSystem& eig, const LabelPolynomial& r,
                                      const StateVector& psi) {
  require_same_dim(eig.dim(), psi.dim(), "apply_polynomial");
  ComplexVector c = eig.eigenvectors.adjoint() * psi.amplitudes();
  for (Eigen::Index j = 0; j < c.size(); ++j) c(j) *= r(eig.eigenvalues(j));
  return eig.eigenvectors * c;
}

inline ComplexVector vector_from_label(const EigenSystem& eig, const StateVector& psi,
                                       const LabelPolynomial& r) {
  return apply_polynomial(eig, r, psi);
}

/// v(R)/||v(R)||, or nullopt when R vanishes on the spectral support of psi.
inline std::optional<StateVector> unit_vector_from_label(const EigenSystem& eig,
                                                         const StateVector& psi,
                                                         const LabelPolynomial& r,
                                                         double zero_tol = 1e-14) {
  ComplexVector v = vector_from_label(eig, psi, r);
  double scale = 0.0;
  for (const auto& a : r.coefficients()) scale = std::max(scale, std::abs(a));
  if (!(v.norm() > zero_tol * std::max(1.0, scale))) return std::nullopt;
  return StateVector(std::move(v));
}

/// Degree <= N-1 label R with R(H)|psi> = target, by Lagrange interpolation
/// through (omega_j, <omega_j|target>/<omega_j|psi>) expanded to monomial
/// coefficients.
inline LabelPolynomial solve_label(const EigenSystem& eig, const StateVector& psi,
                                   const ComplexVector& target) {
  require_same_dim(eig.dim(), target.size(), "solve_label");
  require_conditions(eig, psi);
  const Eigen::Index n = eig.dim();
  const ComplexVector c = eig.eigenvectors.adjoint() * psi.amplitudes();
  const ComplexVector t = eig.eigenvectors.adjoint() * target;

  std::vector<Complex> coeffs(static_cast<std::size_t>(n), 0.0);
  std::vector<double> basis;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex ratio = t(j) / c(j);
    const double wj = eig.eigenvalues(j);
    basis.assign(1, 1.0);
    for (Eigen::Index m = 0; m < n; ++m) {
      if (m == j) continue;
      const double wm = eig.eigenvalues(m);
      const double denom = wj - wm;
      // basis <- basis * (X - wm) / denom
      basis.push_back(0.0);
      for (std::size_t i = basis.size() - 1; i > 0; --i) {
        basis[i] = (basis[i - 1] - wm * basis[i]) / denom;
      }
      basis[0] = -wm * basis[0] / denom;
    }
    for (std::size_t i = 0; i < basis.size(); ++i) coeffs[i] += ratio * basis[i];
  }
  return LabelPolynomial(std::move(coeffs));
}

inline LabelPolynomial solve_label(const EigenSystem& eig, const StateVector& psi,
                                   const StateVector& target) {
  return solve_label(eig, psi, target.amplitudes());
}

// ---------------------------------------------------------------------------
// Krylov basis and the canonical basis.

/// Columns H^j psi for j = 0..N-1, without any condition check.
inline ComplexMatrix krylov_vectors(const EigenSystem& eig, const StateVector& psi) {
  require_same_dim(eig.dim(), psi.dim(), "krylov_vectors");
  const Eigen::Index n = eig.dim();
  ComplexVector c = eig.eigenvectors.adjoint() * psi.amplitudes();
  ComplexMatrix k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k.col(j) = eig.eigenvectors * c;
    for (Eigen::Index i = 0; i < n; ++i) c(i) *= eig.eigenvalues(i);
  }
  return k;
}

inline Eigen::Index numeric_rank(const ComplexMatrix& m, double rel_tol = 1e-12) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const RealVector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) rank += s(i) > rel_tol * s(0) ? 1 : 0;
  return rank;
}

/// The Krylov basis (psi, H psi, ..., H^{N-1} psi). Not orthonormal in general.
inline ComplexMatrix krylov_basis(const EigenSystem& eig, const StateVector& psi) {
  require_conditions(eig, psi);
  ComplexMatrix k = krylov_vectors(eig, psi);
  if (numeric_rank(k) < eig.dim()) {
    auto report = check_conditions(eig, psi);
    report.nondegenerate = false;  // numerically rank deficient despite passing tolerances
    throw ConditionError(report);
  }
  return k;
}

struct CanonicalBasis {
  ComplexMatrix vectors;  // column j is b_j, ascending eigenvalue order
  RealVector overlaps;    // <b_j|psi> = |<omega_j|psi>| > 0
};

/// b_j = (<omega_j|psi>/|<omega_j|psi>|) |omega_j>, so that <b_j|psi> is real
/// positive whatever phases the eigensolver chose.
inline CanonicalBasis canonical_basis(const EigenSystem& eig, const StateVector& psi) {
  require_conditions(eig, psi);
  const ComplexVector c = eig.eigenvectors.adjoint() * psi.amplitudes();
  CanonicalBasis out;
  out.vectors = eig.eigenvectors;
  out.overlaps.resize(c.size());
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    const double mag = std::abs(c(j));
    out.vectors.col(j) *= c(j) / mag;
    out.overlaps(j) = mag;
  }
  return out;
}

}  // namespace tpslab
