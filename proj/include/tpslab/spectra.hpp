#pragma once

// Kronecker sums, additive spectrum factorization (sumset decomposition) and
// the interaction-free test of a Hamiltonian in a given TPS.
//
// A Kronecker sum H_1 (x) I + I (x) H_2 + ... has as spectrum the multiset of
// sums of local eigenvalues. Decompositions are canonicalized by giving every
// local spectrum minimum 0 except the first, which absorbs the global offset.

#include "linalg.hpp"
#include "tps.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tpslab {

inline HermitianOperator kronecker_sum(const std::vector<HermitianOperator>& locals) {
  if (locals.size() < 2) throw std::invalid_argument("kronecker_sum needs >= 2 local operators");
  Eigen::Index total = 1;
  for (const auto& h : locals) total *= h.dim();
  ComplexMatrix sum = ComplexMatrix::Zero(total, total);
  Eigen::Index left = 1;
  for (const auto& h : locals) {
    const Eigen::Index right = total / (left * h.dim());
    sum += kron(kron(ComplexMatrix::Identity(left, left), h.matrix()),
                ComplexMatrix::Identity(right, right));
    left *= h.dim();
  }
  return HermitianOperator(std::move(sum));
}

inline HermitianOperator diagonal_operator(const std::vector<double>& values) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                                        static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = values[i];
  }
  return HermitianOperator(std::move(m));
}

/// Cross-sums of the local lists in lexicographic order (flat index j holds
/// sum_k locals[k][i_k]).
inline std::vector<double> cross_sums(const std::vector<std::vector<double>>& locals) {
  std::vector<double> sums{0.0};
  for (const auto& l : locals) {
    std::vector<double> next;
    next.reserve(sums.size() * l.size());
    for (double s : sums)
      for (double x : l) next.push_back(s + x);
    sums = std::move(next);
  }
  return sums;
}

struct SumsetDecomposition {
  std::vector<std::vector<double>> local_spectra;  // sorted ascending
  static constexpr const char* kOffsetConvention = "first-absorbs";
};

namespace detail {

// Multiset of reals with tolerant removal; values kept sorted.
class TolerantMultiset {
 public:
  TolerantMultiset(std::vector<double> values, double tol)
      : values_(std::move(values)), used_(values_.size(), false), tol_(tol) {
    std::sort(values_.begin(), values_.end());
  }

  std::optional<std::size_t> take(double x) {
    std::optional<std::size_t> best;
    double best_err = tol_;
    auto it = std::lower_bound(values_.begin(), values_.end(), x - tol_);
    for (auto i = static_cast<std::size_t>(it - values_.begin());
         i < values_.size() && values_[i] <= x + tol_; ++i) {
      const double err = std::abs(values_[i] - x);
      if (!used_[i] && err <= best_err) {
        best = i;
        best_err = err;
      }
    }
    if (best) {
      used_[*best] = true;
      ++taken_;
    }
    return best;
  }
  void give_back(std::size_t i) {
    used_[i] = false;
    --taken_;
  }
  std::optional<double> smallest() const {
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (!used_[i]) return values_[i];
    return std::nullopt;
  }
  bool empty() const noexcept { return taken_ == values_.size(); }

 private:
  std::vector<double> values_;
  std::vector<bool> used_;
  double tol_;
  std::size_t taken_ = 0;
};

// Enumerates all splittings S = A + B with |A| = a_size, |B| = b_size,
// min A = min S and min B = 0. The smallest unexplained element is always
// either (next a) + b_0 or a_0 + (next b); both branches are tried, A first.
// `visit` returns true to stop the enumeration.
class TwoFactorSearch {
 public:
  using Visitor = std::function<bool(const std::vector<double>&, const std::vector<double>&)>;

  TwoFactorSearch(const std::vector<double>& spectrum, std::size_t a_size, std::size_t b_size,
                  double tol)
      : pool_(spectrum, tol), a_size_(a_size), b_size_(b_size) {}

  bool run(const Visitor& visit) {
    const auto lo = pool_.smallest();
    if (!lo) return false;
    const auto first = pool_.take(*lo);
    a_ = {*lo};
    b_ = {0.0};
    const bool stop = recurse(visit);
    pool_.give_back(*first);
    return stop;
  }

 private:
  bool recurse(const Visitor& visit) {
    if (pool_.empty()) {
      return a_.size() == a_size_ && b_.size() == b_size_ && visit(a_, b_);
    }
    const double x = *pool_.smallest();
    if (a_.size() < a_size_ && try_extend(x - b_.front(), true, visit)) return true;
    if (b_.size() < b_size_ && try_extend(x - a_.front(), false, visit)) return true;
    return false;
  }

  bool try_extend(double value, bool into_a, const Visitor& visit) {
    auto& grow = into_a ? a_ : b_;
    const auto& other = into_a ? b_ : a_;
    std::vector<std::size_t> taken;
    bool ok = true;
    for (double o : other) {
      auto idx = pool_.take(value + o);
      if (!idx) {
        ok = false;
        break;
      }
      taken.push_back(*idx);
    }
    bool stop = false;
    if (ok) {
      grow.push_back(value);
      stop = recurse(visit);
      grow.pop_back();
    }
    for (auto it = taken.rbegin(); it != taken.rend(); ++it) pool_.give_back(*it);
    return stop;
  }

  TolerantMultiset pool_;
  std::size_t a_size_, b_size_;
  std::vector<double> a_, b_;
};

inline bool decompose_recursive(const std::vector<double>& spectrum, const std::vector<int>& dims,
                                std::size_t k, double tol,
                                std::vector<std::vector<double>>& out) {
  if (k + 1 == dims.size()) {
    out.push_back(spectrum);
    std::sort(out.back().begin(), out.back().end());
    return true;
  }
  const auto a_size = static_cast<std::size_t>(dims[k]);
  const std::size_t b_size = spectrum.size() / a_size;
  TwoFactorSearch search(spectrum, a_size, b_size, tol);
  return search.run([&](const std::vector<double>& a, const std::vector<double>& b) {
    out.push_back(a);
    if (decompose_recursive(b, dims, k + 1, tol, out)) return true;
    out.resize(k);
    return false;
  });
}

}  // namespace detail

inline constexpr double kSumsetTolerance = 1e-9;

/// Backtracking search for local spectra whose cross-sums reproduce `spectrum`
/// (as a multiset, within tol scaled by max(1, spectral range)). Returns the
/// first decomposition found, or nullopt.
inline std::optional<SumsetDecomposition> sumset_decompose(std::vector<double> spectrum,
                                                           const TpsShape& shape,
                                                           double tol = kSumsetTolerance) {
  if (static_cast<Eigen::Index>(spectrum.size()) != shape.total()) {
    throw DimensionError("sumset_decompose: spectrum size " + std::to_string(spectrum.size()) +
                         " does not match shape " + to_string(shape));
  }
  std::sort(spectrum.begin(), spectrum.end());
  const double scaled_tol = tol * std::max(1.0, spectrum.back() - spectrum.front());
  std::vector<std::vector<double>> locals;
  if (!detail::decompose_recursive(spectrum, shape.dims(), 0, scaled_tol, locals)) {
    return std::nullopt;
  }
  return SumsetDecomposition{std::move(locals)};
}

/// Largest mismatch between the sorted cross-sum multiset and the sorted spectrum.
inline double cross_sum_mismatch(const SumsetDecomposition& dec, std::vector<double> spectrum) {
  auto sums = cross_sums(dec.local_spectra);
  if (sums.size() != spectrum.size()) return std::numeric_limits<double>::infinity();
  std::sort(sums.begin(), sums.end());
  std::sort(spectrum.begin(), spectrum.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < sums.size(); ++i) worst = std::max(worst, std::abs(sums[i] - spectrum[i]));
  return worst;
}

inline std::vector<double> spectrum_of(const EigenSystem& eig) {
  return {eig.eigenvalues.data(), eig.eigenvalues.data() + eig.eigenvalues.size()};
}

/// TPS whose product basis vector of flat index j is the eigenvector with
/// eigenvalue equal to the j-th cross-sum of the decomposition. In that TPS
/// the Hamiltonian is the Kronecker sum of diag(local spectra).
inline Tps tps_from_decomposition(const EigenSystem& eig, const SumsetDecomposition& dec,
                                  const TpsShape& shape) {
  const auto sums = cross_sums(dec.local_spectra);
  require_same_dim(static_cast<Eigen::Index>(sums.size()), eig.dim(), "tps_from_decomposition");
  std::vector<bool> used(sums.size(), false);
  ComplexMatrix t(eig.dim(), eig.dim());
  for (std::size_t j = 0; j < sums.size(); ++j) {
    std::size_t best = sums.size();
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < sums.size(); ++e) {
      const double err = std::abs(eig.eigenvalues(static_cast<Eigen::Index>(e)) - sums[j]);
      if (!used[e] && err < best_err) {
        best = e;
        best_err = err;
      }
    }
    used[best] = true;
    t.col(static_cast<Eigen::Index>(j)) = eig.eigenvectors.col(static_cast<Eigen::Index>(best));
  }
  return Tps(shape, std::move(t));
}

struct InteractionCheck {
  bool interaction_free = false;
  double residual = 0.0;  // Frobenius norm of the part outside span{single-factor terms}
  double norm = 0.0;      // Frobenius norm of H
};

/// Pulls H back through the TPS and projects it (Hilbert-Schmidt) onto the
/// span of operators acting on one factor alone.
inline InteractionCheck is_interaction_free(const HermitianOperator& h, const Tps& tps,
                                            double tol = 1e-10) {
  require_same_dim(h.dim(), tps.dim(), "is_interaction_free");
  const TpsShape& shape = tps.shape();
  const ComplexMatrix pulled = tps.matrix().adjoint() * h.matrix() * tps.matrix();
  const Eigen::Index n = shape.total();
  const Complex trace = pulled.trace();

  // P(H) = sum_k embed_k(tr_{not k} H / (N/d_k)) - (n-1) tr(H)/N I
  ComplexMatrix projected =
      -static_cast<double>(shape.factors() - 1) * trace / static_cast<double>(n) *
      ComplexMatrix::Identity(n, n);
  for (std::size_t k = 0; k < shape.factors(); ++k) {
    const Eigen::Index l = shape.left(k), d = shape.dim(k), r = shape.right(k);
    ComplexMatrix local = ComplexMatrix::Zero(d, d);
    for (Eigen::Index li = 0; li < l; ++li)
      for (Eigen::Index ri = 0; ri < r; ++ri)
        for (Eigen::Index a = 0; a < d; ++a)
          for (Eigen::Index b = 0; b < d; ++b)
            local(a, b) += pulled((li * d + a) * r + ri, (li * d + b) * r + ri);
    local /= static_cast<double>(l * r);
    projected += kron(kron(ComplexMatrix::Identity(l, l), local), ComplexMatrix::Identity(r, r));
  }
  InteractionCheck out;
  out.residual = (pulled - projected).norm();
  out.norm = h.matrix().norm();
  out.interaction_free = out.residual <= tol * out.norm;
  return out;
}

}  // namespace tpslab
