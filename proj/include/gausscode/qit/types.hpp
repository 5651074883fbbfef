#pragma once

// Validated quantum state types: system splits, pure states, positive
// operators and density operators. Construction checks the defining
// invariants at the shared tolerances; `unchecked` bypasses exist for hot
// paths where positivity is guaranteed by construction (e.g. X X^dagger).

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gausscode/core.hpp"
#include "gausscode/qit/linalg.hpp"

namespace gausscode::qit {

// Ordered tensor-factor dimensions; factor 0 is the most significant index.
class SystemSplit {
 public:
  explicit SystemSplit(std::vector<index_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("SystemSplit: empty factor list");
    for (index_t d : dims_)
      if (d < 1) throw std::invalid_argument("SystemSplit: factor dimensions must be >= 1");
  }
  static SystemSplit bipartite(index_t a, index_t b) { return SystemSplit({a, b}); }

  const std::vector<index_t>& dims() const { return dims_; }
  std::size_t factors() const { return dims_.size(); }
  index_t dim() const { return detail::product(dims_); }
  index_t dim_of(int factor) const { return dims_.at(static_cast<std::size_t>(factor)); }

 private:
  std::vector<index_t> dims_;
};

// Unnormalized state vector; requires a finite, strictly positive norm.
class PureState {
 public:
  explicit PureState(cvec amplitudes) : amp_(std::move(amplitudes)) {
    const double n2 = amp_.squaredNorm();
    if (!std::isfinite(n2) || n2 <= 0.0)
      throw std::invalid_argument("PureState: norm must be finite and positive");
  }
  const cvec& amplitudes() const { return amp_; }
  index_t dim() const { return amp_.size(); }
  double norm() const { return amp_.norm(); }
  double squared_norm() const { return amp_.squaredNorm(); }
  PureState normalized() const { return PureState(amp_ / amp_.norm()); }
  cmat projector() const { return amp_ * amp_.adjoint(); }

 private:
  cvec amp_;
};

// Hermitian PSD operator (trace unconstrained).
class PositiveOperator {
 public:
  explicit PositiveOperator(cmat m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols())
      throw std::invalid_argument("PositiveOperator: square matrix required");
    if (hermiticity_residual(mat_) > tol::hermitian)
      throw std::invalid_argument("PositiveOperator: not Hermitian within tolerance");
    const rvec ev = hermitian_eigenvalues(mat_);
    if (ev.size() && ev.minCoeff() < -tol::psd)
      throw std::invalid_argument("PositiveOperator: negative eigenvalue beyond tolerance");
  }

  // For operators PSD by construction; skips the eigenvalue scan.
  static PositiveOperator unchecked(cmat m) { return PositiveOperator(std::move(m), 0); }

  const cmat& matrix() const { return mat_; }
  index_t dim() const { return mat_.rows(); }
  double trace() const { return mat_.trace().real(); }

 protected:
  PositiveOperator(cmat m, int) : mat_(std::move(m)) {}

 private:
  cmat mat_;
};

// Unit-trace positive operator.
class DensityOperator : public PositiveOperator {
 public:
  explicit DensityOperator(cmat m) : PositiveOperator(std::move(m)) {
    if (std::abs(trace() - 1.0) > tol::trace)
      throw std::invalid_argument("DensityOperator: trace differs from 1 beyond tolerance");
  }
  static DensityOperator unchecked(cmat m) { return DensityOperator(std::move(m), 0); }
  static DensityOperator maximally_mixed(index_t d) {
    return DensityOperator::unchecked(cmat::Identity(d, d) / static_cast<double>(d));
  }

 private:
  DensityOperator(cmat m, int) : PositiveOperator(std::move(m), 0) {}
};

inline PositiveOperator tensor_product(const PositiveOperator& a, const PositiveOperator& b) {
  return PositiveOperator::unchecked(kron(a.matrix(), b.matrix()));
}
inline DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator::unchecked(kron(a.matrix(), b.matrix()));
}
inline PureState tensor_product(const PureState& a, const PureState& b) {
  return PureState(kron(a.amplitudes(), b.amplitudes()));
}

inline PositiveOperator partial_trace(const PositiveOperator& op, const SystemSplit& split,
                                      const std::vector<int>& keep) {
  return PositiveOperator::unchecked(partial_trace(op.matrix(), split.dims(), keep));
}
inline DensityOperator partial_trace(const DensityOperator& op, const SystemSplit& split,
                                     const std::vector<int>& keep) {
  return DensityOperator::unchecked(partial_trace(op.matrix(), split.dims(), keep));
}
inline PositiveOperator partial_trace(const PureState& psi, const SystemSplit& split,
                                      const std::vector<int>& keep) {
  return PositiveOperator::unchecked(pure_partial_trace(psi.amplitudes(), split.dims(), keep));
}

// (1/sqrt(n)) sum_j |jj>, on C^n (x) C^n.
inline PureState maximally_entangled(index_t n) {
  if (n < 1) throw std::invalid_argument("maximally_entangled: n must be positive");
  cvec v = cvec::Zero(n * n);
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  for (index_t j = 0; j < n; ++j) v(j * n + j) = a;
  return PureState(std::move(v));
}

// Canonical purification on reference (x) system: sum_i sqrt(lambda_i) |i>|v_i>,
// from the eigendecomposition of rho. Tracing out the reference recovers rho.
inline PureState purify(const DensityOperator& rho) {
  Eigen::SelfAdjointEigenSolver<cmat> es(rho.matrix());
  const index_t d = rho.dim();
  cvec out = cvec::Zero(d * d);
  for (index_t i = 0; i < d; ++i) {
    const double lam = std::max(es.eigenvalues()(i), 0.0);
    if (lam <= 0.0) continue;
    out.segment(i * d, d) += std::sqrt(lam) * es.eigenvectors().col(i);
  }
  return PureState(std::move(out));
}

}  // namespace gausscode::qit
