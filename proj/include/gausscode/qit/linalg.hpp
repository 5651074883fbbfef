#pragma once

// Dense linear-algebra primitives: Kronecker products, partial traces over
// arbitrary factor splits, the discrete Fourier matrix, and the spectral
// functional calculus (with pseudo-inverse behaviour on the support).
// Free functions accept Eigen expressions and are templated on the scalar.

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gausscode/core.hpp"

namespace gausscode::qit {

// Kronecker product with the row-major composite convention: the first factor
// is the most significant index, (i_a * rows_b + i_b).
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar,
                                                      typename DerivedB::Scalar>::ReturnType;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                            a.cols() * b.cols());
  for (index_t i = 0; i < a.rows(); ++i)
    for (index_t j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace detail {

inline index_t product(const std::vector<index_t>& dims) {
  index_t p = 1;
  for (index_t d : dims) p *= d;
  return p;
}

// Mixed-radix strides; dims[0] is most significant.
inline std::vector<index_t> strides(const std::vector<index_t>& dims) {
  std::vector<index_t> s(dims.size(), 1);
  for (int f = static_cast<int>(dims.size()) - 2; f >= 0; --f) s[f] = s[f + 1] * dims[f + 1];
  return s;
}

}  // namespace detail

// Partial trace of `op` over the factors NOT listed in `keep`. `dims` is the
// full factor list (most significant first); `keep` is a strictly increasing
// list of factor positions. The result keeps the retained factors in their
// original order.
template <typename Derived>
auto partial_trace(const Eigen::MatrixBase<Derived>& op, const std::vector<index_t>& dims,
                   const std::vector<int>& keep) {
  using Scalar = typename Derived::Scalar;
  const index_t total = detail::product(dims);
  if (op.rows() != total || op.cols() != total)
    throw std::invalid_argument("partial_trace: dims do not multiply to the operator size");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= static_cast<int>(dims.size()))
      throw std::invalid_argument("partial_trace: keep index out of range");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw std::invalid_argument("partial_trace: keep indices must be strictly increasing");
  }

  std::vector<int> traced;
  for (int f = 0; f < static_cast<int>(dims.size()); ++f)
    if (std::find(keep.begin(), keep.end(), f) == keep.end()) traced.push_back(f);

  const auto stride = detail::strides(dims);
  std::vector<index_t> kept_dims, traced_dims;
  for (int f : keep) kept_dims.push_back(dims[f]);
  for (int f : traced) traced_dims.push_back(dims[f]);
  const index_t kd = detail::product(kept_dims);
  const index_t td = detail::product(traced_dims);

  // Absolute offset of a composite index within the flattened full space.
  auto offset = [&](index_t composite, const std::vector<int>& factors,
                    const std::vector<index_t>& fdims) {
    index_t off = 0;
    for (int f = static_cast<int>(factors.size()) - 1; f >= 0; --f) {
      off += (composite % fdims[f]) * stride[factors[f]];
      composite /= fdims[f];
    }
    return off;
  };

  std::vector<index_t> kept_off(kd), traced_off(td);
  for (index_t k = 0; k < kd; ++k) kept_off[k] = offset(k, keep, kept_dims);
  for (index_t t = 0; t < td; ++t) traced_off[t] = offset(t, traced, traced_dims);

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(kd, kd);
  for (index_t r = 0; r < kd; ++r)
    for (index_t c = 0; c < kd; ++c) {
      Scalar acc{};
      for (index_t t = 0; t < td; ++t)
        acc += op(kept_off[r] + traced_off[t], kept_off[c] + traced_off[t]);
      out(r, c) = acc;
    }
  return out;
}

// Partial trace of a pure state |psi><psi| without forming the projector:
// reshape the amplitudes into (kept x traced) and return X X^dagger.
template <typename Derived>
auto pure_partial_trace(const Eigen::MatrixBase<Derived>& psi, const std::vector<index_t>& dims,
                        const std::vector<int>& keep) {
  using Scalar = typename Derived::Scalar;
  const index_t total = detail::product(dims);
  if (psi.size() != total)
    throw std::invalid_argument("pure_partial_trace: dims do not multiply to the vector size");
  std::vector<int> traced;
  for (int f = 0; f < static_cast<int>(dims.size()); ++f)
    if (std::find(keep.begin(), keep.end(), f) == keep.end()) traced.push_back(f);

  const auto stride = detail::strides(dims);
  std::vector<index_t> kept_dims, traced_dims;
  for (int f : keep) kept_dims.push_back(dims[f]);
  for (int f : traced) traced_dims.push_back(dims[f]);
  const index_t kd = detail::product(kept_dims);
  const index_t td = detail::product(traced_dims);

  auto offset = [&](index_t composite, const std::vector<int>& factors,
                    const std::vector<index_t>& fdims) {
    index_t off = 0;
    for (int f = static_cast<int>(factors.size()) - 1; f >= 0; --f) {
      off += (composite % fdims[f]) * stride[factors[f]];
      composite /= fdims[f];
    }
    return off;
  };

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> x(kd, td);
  for (index_t k = 0; k < kd; ++k) {
    const index_t ko = offset(k, keep, kept_dims);
    for (index_t t = 0; t < td; ++t) x(k, t) = psi(ko + offset(t, traced, traced_dims));
  }
  return Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(x * x.adjoint());
}

// Unitary discrete Fourier matrix, F(j,k) = exp(+2 pi i j k / n) / sqrt(n).
// Symmetric, so it maps the k-th computational vector to the k-th conjugate
// combination in either index convention.
inline cmat fourier_matrix(index_t n) {
  if (n < 1) throw std::invalid_argument("fourier_matrix: n must be positive");
  cmat f(n, n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (index_t j = 0; j < n; ++j)
    for (index_t k = 0; k < n; ++k) {
      const double phase =
          2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / static_cast<double>(n);
      f(j, k) = norm * cplx{std::cos(phase), std::sin(phase)};
    }
  return f;
}

// Max absolute entry of (m - m^dagger): hermiticity residual.
template <typename Derived>
double hermiticity_residual(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Spectral functional calculus on a PSD operator. Eigenvalues at or below the
// relative support cutoff (tol::support times the largest eigenvalue) are
// mapped to zero rather than through f, so inverse powers act as
// pseudo-inverses on the support; f(x) = x reproduces the input restricted to
// its support. Eigenvalues in the roundoff band [-tol::psd, 0) are clamped to
// zero before applying f.
template <typename Derived, typename F>
cmat operator_function(const Eigen::MatrixBase<Derived>& op, F&& f,
                       double support_cutoff = tol::support) {
  if (op.rows() != op.cols()) throw std::invalid_argument("operator_function: square input required");
  if (hermiticity_residual(op) > tol::hermitian)
    throw std::invalid_argument("operator_function: input is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<cmat> es(op);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("operator_function: eigendecomposition failed");
  const rvec ev = es.eigenvalues();
  const double top = ev.size() ? ev.maxCoeff() : 0.0;
  if (ev.size() && ev.minCoeff() < -tol::psd)
    throw std::invalid_argument("operator_function: input is not PSD within tolerance");
  const double cutoff = top * support_cutoff;
  rvec mapped(ev.size());
  for (index_t i = 0; i < ev.size(); ++i) {
    const double x = std::max(ev(i), 0.0);
    mapped(i) = (x <= cutoff) ? 0.0 : f(x);
  }
  return es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().adjoint();
}

inline cmat matrix_sqrt(const cmat& op) {
  return operator_function(op, [](double x) { return std::sqrt(x); });
}

// Pseudo-inverse square root on the support.
inline cmat matrix_invsqrt(const cmat& op) {
  return operator_function(op, [](double x) { return 1.0 / std::sqrt(x); });
}

// Projector onto the support (eigenvalues above the relative cutoff), with its rank.
struct SupportProjector {
  cmat projector;
  index_t rank = 0;
};

template <typename Derived>
SupportProjector support_projector(const Eigen::MatrixBase<Derived>& op,
                                   double support_cutoff = tol::support) {
  if (hermiticity_residual(op) > tol::hermitian)
    throw std::invalid_argument("support_projector: input is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<cmat> es(op);
  const rvec ev = es.eigenvalues();
  const double top = ev.size() ? ev.maxCoeff() : 0.0;
  const double cutoff = top * support_cutoff;
  SupportProjector out;
  out.projector = cmat::Zero(op.rows(), op.cols());
  if (top <= 0.0) return out;
  for (index_t i = 0; i < ev.size(); ++i) {
    if (ev(i) > cutoff) {
      out.projector += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
      ++out.rank;
    }
  }
  return out;
}

// Eigenvalues of a Hermitian expression (ascending).
template <typename Derived>
rvec hermitian_eigenvalues(const Eigen::MatrixBase<Derived>& op) {
  Eigen::SelfAdjointEigenSolver<cmat> es(op.derived(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace gausscode::qit
