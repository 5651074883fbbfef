#pragma once

// Entropic quantities. Entropies and information measures are reported in
// bits (log base 2); the relative entropy is also exposed in nats because the
// Pinsker-style audit is stated in that normalization. Relative entropy
// returns +infinity when the first argument leaves the support of the second.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gausscode/core.hpp"
#include "gausscode/qit/linalg.hpp"
#include "gausscode/qit/types.hpp"

namespace gausscode::qit {

inline constexpr double log2_e = 1.4426950408889634;  // 1 / ln 2

// Binary entropy in bits; domain [0, 1].
inline double binary_entropy(double x) {
  if (x < 0.0 || x > 1.0) throw std::domain_error("binary_entropy: argument outside [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

inline double binary_entropy_nat(double x) { return binary_entropy(x) / log2_e; }

// Von Neumann entropy in bits. Eigenvalues in the roundoff band
// [-tol::psd, 0) are clamped to zero; deeper negativity is a domain error.
template <typename Derived>
double entropy_of(const Eigen::MatrixBase<Derived>& herm) {
  const rvec ev = hermitian_eigenvalues(herm);
  double h = 0.0;
  for (index_t i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol::psd) throw std::domain_error("entropy: negative eigenvalue beyond tolerance");
    const double p = std::max(ev(i), 0.0);
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

inline double entropy(const DensityOperator& rho) { return entropy_of(rho.matrix()); }

// Unhalved trace distance ||a - b||_1 (sum of absolute eigenvalues of the
// Hermitian difference).
template <typename DA, typename DB>
double trace_distance_of(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  return hermitian_eigenvalues(cmat(a - b)).cwiseAbs().sum();
}

inline double trace_distance(const PositiveOperator& a, const PositiveOperator& b) {
  return trace_distance_of(a.matrix(), b.matrix());
}

namespace detail_entropy {

// Relative entropy in nats with the +infinity support sentinel.
inline double relative_entropy_nat_impl(const cmat& rho, const cmat& sigma) {
  if (rho.rows() != sigma.rows())
    throw std::invalid_argument("relative_entropy: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<cmat> er(rho), es(sigma);
  const rvec p = er.eigenvalues();
  const rvec q = es.eigenvalues();
  const double ptop = p.maxCoeff(), qtop = q.maxCoeff();
  const double pcut = std::max(ptop * tol::support, 0.0);
  const double qcut = std::max(qtop * tol::support, 0.0);

  // Weight of rho outside the support of sigma.
  double escaped = 0.0;
  for (index_t j = 0; j < q.size(); ++j) {
    if (q(j) > qcut) continue;
    escaped += (es.eigenvectors().col(j).adjoint() * rho * es.eigenvectors().col(j))(0, 0).real();
  }
  if (escaped > 1e-9) return std::numeric_limits<double>::infinity();

  double tr_rho_log_rho = 0.0;
  for (index_t i = 0; i < p.size(); ++i)
    if (p(i) > pcut) tr_rho_log_rho += p(i) * std::log(p(i));

  double tr_rho_log_sigma = 0.0;
  for (index_t j = 0; j < q.size(); ++j) {
    if (q(j) <= qcut) continue;
    const double overlap =
        (es.eigenvectors().col(j).adjoint() * rho * es.eigenvectors().col(j))(0, 0).real();
    tr_rho_log_sigma += std::max(overlap, 0.0) * std::log(q(j));
  }
  return tr_rho_log_rho - tr_rho_log_sigma;
}

}  // namespace detail_entropy

inline double relative_entropy_nat(const DensityOperator& rho, const DensityOperator& sigma) {
  return detail_entropy::relative_entropy_nat_impl(rho.matrix(), sigma.matrix());
}

// Relative entropy in bits.
inline double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
  return relative_entropy_nat(rho, sigma) * log2_e;
}

// I(A:B) = H(A) + H(B) - H(AB) in bits, for a bipartite split.
inline double mutual_information(const DensityOperator& rho, const SystemSplit& split) {
  if (split.factors() != 2)
    throw std::invalid_argument("mutual_information: bipartite split required");
  if (split.dim() != rho.dim())
    throw std::invalid_argument("mutual_information: split does not match the operator");
  const double ha = entropy_of(partial_trace(rho.matrix(), split.dims(), {0}));
  const double hb = entropy_of(partial_trace(rho.matrix(), split.dims(), {1}));
  return ha + hb - entropy(rho);
}

// I(A>B) = H(B) - H(AB) in bits, for a bipartite split (A first factor).
inline double coherent_information_state(const DensityOperator& rho, const SystemSplit& split) {
  if (split.factors() != 2)
    throw std::invalid_argument("coherent_information_state: bipartite split required");
  if (split.dim() != rho.dim())
    throw std::invalid_argument("coherent_information_state: split does not match the operator");
  const double hb = entropy_of(partial_trace(rho.matrix(), split.dims(), {1}));
  return hb - entropy(rho);
}

}  // namespace gausscode::qit
