#pragma once

// State discrimination: POVMs, the square-root (pretty-good) measurement,
// average decoding error, the two-state Helstrom optimum, and the packing
// bound on the expected error of random codes.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gausscode/channels/ensemble.hpp"
#include "gausscode/core.hpp"
#include "gausscode/qit/entropy.hpp"
#include "gausscode/qit/linalg.hpp"
#include "gausscode/qit/types.hpp"

namespace gausscode::decode {

class Povm {
 public:
  // Validates: every element PSD (within the PSD tolerance) of a common
  // dimension, and the elements summing to the identity within the unitarity
  // tolerance. Callers complete deficient sums with a junk outcome first.
  explicit Povm(std::vector<cmat> elements) : elements_(std::move(elements)) {
    if (elements_.empty()) throw std::invalid_argument("Povm: no elements");
    const index_t d = elements_.front().rows();
    cmat sum = cmat::Zero(d, d);
    for (const cmat& e : elements_) {
      if (e.rows() != d || e.cols() != d)
        throw std::invalid_argument("Povm: elements must be square with a common dimension");
      qit::PositiveOperator check(e);
      sum += e;
    }
    const double res = (sum - cmat::Identity(d, d)).cwiseAbs().maxCoeff();
    if (res > tol::unitary)
      throw std::invalid_argument("Povm: elements do not sum to the identity, residual " +
                                  std::to_string(res));
  }

  index_t size() const { return static_cast<index_t>(elements_.size()); }
  index_t dim() const { return elements_.front().rows(); }
  const std::vector<cmat>& elements() const { return elements_; }
  const cmat& element(index_t j) const { return elements_[static_cast<std::size_t>(j)]; }

 private:
  std::vector<cmat> elements_;
};

// Square-root measurement for the ensemble {p_j, sigma_j}:
// Lambda_j = rho_bar^{-1/2} p_j sigma_j rho_bar^{-1/2} with
// rho_bar = sum_j p_j sigma_j. When rho_bar is rank deficient an extra junk
// element I - P_supp completes the POVM; a decoder never answers "junk"
// correctly, so the junk element counts toward the error.
inline Povm pgm_povm(const chan::Ensemble& ens) {
  cmat avg = ens.average();
  avg = 0.5 * (avg + avg.adjoint().eval());
  if (avg.cwiseAbs().maxCoeff() <= 0.0)
    throw std::invalid_argument("pgm_povm: ensemble average is zero");
  const cmat inv_sqrt = qit::matrix_invsqrt(avg);

  std::vector<cmat> elements;
  elements.reserve(static_cast<std::size_t>(ens.size()) + 1);
  cmat sum = cmat::Zero(ens.dim(), ens.dim());
  for (index_t j = 0; j < ens.size(); ++j) {
    cmat e = inv_sqrt * (ens.weight(j) * ens.member(j)) * inv_sqrt;
    e = 0.5 * (e + e.adjoint().eval());
    sum += e;
    elements.push_back(std::move(e));
  }
  // The on-support elements sum to the support projector of the average;
  // whatever is missing from the identity is the junk outcome.
  cmat junk = cmat::Identity(ens.dim(), ens.dim()) - sum;
  junk = 0.5 * (junk + junk.adjoint().eval());
  if (junk.cwiseAbs().maxCoeff() > tol::unitary) elements.push_back(std::move(junk));
  return Povm(std::move(elements));
}

// Average decoding error (1/N) sum_j tr[sigma_j (1 - Lambda_j)]. The POVM may
// carry one trailing junk element beyond the N matched outcomes. Subnormalized
// sigma_j are allowed; the result is clamped to [0, max(1, max_j tr sigma_j)].
inline double classical_error(const std::vector<cmat>& states, const Povm& povm) {
  if (states.empty()) throw std::invalid_argument("classical_error: no states");
  const index_t n = static_cast<index_t>(states.size());
  if (povm.size() != n && povm.size() != n + 1)
    throw std::invalid_argument("classical_error: POVM must have N or N+1 elements");
  double err = 0.0;
  double max_trace = 0.0;
  for (index_t j = 0; j < n; ++j) {
    const cmat& s = states[static_cast<std::size_t>(j)];
    if (s.rows() != povm.dim() || s.cols() != povm.dim())
      throw std::invalid_argument("classical_error: state/POVM dimension mismatch");
    const double t = s.trace().real();
    max_trace = std::max(max_trace, t);
    err += t - (s * povm.element(j)).trace().real();
  }
  err /= static_cast<double>(n);
  return std::clamp(err, 0.0, std::max(1.0, max_trace));
}

// Optimal two-state error for uniform priors: (1/2)(1 - (1/2) ||s0 - s1||_1).
inline double helstrom_error(const qit::DensityOperator& s0, const qit::DensityOperator& s1) {
  if (s0.dim() != s1.dim()) throw std::invalid_argument("helstrom_error: dimension mismatch");
  return 0.5 * (1.0 - 0.5 * qit::trace_distance(s0, s1));
}

struct PackingBound {
  double tight = 0.0;   // 2 eps + 4 sqrt(eps) + 4 eta
  double simple = 0.0;  // 6 sqrt(eps) + 4 eta
};

// Expected-error bound for random codes under the length/cross-term
// preconditions; the first form implies the second for eps <= 1.
inline PackingBound packing_bound(double epsilon, double eta) {
  if (!(epsilon >= 0.0) || !(eta >= 0.0))
    throw std::invalid_argument("packing_bound: need epsilon, eta >= 0");
  PackingBound b;
  b.tight = 2.0 * epsilon + 4.0 * std::sqrt(epsilon) + 4.0 * eta;
  b.simple = 6.0 * std::sqrt(epsilon) + 4.0 * eta;
  return b;
}

}  // namespace gausscode::decode
