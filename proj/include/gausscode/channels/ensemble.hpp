#pragma once

// Weighted ensembles of positive operators and the Holevo quantity
// chi = H(sum_j p_j sigma_j / t_j) - sum_j p_j H(sigma_j / t_j), where each
// member is renormalized by its trace t_j before the entropies are taken.

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gausscode/core.hpp"
#include "gausscode/qit/entropy.hpp"
#include "gausscode/qit/types.hpp"

namespace gausscode::chan {

class Ensemble {
 public:
  // Validates: weights nonnegative and summing to one, members square
  // Hermitian PSD of a common dimension, and average trace
  // sum_j p_j tr sigma_j equal to one. The last check suits ensembles of
  // (sub)normalized states whose weights absorb the normalization; use
  // `unnormalized` for ensembles of raw positive operators.
  Ensemble(rvec weights, std::vector<cmat> members)
      : Ensemble(std::move(weights), std::move(members), true) {}

  static Ensemble unnormalized(rvec weights, std::vector<cmat> members) {
    return Ensemble(std::move(weights), std::move(members), false);
  }

  index_t size() const { return weights_.size(); }
  index_t dim() const { return members_.front().rows(); }
  const rvec& weights() const { return weights_; }
  const std::vector<cmat>& members() const { return members_; }
  double weight(index_t j) const { return weights_(j); }
  const cmat& member(index_t j) const { return members_[static_cast<std::size_t>(j)]; }

  cmat average() const {
    cmat avg = cmat::Zero(dim(), dim());
    for (index_t j = 0; j < size(); ++j) avg += weights_(j) * members_[static_cast<std::size_t>(j)];
    return avg;
  }

 private:
  Ensemble(rvec weights, std::vector<cmat> members, bool check_average_trace)
      : weights_(std::move(weights)), members_(std::move(members)) {
    if (members_.empty() || weights_.size() != static_cast<index_t>(members_.size()))
      throw std::invalid_argument("Ensemble: weights and members must match and be nonempty");
    double wsum = 0.0;
    for (index_t j = 0; j < weights_.size(); ++j) {
      if (!(weights_(j) >= 0.0)) throw std::invalid_argument("Ensemble: negative weight");
      wsum += weights_(j);
    }
    if (std::abs(wsum - 1.0) > tol::trace)
      throw std::invalid_argument("Ensemble: weights must sum to one, got " +
                                  std::to_string(wsum));
    const index_t d = members_.front().rows();
    double avg_trace = 0.0;
    for (index_t j = 0; j < static_cast<index_t>(members_.size()); ++j) {
      const cmat& m = members_[static_cast<std::size_t>(j)];
      if (m.rows() != d || m.cols() != d)
        throw std::invalid_argument("Ensemble: members must be square with a common dimension");
      qit::PositiveOperator check(m);  // hermiticity + positivity
      avg_trace += weights_(j) * check.trace();
    }
    if (check_average_trace && std::abs(avg_trace - 1.0) > tol::trace)
      throw std::invalid_argument("Ensemble: average trace must be one, got " +
                                  std::to_string(avg_trace));
  }

  rvec weights_;
  std::vector<cmat> members_;
};

inline double holevo_chi(const Ensemble& ens) {
  cmat avg = cmat::Zero(ens.dim(), ens.dim());
  double members_term = 0.0;
  for (index_t j = 0; j < ens.size(); ++j) {
    const double p = ens.weight(j);
    if (p <= 0.0) continue;
    cmat sigma = ens.member(j);
    const double t = sigma.trace().real();
    if (!(t > 0.0))
      throw std::invalid_argument("holevo_chi: member with positive weight has zero trace");
    if (std::abs(t - 1.0) > tol::trace) sigma /= t;
    avg += p * sigma;
    members_term += p * qit::entropy(qit::DensityOperator::unchecked(std::move(sigma)));
  }
  avg = 0.5 * (avg + avg.adjoint().eval());
  // Throws "invalid average" if the weighted mean is not a density operator.
  qit::DensityOperator mean(avg);
  return qit::entropy(mean) - members_term;
}

}  // namespace gausscode::chan
