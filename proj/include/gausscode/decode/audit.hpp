#pragma once

// The end-to-end information audit of a code used on a channel: the joint
// reference/output/environment state, entropy duality, the decoupling
// distance with its nat-based Pinsker floor, the two-basis uncertainty
// relation, the Fano floor from the measured square-root-measurement error,
// and the gentle-measurement inequality.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gausscode/channels/ensemble.hpp"
#include "gausscode/channels/stinespring.hpp"
#include "gausscode/codes/code.hpp"
#include "gausscode/core.hpp"
#include "gausscode/decode/discrimination.hpp"
#include "gausscode/qit/entropy.hpp"
#include "gausscode/qit/linalg.hpp"
#include "gausscode/qit/types.hpp"

namespace gausscode::decode {

// |Psi> = (1 (x) V U) |Phi_N> on R (x) B (x) E, with U the code's encoder.
inline qit::PureState joint_state(const codes::SubspaceCode& code,
                                  const chan::StinespringIsometry& v) {
  if (code.ambient_dim != v.dim_in())
    throw std::invalid_argument("joint_state: code ambient dimension must match channel input");
  const cmat u = codes::encoder_isometry(code);
  const index_t n = u.cols();
  const index_t out_dim = v.dim_out() * v.dim_env();
  const double root = 1.0 / std::sqrt(static_cast<double>(n));
  cvec psi = cvec::Zero(n * out_dim);
  for (index_t j = 0; j < n; ++j)
    psi.segment(j * out_dim, out_dim) = root * v.apply(cvec(u.col(j)));
  return qit::PureState(psi);
}

struct InformationAudit {
  double chi_basis = 0.0;          // Holevo quantity of {N(phi_j)}
  double chi_conjugate = 0.0;      // Holevo quantity of {N(phi_hat_k)}
  double I_RB = 0.0;               // bits
  double I_RE = 0.0;               // bits
  double H_R = 0.0;                // bits
  double duality_residual = 0.0;   // 2 H(R) - I(R:B) - I(R:E)
  double pinsker_slack = 0.0;      // I(R:E) in nats minus (decoupling/2)^2
  double uncertainty_slack = 0.0;  // I(R:B) - chi_basis - chi_conjugate
  double fano_bound = 0.0;         // log2 N - Pe log2 N - H2(Pe), basis ensemble
  double decoupling_distance = 0.0;  // || Psi^{RE} - tau^R (x) Psi^E ||_1

  // Measured decoding errors and companion values (not part of the JSON
  // serialization of the audit itself; the harness reports them as metrics).
  double pgm_error_basis = 0.0;
  double pgm_error_conjugate = 0.0;
  double fano_bound_conjugate = 0.0;
  bool duality_ok = false;      // |duality_residual| <= 1e-9
  bool pinsker_ok = false;      // pinsker_slack >= -1e-8
  bool uncertainty_ok = false;  // uncertainty_slack >= -1e-8
  bool fano_ok = false;         // chi >= fano bound - 1e-8, both ensembles
};

namespace detail {

inline double fano_floor(int code_size, double pe) {
  const double log_n = std::log2(static_cast<double>(code_size));
  const double p = std::clamp(pe, 0.0, 1.0);
  return log_n - p * log_n - qit::binary_entropy(p);
}

// Uniform ensemble of channel outputs of the columns of `family`.
inline chan::Ensemble output_ensemble(const chan::StinespringIsometry& v, const cmat& family) {
  const index_t n = family.cols();
  std::vector<cmat> members;
  members.reserve(static_cast<std::size_t>(n));
  for (index_t j = 0; j < n; ++j)
    members.push_back(chan::channel_output(v, qit::PureState(cvec(family.col(j)))).matrix());
  return chan::Ensemble(rvec::Constant(n, 1.0 / static_cast<double>(n)), std::move(members));
}

}  // namespace detail

// Full audit. `psi` must be the joint state of (code, v); the code and
// channel are needed again for the two output ensembles.
inline InformationAudit information_audit(const qit::PureState& psi,
                                          const codes::SubspaceCode& code,
                                          const chan::StinespringIsometry& v) {
  const index_t n = static_cast<index_t>(code.N);
  const qit::SystemSplit split({n, v.dim_out(), v.dim_env()});
  if (psi.dim() != split.dim())
    throw std::invalid_argument("information_audit: joint state dimension mismatch");

  const qit::PositiveOperator rho_r = qit::partial_trace(psi, split, {0});
  const qit::PositiveOperator rho_b = qit::partial_trace(psi, split, {1});
  const qit::PositiveOperator rho_e = qit::partial_trace(psi, split, {2});
  const qit::PositiveOperator rho_rb = qit::partial_trace(psi, split, {0, 1});
  const qit::PositiveOperator rho_re = qit::partial_trace(psi, split, {0, 2});

  const double h_r = qit::entropy_of(rho_r.matrix());
  const double h_b = qit::entropy_of(rho_b.matrix());
  const double h_e = qit::entropy_of(rho_e.matrix());
  const double h_rb = qit::entropy_of(rho_rb.matrix());
  const double h_re = qit::entropy_of(rho_re.matrix());

  InformationAudit a;
  a.H_R = h_r;
  a.I_RB = h_r + h_b - h_rb;
  a.I_RE = h_r + h_e - h_re;
  a.duality_residual = 2.0 * h_r - a.I_RB - a.I_RE;

  const cmat tau_product =
      qit::kron(cmat(cmat::Identity(n, n) / static_cast<double>(n)), rho_e.matrix());
  a.decoupling_distance = qit::trace_distance_of(rho_re.matrix(), tau_product);
  a.pinsker_slack = a.I_RE / qit::log2_e - 0.25 * a.decoupling_distance * a.decoupling_distance;

  const chan::Ensemble basis_ens = detail::output_ensemble(v, code.phi);
  const chan::Ensemble conj_ens = detail::output_ensemble(v, code.phi_hat);
  a.chi_basis = chan::holevo_chi(basis_ens);
  a.chi_conjugate = chan::holevo_chi(conj_ens);
  a.uncertainty_slack = a.I_RB - a.chi_basis - a.chi_conjugate;

  a.pgm_error_basis = classical_error(basis_ens.members(), pgm_povm(basis_ens));
  a.pgm_error_conjugate = classical_error(conj_ens.members(), pgm_povm(conj_ens));
  a.fano_bound = detail::fano_floor(code.N, a.pgm_error_basis);
  a.fano_bound_conjugate = detail::fano_floor(code.N, a.pgm_error_conjugate);

  a.duality_ok = std::abs(a.duality_residual) <= 1e-9;
  a.pinsker_ok = a.pinsker_slack >= -1e-8;
  a.uncertainty_ok = a.uncertainty_slack >= -1e-8;
  a.fano_ok = a.chi_basis >= a.fano_bound - 1e-8 &&
              a.chi_conjugate >= a.fano_bound_conjugate - 1e-8;
  return a;
}

inline InformationAudit information_audit(const codes::SubspaceCode& code,
                                          const chan::StinespringIsometry& v) {
  return information_audit(joint_state(code, v), code, v);
}

struct GentleReport {
  double epsilon = 0.0;  // tr[rho (1 - X)] / tr rho
  double lhs = 0.0;      // || rho - sqrt(X) rho sqrt(X) ||_1
  double rhs = 0.0;      // 2 sqrt(epsilon) tr rho
  double slack = 0.0;    // rhs - lhs
  bool pass = false;     // slack >= -1e-9
};

// Gentle-measurement inequality for positive semidefinite rho and 0 <= X <= I.
inline GentleReport gentle_measurement_check(const qit::PositiveOperator& rho,
                                             const qit::PositiveOperator& x) {
  if (rho.dim() != x.dim())
    throw std::invalid_argument("gentle_measurement_check: dimension mismatch");
  const rvec x_eigs = qit::hermitian_eigenvalues(x.matrix());
  if (x_eigs(x_eigs.size() - 1) > 1.0 + tol::psd)
    throw std::invalid_argument("gentle_measurement_check: X exceeds the identity");

  GentleReport r;
  const double t = rho.trace();
  if (!(t > 0.0)) throw std::invalid_argument("gentle_measurement_check: rho has zero trace");
  const double kept = (rho.matrix() * x.matrix()).trace().real();
  r.epsilon = std::clamp(1.0 - kept / t, 0.0, 1.0);
  // Cutoff 0 keeps tiny-but-positive eigenvalues: truncating them would
  // perturb sqrt(X) by ~sqrt(cutoff), far above the audited slack.
  const cmat sqrt_x = qit::operator_function(
      x.matrix(), [](double e) { return std::sqrt(std::min(e, 1.0)); }, 0.0);
  r.lhs = qit::trace_distance_of(rho.matrix(), cmat(sqrt_x * rho.matrix() * sqrt_x));
  r.rhs = 2.0 * std::sqrt(r.epsilon) * t;
  r.slack = r.rhs - r.lhs;
  r.pass = r.slack >= -1e-9;
  return r;
}

}  // namespace gausscode::decode
