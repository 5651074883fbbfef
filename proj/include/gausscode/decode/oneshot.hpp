#pragma once

// One-shot decoupling parameters: the measured preconditions of the main
// coding bound, the lambda defect, and the resulting quantum-error /
// environment-information floors. Most desk-scale instances make the bound
// vacuous (2 lambda > 1); vacuity is a first-class reported outcome, never an
// exception.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gausscode/channels/stinespring.hpp"
#include "gausscode/core.hpp"
#include "gausscode/qit/entropy.hpp"
#include "gausscode/qit/linalg.hpp"
#include "gausscode/qit/types.hpp"

namespace gausscode::decode {

struct OneShotParams {
  double epsilon = 0.0;      // truncation weight outside P_B (x) P_E
  double eta = 0.0;          // cross-term tolerance
  double D_param = 0.0;      // largest D with pinched output <= (1/D) P_B
  double Delta = 0.0;        // reciprocal max eigenvalue of the input state
  index_t rank_PE = 0;       // rank of the environment projector
  int N = 0;                 // code dimension
  double lambda = 0.0;       // 9 sqrt(eps) + 7 sqrt(eta) + 3 N exp(-N eps^2 / divisor)
  int exponent_divisor = 6;  // 6 (proof-consistent) or 4 (statement value)
};

inline double lambda_defect(double epsilon, double eta, int code_size, int divisor) {
  if (divisor != 4 && divisor != 6)
    throw std::invalid_argument("lambda_defect: exponent divisor must be 4 or 6");
  if (!(epsilon >= 0.0) || !(eta >= 0.0))
    throw std::invalid_argument("lambda_defect: need epsilon, eta >= 0");
  if (code_size < 1) throw std::invalid_argument("lambda_defect: need N >= 1");
  const double nd = static_cast<double>(code_size);
  return 9.0 * std::sqrt(epsilon) + 7.0 * std::sqrt(eta) +
         3.0 * nd * std::exp(-nd * epsilon * epsilon / static_cast<double>(divisor));
}

inline OneShotParams make_oneshot_params(double epsilon, double eta, double D_param, double Delta,
                                         index_t rank_PE, int code_size, int divisor = 6) {
  OneShotParams p;
  p.epsilon = epsilon;
  p.eta = eta;
  p.D_param = D_param;
  p.Delta = Delta;
  p.rank_PE = rank_PE;
  p.N = code_size;
  p.exponent_divisor = divisor;
  p.lambda = lambda_defect(epsilon, eta, code_size, divisor);
  return p;
}

struct OneShotBounds {
  double lambda = 0.0;
  double chi_floor = 0.0;           // log2 N - H2(2 lambda) - 2 lambda log2 N
  double q_error = 0.0;             // 2 sqrt(2 H2(2 lambda) + 4 lambda log2 N)
  double q_error_simplified = 0.0;  // 7 sqrt(log2 N) lambda^{1/4}
  bool vacuous = false;             // 2 lambda > 1: entropy-based forms undefined
  bool epsilon_in_range = false;    // epsilon <= 1/3, required by the tail bounds
  bool sizing_ok = false;           // N <= min(eta D / rank_PE, eta Delta)
};

inline OneShotBounds oneshot_bounds(const OneShotParams& p) {
  OneShotBounds b;
  b.lambda = p.lambda;
  b.epsilon_in_range = p.epsilon <= 1.0 / 3.0;
  const double cap_d = p.rank_PE > 0
                           ? p.eta * p.D_param / static_cast<double>(p.rank_PE)
                           : std::numeric_limits<double>::infinity();
  b.sizing_ok = static_cast<double>(p.N) <= std::min(cap_d, p.eta * p.Delta);
  b.vacuous = !(2.0 * p.lambda <= 1.0);
  const double log_n = std::log2(static_cast<double>(p.N));
  b.q_error_simplified = 7.0 * std::sqrt(log_n) * std::pow(p.lambda, 0.25);
  if (b.vacuous) {
    b.chi_floor = std::numeric_limits<double>::quiet_NaN();
    b.q_error = std::numeric_limits<double>::quiet_NaN();
    return b;
  }
  const double h2 = qit::binary_entropy(2.0 * p.lambda);
  b.chi_floor = log_n - h2 - 2.0 * p.lambda * log_n;
  b.q_error = 2.0 * std::sqrt(2.0 * h2 + 4.0 * p.lambda * log_n);
  return b;
}

struct OneShotPreconditions {
  double epsilon = 0.0;   // 1 - tr[(V rho V^dag)(P_B (x) P_E)]
  double D_param = 0.0;   // reciprocal max eigenvalue of P_B N(rho) P_B on supp P_B
  double Delta = 0.0;     // reciprocal max eigenvalue of rho
  index_t rank_PB = 0;
  index_t rank_PE = 0;
};

// Measures the coding-bound preconditions for a channel dilation, input state
// and a pair of output/environment projectors.
inline OneShotPreconditions oneshot_preconditions(const chan::StinespringIsometry& v,
                                                  const qit::DensityOperator& rho_tilde,
                                                  const cmat& p_b, const cmat& p_e) {
  if (rho_tilde.dim() != v.dim_in())
    throw std::invalid_argument("oneshot_preconditions: state dimension mismatch");
  if (p_b.rows() != v.dim_out() || p_b.cols() != v.dim_out())
    throw std::invalid_argument("oneshot_preconditions: P_B dimension mismatch");
  if (p_e.rows() != v.dim_env() || p_e.cols() != v.dim_env())
    throw std::invalid_argument("oneshot_preconditions: P_E dimension mismatch");

  OneShotPreconditions out;
  out.rank_PB = qit::support_projector(p_b).rank;
  out.rank_PE = qit::support_projector(p_e).rank;

  // tr[(V rho V^dag)(P_B (x) P_E)] accumulated over the eigenvectors of rho;
  // each output vector is reshaped to a dim_out x dim_env matrix so the
  // projected weight is a small sandwiched trace instead of a joint operator.
  Eigen::SelfAdjointEigenSolver<cmat> es(rho_tilde.matrix());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("oneshot_preconditions: eigendecomposition failed");
  double kept = 0.0;
  for (index_t i = 0; i < rho_tilde.dim(); ++i) {
    const double w = es.eigenvalues()(i);
    if (w <= tol::psd) continue;
    const cvec y = v.apply(cvec(es.eigenvectors().col(i)));
    using MapT =
        Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
    MapT m(y.data(), v.dim_out(), v.dim_env());
    kept += w * (m.adjoint() * p_b * m * p_e.transpose()).trace().real();
  }
  out.epsilon = std::clamp(1.0 - kept, 0.0, 1.0);

  const cmat pinched = p_b * chan::channel_output(v, rho_tilde).matrix() * p_b;
  const rvec pinched_eigs = qit::hermitian_eigenvalues(0.5 * (pinched + pinched.adjoint().eval()));
  const double max_pinched = pinched_eigs.size() > 0 ? pinched_eigs(pinched_eigs.size() - 1) : 0.0;
  out.D_param = max_pinched > tol::psd ? 1.0 / max_pinched
                                       : std::numeric_limits<double>::infinity();

  const rvec rho_eigs = qit::hermitian_eigenvalues(rho_tilde.matrix());
  out.Delta = 1.0 / rho_eigs(rho_eigs.size() - 1);
  return out;
}

struct SchmidtSupport {
  cmat projector;         // projector on B onto supp tr_E |gamma'><gamma'|
  index_t rank = 0;       // at most rank(P_E)
  bool zero_input = false;  // (1 (x) P_E) V gamma vanished
};

// Projector onto the B-support of the environment-truncated channel output of
// gamma: gamma' = (1 (x) P_E) V gamma. Its rank is at most rank(P_E).
inline SchmidtSupport schmidt_support_projector(const chan::StinespringIsometry& v,
                                                const cmat& p_e, const qit::PureState& gamma) {
  if (gamma.dim() != v.dim_in())
    throw std::invalid_argument("schmidt_support_projector: state dimension mismatch");
  if (p_e.rows() != v.dim_env() || p_e.cols() != v.dim_env())
    throw std::invalid_argument("schmidt_support_projector: P_E dimension mismatch");
  const cvec y = v.apply(gamma.amplitudes());
  using MapT =
      Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  MapT m(y.data(), v.dim_out(), v.dim_env());
  const cmat truncated = m * p_e.transpose();  // rows indexed by B, columns by E

  SchmidtSupport out;
  const double norm2 = truncated.squaredNorm();
  if (norm2 <= tol::support * tol::support) {
    out.projector = cmat::Zero(v.dim_out(), v.dim_out());
    out.rank = 0;
    out.zero_input = true;
    return out;
  }
  cmat reduced = truncated * truncated.adjoint();
  reduced = 0.5 * (reduced + reduced.adjoint().eval());
  const qit::SupportProjector supp = qit::support_projector(reduced);
  out.projector = supp.projector;
  out.rank = supp.rank;
  return out;
}

}  // namespace gausscode::decode
