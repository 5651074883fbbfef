#pragma once

// Random subspace codes. From N iid Gaussian seed vectors g_j the
// construction forms distorted vectors gamma_j = sqrt(D rho) g_j, their frame
// operator Gamma = sum_j |gamma_j><gamma_j|, and the orthonormal decoding
// basis phi_j = Gamma^{-1/2} gamma_j (square-root measurement
// orthogonalization). The conjugate basis phi_hat is the Fourier transform of
// the phi family; because Gamma^{-1/2} is linear, it equals the
// orthogonalization of the Fourier-transformed distorted family.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "gausscode/core.hpp"
#include "gausscode/gaussian/sampler.hpp"
#include "gausscode/qit/linalg.hpp"
#include "gausscode/qit/types.hpp"

namespace gausscode::codes {

// States are stored as matrix columns: g, gamma, phi, phi_hat are
// ambient_dim x N with column j holding the j-th vector.
struct SubspaceCode {
  int N = 0;                 // number of codewords
  index_t ambient_dim = 0;   // dimension carrying the input state
  std::uint64_t seed = 0;    // RNG seed that produced the draw
  cmat rho_tilde;            // input state the distortion is built from
  cmat g;                    // Gaussian seed vectors
  cmat gamma;                // distorted vectors sqrt(ambient_dim * rho_tilde) g_j
  cmat Gamma;                // frame operator gamma * gamma^dag
  cmat phi;                  // orthonormal decoding basis
  cmat phi_hat;              // Fourier-conjugate decoding basis
  index_t support_rank = 0;  // rank of Gamma
};

// Draws the code. Requires 1 <= N <= rank(rho_tilde); the Gaussian draw makes
// Gamma rank-deficient on the codeword span with probability zero, but a
// numerically degenerate draw (fewer than N eigenvalues of Gamma above the
// relative support cutoff) raises degenerate_code_error carrying the seed so
// harnesses can isolate and reseed.
inline SubspaceCode build_random_code(const qit::DensityOperator& rho_tilde, int code_size,
                                      std::uint64_t seed) {
  const index_t d = rho_tilde.dim();
  if (code_size < 1) throw std::invalid_argument("build_random_code: need N >= 1");

  const qit::SupportProjector supp = qit::support_projector(rho_tilde.matrix());
  if (static_cast<index_t>(code_size) > supp.rank)
    throw std::invalid_argument("build_random_code: N exceeds the rank of the input state");

  SubspaceCode code;
  code.N = code_size;
  code.ambient_dim = d;
  code.seed = seed;
  code.rho_tilde = rho_tilde.matrix();

  gauss::GaussianSampler sampler(d, seed);
  code.g.resize(d, code_size);
  for (int j = 0; j < code_size; ++j) code.g.col(j) = sampler.sample_vector();

  const cmat distort = qit::operator_function(
      code.rho_tilde, [d](double x) { return std::sqrt(static_cast<double>(d) * x); });
  code.gamma = distort * code.g;

  code.Gamma = code.gamma * code.gamma.adjoint();
  code.Gamma = 0.5 * (code.Gamma + code.Gamma.adjoint().eval());

  const qit::SupportProjector gamma_supp = qit::support_projector(code.Gamma);
  code.support_rank = gamma_supp.rank;
  if (code.support_rank < static_cast<index_t>(code_size))
    throw degenerate_code_error(seed, "build_random_code: Gamma has rank " +
                                          std::to_string(code.support_rank) + " < N = " +
                                          std::to_string(code_size));

  code.phi = qit::matrix_invsqrt(code.Gamma) * code.gamma;
  code.phi_hat = gauss::fourier_conjugate_family(code.phi);
  return code;
}

// S_jk = <gamma_j | gamma_k>. Its nonzero spectrum coincides with the
// nonzero spectrum of Gamma.
inline cmat gram_matrix(const SubspaceCode& code) {
  cmat s = code.gamma.adjoint() * code.gamma;
  return 0.5 * (s + s.adjoint().eval());
}

// Trace norm of |u><u| - |v><v| in closed form: the difference is traceless
// plus a rank-two piece on span{u, v}, with eigenvalue discriminant
// (|u|^2 - |v|^2)^2 + 4 (|u|^2 |v|^2 - |<u|v>|^2).
inline double rank_one_pair_trace_norm(const cvec& u, const cvec& v) {
  const double a = u.squaredNorm();
  const double b = v.squaredNorm();
  const double c2 = std::norm(u.dot(v));
  const double disc = (a - b) * (a - b) + 4.0 * (a * b - c2);
  return std::sqrt(std::max(disc, 0.0));
}

struct CodeDiagnostics {
  double min_length = 0.0;        // min_j S_jj
  double max_length = 0.0;        // max_j S_jj
  double max_cross_sum = 0.0;     // max_j sum_{k != j} |S_jk|^2
  cmat gram;                      // S
  double epsilon = 0.0;           // length tolerance used
  double eta = 0.0;               // cross-term tolerance used
  double perturbation_avg = 0.0;  // (1/N) sum_j (1/2) || phi_j phi_j^dag - gamma_j gamma_j^dag ||_1
  double overlap_gap_avg = 0.0;   // (1/N) sum_j (1 - <phi_j|gamma_j>)
  double upper2_avg = 0.0;        // epsilon + 1 - (1/N) tr sqrt(Gamma)
  double bound_value = 0.0;       // 3 sqrt(epsilon) + 3 sqrt(eta)
  bool length_ok = false;         // all S_jj within [1 - epsilon, 1 + epsilon]
  bool cross_ok = false;          // max_cross_sum <= (1 + epsilon)^2 eta
  bool qualifies = false;         // length_ok && cross_ok && epsilon <= 1/3
  bool bound_holds = false;       // perturbation_avg <= bound_value
};

// Audits the basis-vs-distorted perturbation against its closed-form bound
// for tolerance parameters (epsilon, eta). Reports violations through flags;
// a failed inequality is data, not an error, so nothing here throws on one.
inline CodeDiagnostics code_diagnostics(const SubspaceCode& code, double epsilon, double eta) {
  if (!(epsilon >= 0.0) || !(eta >= 0.0))
    throw std::invalid_argument("code_diagnostics: tolerances must be nonnegative");
  CodeDiagnostics d;
  d.epsilon = epsilon;
  d.eta = eta;
  d.gram = gram_matrix(code);
  const index_t n = d.gram.rows();

  d.min_length = std::numeric_limits<double>::infinity();
  d.max_length = 0.0;
  d.max_cross_sum = 0.0;
  for (index_t j = 0; j < n; ++j) {
    const double len = d.gram(j, j).real();
    d.min_length = std::min(d.min_length, len);
    d.max_length = std::max(d.max_length, len);
    double cross = 0.0;
    for (index_t k = 0; k < n; ++k)
      if (k != j) cross += std::norm(d.gram(j, k));
    d.max_cross_sum = std::max(d.max_cross_sum, cross);
  }

  double pert = 0.0;
  double overlap = 0.0;
  for (index_t j = 0; j < n; ++j) {
    pert += 0.5 * rank_one_pair_trace_norm(code.phi.col(j), code.gamma.col(j));
    overlap += 1.0 - (code.phi.col(j).dot(code.gamma.col(j))).real();
  }
  d.perturbation_avg = pert / static_cast<double>(n);
  d.overlap_gap_avg = overlap / static_cast<double>(n);

  const cmat sqrt_gamma = qit::matrix_sqrt(code.Gamma);
  d.upper2_avg = epsilon + 1.0 - sqrt_gamma.trace().real() / static_cast<double>(n);

  d.bound_value = 3.0 * std::sqrt(epsilon) + 3.0 * std::sqrt(eta);
  d.length_ok = d.min_length >= 1.0 - epsilon && d.max_length <= 1.0 + epsilon;
  d.cross_ok = d.max_cross_sum <= (1.0 + epsilon) * (1.0 + epsilon) * eta;
  d.qualifies = d.length_ok && d.cross_ok && epsilon <= 1.0 / 3.0;
  d.bound_holds = d.perturbation_avg <= d.bound_value;
  return d;
}

// Smallest tolerances this draw satisfies: epsilon = max_j |S_jj - 1| and
// eta = max_j sum_{k != j} |S_jk|^2 / (1 + epsilon)^2.
inline std::pair<double, double> measured_epsilon_eta(const SubspaceCode& code) {
  const cmat s = gram_matrix(code);
  double eps = 0.0;
  double cross = 0.0;
  for (index_t j = 0; j < s.rows(); ++j) {
    eps = std::max(eps, std::abs(s(j, j).real() - 1.0));
    double c = 0.0;
    for (index_t k = 0; k < s.cols(); ++k)
      if (k != j) c += std::norm(s(j, k));
    cross = std::max(cross, c);
  }
  // Round outward so the returned eta certifies the cross-term gate it came
  // from: the division can lose the last ulp of cross / (1 + eps)^2.
  const double eta = cross / ((1.0 + eps) * (1.0 + eps));
  return {eps, std::nextafter(eta, std::numeric_limits<double>::infinity())};
}

struct ConjugateConsistency {
  double distorted_residual = 0.0;  // distortion applied to Fourier seeds vs Fourier of gamma
  double gram_residual = 0.0;       // frame operator of the conjugate family vs Gamma
  double basis_residual = 0.0;      // Gamma^{-1/2} gamma_hat vs stored phi_hat
  bool pass = false;
};

// Checks that conjugation and construction commute: distorting the Fourier
// seeds equals Fourier-transforming the distorted family, the conjugate
// family reproduces the same frame operator Gamma, and the stored conjugate
// basis equals the orthogonalization of the conjugate family.
inline ConjugateConsistency conjugate_consistency(const SubspaceCode& code,
                                                  double tolerance = 1e-10) {
  ConjugateConsistency r;
  const cmat distort = qit::operator_function(code.rho_tilde, [&](double x) {
    return std::sqrt(static_cast<double>(code.ambient_dim) * x);
  });
  const cmat gamma_hat = gauss::fourier_conjugate_family(code.gamma);
  r.distorted_residual =
      (distort * gauss::fourier_conjugate_family(code.g) - gamma_hat).cwiseAbs().maxCoeff();
  r.gram_residual = (gamma_hat * gamma_hat.adjoint() - code.Gamma).cwiseAbs().maxCoeff();
  r.basis_residual =
      (qit::matrix_invsqrt(code.Gamma) * gamma_hat - code.phi_hat).cwiseAbs().maxCoeff();
  r.pass = r.distorted_residual <= tolerance && r.gram_residual <= tolerance &&
           r.basis_residual <= tolerance;
  return r;
}

// Isometry |j> -> phi_j from C^N into the ambient space. Composing with the
// Fourier matrix on the input register maps |k> to phi_hat_k.
inline cmat encoder_isometry(const SubspaceCode& code) {
  const cmat& u = code.phi;
  const cmat gram = u.adjoint() * u;
  const double res = (gram - cmat::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
  if (res > tol::unitary)
    throw degenerate_code_error(code.seed,
                                "encoder_isometry: decoding basis is not orthonormal, residual " +
                                    std::to_string(res));
  return u;
}

}  // namespace gausscode::codes
