#pragma once

// Reduction of an iid channel-coding problem to a one-shot instance: truncate
// the n-fold input to its typical subspace, build typical projectors on the
// n-fold output and environment, and measure the one-shot preconditions.
//
// The problem is specified by a single-copy tripartite pure state
// psi on A (x) B (x) E (reference, channel output, environment). The
// effective channel V: supp(psi^A) -> B (x) E is recovered from the state's
// Schmidt data: column i of V is (<a_i| (x) 1) |psi> / sqrt(lambda_i) for the
// eigenpairs (lambda_i, a_i) of psi^A. Because the input truncation projector
// is a spectral projector of rho^{(x)n}, truncating the reference of the
// n-fold purification is the same operation expressed in the effective basis.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gausscode/channels/stinespring.hpp"
#include "gausscode/core.hpp"
#include "gausscode/decode/oneshot.hpp"
#include "gausscode/qit/entropy.hpp"
#include "gausscode/qit/linalg.hpp"
#include "gausscode/qit/types.hpp"
#include "gausscode/typicality/typical.hpp"

namespace gausscode::typ {

// (1_A (x) V) |purify(rho)>, the single-copy tripartite state of an input
// used on a channel; the reference factor comes first.
inline qit::PureState single_copy_state(const chan::StinespringIsometry& v,
                                        const qit::DensityOperator& rho) {
  if (rho.dim() != v.dim_in())
    throw std::invalid_argument("single_copy_state: state dimension mismatch");
  const qit::PureState phi = qit::purify(rho);
  const index_t da = rho.dim();
  const index_t dout = v.dim_out() * v.dim_env();
  cvec psi(da * dout);
  for (index_t a = 0; a < da; ++a)
    psi.segment(a * dout, dout) = v.apply(cvec(phi.amplitudes().segment(a * da, da)));
  return qit::PureState(std::move(psi));
}

struct IidReduction {
  qit::DensityOperator rho_tilde;       // truncated input, expressed on A_delta
  chan::StinespringIsometry channel_n;  // n-fold effective channel restricted to A_delta
  cmat P_B;                             // typical projector on B^n
  cmat P_E;                             // typical projector on E^n
  decode::OneShotPreconditions measured;  // epsilon_actual, D, Delta, ranks
  int n = 0;
  double delta = 0.0;
  double H_A = 0.0, H_B = 0.0, H_E = 0.0;  // single-copy entropies, bits
  double coherent_info = 0.0;              // H_B - H_E
  // Recipe-side parameter fragment: D = 2^{n(H(B)-delta)}, Delta =
  // 2^{n(H(A)-delta)}, rank_PE <= 2^{n(H(E)+delta)} by the dimension bound.
  double D_recipe = 0.0;
  double Delta_recipe = 0.0;
  double recipe_N_real = 0.0;              // 2^{n (coherent_info - 3 delta)}
  long recipe_N = 0;                       // floor of the above
  unsigned long long max_constructible_N = 0;  // rank of rho_tilde = |A_delta|

  IidReduction(qit::DensityOperator rt, chan::StinespringIsometry cn)
      : rho_tilde(std::move(rt)), channel_n(std::move(cn)) {}
};

namespace detail {

// Indices of sequences over {0..d-1}^n whose counts the projector accepts,
// in lexicographic sequence order.
inline std::vector<index_t> typical_sequence_indices(const TypicalProjector& proj, int d, int n) {
  index_t total = 1;
  for (int k = 0; k < n; ++k) total *= d;
  std::vector<index_t> kept;
  std::vector<int> counts(static_cast<std::size_t>(d));
  for (index_t s = 0; s < total; ++s) {
    std::fill(counts.begin(), counts.end(), 0);
    index_t rem = s;
    for (int k = 0; k < n; ++k) {
      ++counts[static_cast<std::size_t>(rem % d)];
      rem /= d;
    }
    if (proj.contains_counts(counts)) kept.push_back(s);
  }
  return kept;
}

// Dense typical projector on the n-fold space of `marginal`, built in its
// eigenbasis: sum over typical sequences of the product eigenvector dyads.
inline cmat dense_typical_projector(const cmat& marginal, int n, double delta) {
  Eigen::SelfAdjointEigenSolver<cmat> es(marginal);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("iid_reduction: marginal eigendecomposition failed");
  const int d = static_cast<int>(marginal.rows());
  rvec spectrum = es.eigenvalues().cwiseMax(0.0);
  spectrum /= spectrum.sum();
  TypicalProjector proj(spectrum, n, delta);
  const std::vector<index_t> kept = typical_sequence_indices(proj, d, n);

  index_t dn = 1;
  for (int k = 0; k < n; ++k) dn *= d;
  cmat p = cmat::Zero(dn, dn);
  cvec prod(dn);
  for (index_t s : kept) {
    // Product eigenvector for sequence s, most significant letter first.
    std::vector<int> letters(static_cast<std::size_t>(n));
    index_t rem = s;
    for (int k = n - 1; k >= 0; --k) {
      letters[static_cast<std::size_t>(k)] = static_cast<int>(rem % d);
      rem /= d;
    }
    for (index_t row = 0; row < dn; ++row) {
      cplx amp(1.0, 0.0);
      index_t rr = row;
      for (int k = n - 1; k >= 0; --k) {
        amp *= es.eigenvectors()(rr % d, letters[static_cast<std::size_t>(k)]);
        rr /= d;
      }
      prod(row) = amp;
    }
    p.noalias() += prod * prod.adjoint();
  }
  return p;
}

}  // namespace detail

// Builds the one-shot instance for psi^{(x)n} truncated at delta-typicality.
// `split` gives the single-copy factor dimensions (A, B, E).
inline IidReduction iid_reduction(const qit::PureState& psi_abe, const qit::SystemSplit& split,
                                  int n, double delta) {
  if (split.factors() != 3)
    throw std::invalid_argument("iid_reduction: split must have three factors");
  if (psi_abe.dim() != split.dim())
    throw std::invalid_argument("iid_reduction: state dimension mismatch");
  if (n < 1) throw std::invalid_argument("iid_reduction: need n >= 1");
  const index_t da = split.dim_of(0);
  const index_t db = split.dim_of(1);
  const index_t de = split.dim_of(2);
  double dense = 1.0;
  for (int k = 0; k < n; ++k) dense *= static_cast<double>(db * de);
  if (dense > static_cast<double>(1 << 18))
    throw std::invalid_argument("iid_reduction: joint output dimension exceeds the dense cap");

  const cvec psi = psi_abe.normalized().amplitudes();
  const std::vector<index_t> dims = {da, db, de};

  // Effective channel from the Schmidt data of the reference marginal.
  const cmat rho_a = qit::pure_partial_trace(psi, dims, {0});
  Eigen::SelfAdjointEigenSolver<cmat> es(rho_a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("iid_reduction: reference eigendecomposition failed");
  const double max_eig = es.eigenvalues().maxCoeff();
  if (!(max_eig > 0.0))
    throw std::invalid_argument("iid_reduction: reference marginal has no support");
  std::vector<index_t> support;
  for (index_t i = da; i-- > 0;)  // descending eigenvalue order
    if (es.eigenvalues()(i) > tol::support * max_eig) support.push_back(i);
  const index_t rank = static_cast<index_t>(support.size());

  using MapT =
      Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  MapT m_a(psi.data(), da, db * de);
  rvec lambda(rank);
  cmat v_eff(db * de, rank);
  for (index_t i = 0; i < rank; ++i) {
    lambda(i) = es.eigenvalues()(support[static_cast<std::size_t>(i)]);
    v_eff.col(i) = m_a.transpose() *
                   es.eigenvectors().col(support[static_cast<std::size_t>(i)]).conjugate() /
                   std::sqrt(lambda(i));
  }
  lambda /= lambda.sum();

  // Typical data on the input spectrum.
  const TypicalProjector proj_a(lambda, n, delta);
  const std::vector<index_t> kept =
      detail::typical_sequence_indices(proj_a, static_cast<int>(rank), n);
  if (kept.empty())
    throw std::invalid_argument("iid_reduction: typical input subspace is empty at this (n, delta)");
  if (static_cast<double>(kept.size()) > static_cast<double>(1 << 12))
    throw std::invalid_argument("iid_reduction: typical input subspace exceeds the dense cap");

  // Truncated input state, diagonal on A_delta in the product eigenbasis.
  double kept_weight = 0.0;
  std::vector<double> seq_prob(kept.size());
  for (std::size_t s = 0; s < kept.size(); ++s) {
    double p = 1.0;
    index_t rem = kept[s];
    for (int k = 0; k < n; ++k) {
      p *= lambda(rem % rank);
      rem /= rank;
    }
    seq_prob[s] = p;
    kept_weight += p;
  }
  cmat rho_tilde_m = cmat::Zero(static_cast<index_t>(kept.size()),
                                static_cast<index_t>(kept.size()));
  for (std::size_t s = 0; s < kept.size(); ++s)
    rho_tilde_m(static_cast<index_t>(s), static_cast<index_t>(s)) = seq_prob[s] / kept_weight;

  // n-fold effective channel restricted to A_delta, outputs grouped B^n, E^n.
  index_t db_n = 1, de_n = 1;
  for (int k = 0; k < n; ++k) {
    db_n *= db;
    de_n *= de;
  }
  cmat v_n(db_n * de_n, static_cast<index_t>(kept.size()));
  std::vector<index_t> letters(static_cast<std::size_t>(n));
  for (std::size_t s = 0; s < kept.size(); ++s) {
    index_t rem = kept[s];
    for (int k = n - 1; k >= 0; --k) {
      letters[static_cast<std::size_t>(k)] = rem % rank;
      rem /= rank;
    }
    // letters are most-significant-first after the reversal above.
    for (index_t rb = 0; rb < db_n; ++rb) {
      index_t bk = rb;
      std::vector<index_t> bs(static_cast<std::size_t>(n));
      for (int k = n - 1; k >= 0; --k) {
        bs[static_cast<std::size_t>(k)] = bk % db;
        bk /= db;
      }
      for (index_t re = 0; re < de_n; ++re) {
        index_t ek = re;
        cplx amp(1.0, 0.0);
        for (int k = n - 1; k >= 0 && amp != cplx(0.0, 0.0); --k) {
          const index_t e_k = ek % de;
          ek /= de;
          amp *= v_eff(bs[static_cast<std::size_t>(k)] * de + e_k,
                       letters[static_cast<std::size_t>(k)]);
        }
        v_n(rb * de_n + re, static_cast<index_t>(s)) = amp;
      }
    }
  }

  IidReduction red(qit::DensityOperator::unchecked(std::move(rho_tilde_m)),
                   chan::StinespringIsometry(std::move(v_n), db_n, de_n));
  red.n = n;
  red.delta = delta;
  red.max_constructible_N = proj_a.subspace_dim();

  const cmat rho_b = qit::pure_partial_trace(psi, dims, {1});
  const cmat rho_e = qit::pure_partial_trace(psi, dims, {2});
  red.H_A = qit::entropy_of(rho_a);
  red.H_B = qit::entropy_of(rho_b);
  red.H_E = qit::entropy_of(rho_e);
  red.coherent_info = red.H_B - red.H_E;
  red.P_B = detail::dense_typical_projector(rho_b, n, delta);
  red.P_E = detail::dense_typical_projector(rho_e, n, delta);

  red.measured = decode::oneshot_preconditions(red.channel_n, red.rho_tilde, red.P_B, red.P_E);
  red.D_recipe = std::exp2(static_cast<double>(n) * (red.H_B - delta));
  red.Delta_recipe = std::exp2(static_cast<double>(n) * (red.H_A - delta));
  red.recipe_N_real = std::exp2(static_cast<double>(n) * (red.coherent_info - 3.0 * delta));
  red.recipe_N = red.recipe_N_real > 9e18 ? std::numeric_limits<long>::max()
                                          : static_cast<long>(std::floor(red.recipe_N_real));
  return red;
}

inline IidReduction iid_reduction(const chan::StinespringIsometry& v,
                                  const qit::DensityOperator& rho, int n, double delta) {
  const qit::SystemSplit split({rho.dim(), v.dim_out(), v.dim_env()});
  return iid_reduction(single_copy_state(v, rho), split, n, delta);
}

}  // namespace gausscode::typ
