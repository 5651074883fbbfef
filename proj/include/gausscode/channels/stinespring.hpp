#pragma once

// Channels as explicit isometric dilations V : A -> B (x) E. The channel
// output traces out E, the environment output traces out B. Rows of V are
// indexed b * dim_env + e (output-major).

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gausscode/core.hpp"
#include "gausscode/qit/entropy.hpp"
#include "gausscode/qit/linalg.hpp"
#include "gausscode/qit/types.hpp"

namespace gausscode::chan {

class StinespringIsometry {
 public:
  StinespringIsometry(cmat v, index_t dim_out, index_t dim_env)
      : v_(std::move(v)), dim_out_(dim_out), dim_env_(dim_env) {
    if (dim_out_ < 1 || dim_env_ < 1)
      throw std::invalid_argument("StinespringIsometry: output/environment dims must be >= 1");
    if (v_.rows() != dim_out_ * dim_env_)
      throw std::invalid_argument("StinespringIsometry: row count must equal dim_out * dim_env");
    if (v_.cols() < 1 || v_.cols() > v_.rows())
      throw std::invalid_argument("StinespringIsometry: need 1 <= dim_in <= dim_out * dim_env");
    const cmat gram = v_.adjoint() * v_;
    const double res = (gram - cmat::Identity(v_.cols(), v_.cols())).cwiseAbs().maxCoeff();
    if (res > tol::unitary)
      throw std::invalid_argument("StinespringIsometry: columns are not isometric, residual " +
                                  std::to_string(res));
  }

  const cmat& matrix() const { return v_; }
  index_t dim_in() const { return v_.cols(); }
  index_t dim_out() const { return dim_out_; }
  index_t dim_env() const { return dim_env_; }

  cvec apply(const cvec& psi) const {
    if (psi.size() != dim_in())
      throw std::invalid_argument("StinespringIsometry: input dimension mismatch");
    return v_ * psi;
  }

  qit::PureState apply(const qit::PureState& psi) const {
    return qit::PureState(apply(psi.amplitudes()));
  }

 private:
  cmat v_;
  index_t dim_out_;
  index_t dim_env_;
};

// Builds V |psi> = sum_i (K_i |psi>) (x) |i>_E from Kraus operators; requires
// sum_i K_i^dag K_i = 1 within the unitarity tolerance.
inline StinespringIsometry isometry_from_kraus(const std::vector<cmat>& kraus) {
  if (kraus.empty()) throw std::invalid_argument("isometry_from_kraus: empty Kraus list");
  const index_t rows = kraus.front().rows();
  const index_t cols = kraus.front().cols();
  cmat completeness = cmat::Zero(cols, cols);
  for (const cmat& k : kraus) {
    if (k.rows() != rows || k.cols() != cols)
      throw std::invalid_argument("isometry_from_kraus: inconsistent Kraus shapes");
    completeness += k.adjoint() * k;
  }
  const double res = (completeness - cmat::Identity(cols, cols)).cwiseAbs().maxCoeff();
  if (res > tol::unitary)
    throw std::invalid_argument("isometry_from_kraus: Kraus operators not complete, residual " +
                                std::to_string(res));
  const index_t dim_env = static_cast<index_t>(kraus.size());
  cmat v(rows * dim_env, cols);
  for (index_t b = 0; b < rows; ++b)
    for (std::size_t e = 0; e < kraus.size(); ++e)
      v.row(b * dim_env + static_cast<index_t>(e)) = kraus[e].row(b);
  return StinespringIsometry(std::move(v), rows, dim_env);
}

enum class ChannelFamily { identity, dephasing, depolarizing, amplitude_damping, erasure };

// Dilations of the standard zoo. `param` is the flip / depolarizing /
// damping / erasure probability as appropriate; `d` is the input dimension.
// Erasure enlarges the output to d + 1 (flag state |d>).
inline StinespringIsometry standard_channel(ChannelFamily family, index_t d, double param = 0.0) {
  if (d < 1) throw std::invalid_argument("standard_channel: dimension must be >= 1");
  const bool needs_prob = family != ChannelFamily::identity;
  if (needs_prob && !(param >= 0.0 && param <= 1.0))
    throw std::invalid_argument("standard_channel: parameter must be a probability");
  switch (family) {
    case ChannelFamily::identity: {
      // Trivial one-dimensional environment.
      return isometry_from_kraus({cmat::Identity(d, d)});
    }
    case ChannelFamily::dephasing: {
      if (d != 2) throw std::invalid_argument("standard_channel: dephasing is qubit-only");
      cmat z = cmat::Identity(2, 2);
      z(1, 1) = -1.0;
      return isometry_from_kraus(
          {std::sqrt(1.0 - param) * cmat::Identity(2, 2), std::sqrt(param) * z});
    }
    case ChannelFamily::depolarizing: {
      if (d != 2) throw std::invalid_argument("standard_channel: depolarizing is qubit-only");
      cmat x = cmat::Zero(2, 2);
      x(0, 1) = 1.0;
      x(1, 0) = 1.0;
      cmat y = cmat::Zero(2, 2);
      y(0, 1) = cplx(0.0, -1.0);
      y(1, 0) = cplx(0.0, 1.0);
      cmat z = cmat::Identity(2, 2);
      z(1, 1) = -1.0;
      const double q = param / 3.0;
      return isometry_from_kraus({std::sqrt(1.0 - param) * cmat::Identity(2, 2),
                                  std::sqrt(q) * x, std::sqrt(q) * y, std::sqrt(q) * z});
    }
    case ChannelFamily::amplitude_damping: {
      if (d != 2) throw std::invalid_argument("standard_channel: amplitude damping is qubit-only");
      cmat k0 = cmat::Identity(2, 2);
      k0(1, 1) = std::sqrt(1.0 - param);
      cmat k1 = cmat::Zero(2, 2);
      k1(0, 1) = std::sqrt(param);
      return isometry_from_kraus({k0, k1});
    }
    case ChannelFamily::erasure: {
      // Output dimension d + 1; the environment receives the complementary
      // erasure channel. V |psi> = sqrt(1-p) |psi>_B |d>_E + sqrt(p) |d>_B |psi>_E.
      const index_t dout = d + 1;
      cmat v = cmat::Zero(dout * dout, d);
      const double keep = std::sqrt(1.0 - param);
      const double lose = std::sqrt(param);
      for (index_t j = 0; j < d; ++j) {
        v(j * dout + d, j) = keep;  // |j>_B |d>_E
        v(d * dout + j, j) = lose;  // |d>_B |j>_E
      }
      return StinespringIsometry(std::move(v), dout, dout);
    }
  }
  throw std::logic_error("standard_channel: unreachable");
}

namespace detail {

// Reduced state of V|psi><psi|V^dag on the requested side, computed from the
// reshaped output vector without forming the joint projector.
inline cmat pure_output_side(const StinespringIsometry& v, const cvec& psi, bool keep_out) {
  const cvec y = v.apply(psi);
  using MapT = Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic,
                                              Eigen::RowMajor>>;
  MapT m(y.data(), v.dim_out(), v.dim_env());
  if (keep_out) return m * m.adjoint();
  return m.transpose() * m.conjugate();
}

// Sum over eigenvectors of rho, skipping negligible weights.
inline cmat mixed_output_side(const StinespringIsometry& v, const qit::DensityOperator& rho,
                              bool keep_out) {
  if (rho.dim() != v.dim_in())
    throw std::invalid_argument("channel output: state dimension mismatch");
  Eigen::SelfAdjointEigenSolver<cmat> es(rho.matrix());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("channel output: eigendecomposition failed");
  const index_t side = keep_out ? v.dim_out() : v.dim_env();
  cmat acc = cmat::Zero(side, side);
  for (index_t i = 0; i < rho.dim(); ++i) {
    const double w = es.eigenvalues()(i);
    if (w <= tol::psd) continue;
    acc += w * pure_output_side(v, es.eigenvectors().col(i), keep_out);
  }
  return acc;
}

}  // namespace detail

inline qit::DensityOperator channel_output(const StinespringIsometry& v,
                                           const qit::DensityOperator& rho) {
  cmat out = detail::mixed_output_side(v, rho, true);
  out = 0.5 * (out + out.adjoint().eval());
  return qit::DensityOperator::unchecked(std::move(out));
}

inline qit::DensityOperator environment_output(const StinespringIsometry& v,
                                               const qit::DensityOperator& rho) {
  cmat out = detail::mixed_output_side(v, rho, false);
  out = 0.5 * (out + out.adjoint().eval());
  return qit::DensityOperator::unchecked(std::move(out));
}

inline qit::DensityOperator channel_output(const StinespringIsometry& v,
                                           const qit::PureState& psi) {
  cmat out = detail::pure_output_side(v, psi.normalized().amplitudes(), true);
  out = 0.5 * (out + out.adjoint().eval());
  return qit::DensityOperator::unchecked(std::move(out));
}

inline qit::DensityOperator environment_output(const StinespringIsometry& v,
                                               const qit::PureState& psi) {
  cmat out = detail::pure_output_side(v, psi.normalized().amplitudes(), false);
  out = 0.5 * (out + out.adjoint().eval());
  return qit::DensityOperator::unchecked(std::move(out));
}

// I_c(rho, N) = H(B) - H(E) evaluated on the dilation outputs; equals
// H(B) - H(AB) of the channel applied to half of a purification of rho.
inline double coherent_information_channel(const qit::DensityOperator& rho,
                                           const StinespringIsometry& v) {
  return qit::entropy(channel_output(v, rho)) - qit::entropy(environment_output(v, rho));
}

// n-fold tensor power with outputs grouped as B^n (x) E^n (not interleaved).
// Row (b_1..b_n, e_1..e_n) of the result is prod_k V(b_k e_k, a_k).
inline StinespringIsometry tensor_power(const StinespringIsometry& v, int n) {
  if (n < 1) throw std::invalid_argument("tensor_power: need n >= 1");
  const index_t da = v.dim_in();
  const index_t db = v.dim_out();
  const index_t de = v.dim_env();
  double dense = 1.0;
  for (int k = 0; k < n; ++k) dense *= static_cast<double>(db * de);
  if (dense > static_cast<double>(1 << 18))
    throw std::invalid_argument("tensor_power: joint output dimension exceeds the dense cap");

  index_t da_n = 1, db_n = 1, de_n = 1;
  for (int k = 0; k < n; ++k) {
    da_n *= da;
    db_n *= db;
    de_n *= de;
  }
  cmat out(db_n * de_n, da_n);
  std::vector<index_t> as(static_cast<std::size_t>(n)), bs(as.size()), es(as.size());
  for (index_t col = 0; col < da_n; ++col) {
    index_t rem = col;
    for (int k = n - 1; k >= 0; --k) {
      as[static_cast<std::size_t>(k)] = rem % da;
      rem /= da;
    }
    for (index_t rb = 0; rb < db_n; ++rb) {
      index_t r = rb;
      for (int k = n - 1; k >= 0; --k) {
        bs[static_cast<std::size_t>(k)] = r % db;
        r /= db;
      }
      for (index_t re = 0; re < de_n; ++re) {
        index_t q = re;
        for (int k = n - 1; k >= 0; --k) {
          es[static_cast<std::size_t>(k)] = q % de;
          q /= de;
        }
        cplx prod(1.0, 0.0);
        for (int k = 0; k < n && prod != cplx(0.0, 0.0); ++k) {
          const std::size_t kk = static_cast<std::size_t>(k);
          prod *= v.matrix()(bs[kk] * de + es[kk], as[kk]);
        }
        out(rb * de_n + re, col) = prod;
      }
    }
  }
  return StinespringIsometry(std::move(out), db_n, de_n);
}

}  // namespace gausscode::chan
