#pragma once

// Shared scalar aliases, numeric tolerances and error types.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gausscode {

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;
using index_t = Eigen::Index;

template <typename Scalar>
using MatrixC = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorC = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

// Numeric tolerances used by type validation and the spectral calculus.
// `support` and `unitary` are relative to the largest eigenvalue / applied to
// residual maxima; `psd` is the absolute floor below which an eigenvalue is a
// genuine negativity rather than roundoff.
namespace tol {
inline constexpr double hermitian = 1e-9;
inline constexpr double trace = 1e-9;
inline constexpr double psd = 1e-10;
inline constexpr double support = 1e-10;
inline constexpr double unitary = 1e-10;
inline constexpr double orthonormal = 1e-8;
}  // namespace tol

// Raised when a sampled code's frame operator is numerically rank-deficient,
// i.e. the N sampled vectors do not span an N-dimensional subspace at the
// support cutoff. Carries the offending seed so the draw can be replayed.
class degenerate_code_error : public std::runtime_error {
 public:
  degenerate_code_error(std::uint64_t seed, const std::string& what)
      : std::runtime_error(what + " (seed " + std::to_string(seed) + ")"), seed_(seed) {}
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

inline constexpr const char* library_version = "0.1.0";

}  // namespace gausscode
