#pragma once

// Deterministic random objects used by audits and tests: Ginibre matrices,
// Haar unitaries/isometries (QR with phase fixing), random pure and mixed
// states. All draw from the library generator, so streams are reproducible.

#include <stdexcept>

#include "gausscode/core.hpp"
#include "gausscode/qit/types.hpp"
#include "gausscode/rng.hpp"

namespace gausscode::qit {

// Matrix with iid standard complex normal entries (E|z|^2 = 1).
inline cmat ginibre(index_t rows, index_t cols, rng::xoshiro256pp& g) {
  cmat m(rows, cols);
  for (index_t j = 0; j < cols; ++j)
    for (index_t i = 0; i < rows; ++i) m(i, j) = rng::complex_normal(g, 1.0);
  return m;
}

// Haar-distributed isometry (rows >= cols): thin QR of a Ginibre matrix with
// the R-diagonal phases absorbed into Q.
inline cmat random_isometry(index_t rows, index_t cols, rng::xoshiro256pp& g) {
  if (rows < cols) throw std::invalid_argument("random_isometry: rows must be >= cols");
  const cmat a = ginibre(rows, cols, g);
  Eigen::HouseholderQR<cmat> qr(a);
  cmat q = qr.householderQ() * cmat::Identity(rows, cols);
  const cmat r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (index_t j = 0; j < cols; ++j) {
    const cplx d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

inline cmat random_unitary(index_t d, rng::xoshiro256pp& g) { return random_isometry(d, d, g); }

inline PureState random_pure_state(index_t d, rng::xoshiro256pp& g) {
  cvec v(d);
  for (index_t i = 0; i < d; ++i) v(i) = rng::complex_normal(g, 1.0);
  return PureState(cvec(v / v.norm()));
}

// Full-rank random density operator: normalized Wishart G G^dagger with
// `degrees` Ginibre columns (defaults to d, almost surely full rank).
inline DensityOperator random_density(index_t d, rng::xoshiro256pp& g, index_t degrees = 0) {
  if (degrees <= 0) degrees = d;
  const cmat a = ginibre(d, degrees, g);
  cmat w = a * a.adjoint();
  w /= w.trace().real();
  return DensityOperator::unchecked(0.5 * (w + cmat(w.adjoint())));
}

}  // namespace gausscode::qit
