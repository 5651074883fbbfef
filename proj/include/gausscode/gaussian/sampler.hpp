#pragma once

// Complex Gaussian vector sampling and formal Fourier-conjugate families.
// A sampled vector has D iid N_C(0, 1/D) coefficients, so its squared length
// concentrates at 1; conjugate families are the unnormalized DFT combinations.

#include <stdexcept>
#include <vector>

#include "gausscode/core.hpp"
#include "gausscode/qit/linalg.hpp"
#include "gausscode/qit/types.hpp"
#include "gausscode/rng.hpp"

namespace gausscode::gauss {

class GaussianSampler {
 public:
  GaussianSampler(index_t ambient_dim, std::uint64_t seed)
      : dim_(ambient_dim), gen_(seed) {
    if (dim_ < 1) throw std::invalid_argument("GaussianSampler: dimension must be >= 1");
  }

  index_t dim() const { return dim_; }

  // One coefficient, N_C(0, 1/D).
  cplx coefficient() { return rng::complex_normal(gen_, 1.0 / static_cast<double>(dim_)); }

  cvec sample_vector() {
    cvec v(dim_);
    for (index_t i = 0; i < dim_; ++i) v(i) = coefficient();
    return v;
  }

  qit::PureState sample() { return qit::PureState(sample_vector()); }

 private:
  index_t dim_;
  rng::xoshiro256pp gen_;
};

inline qit::PureState sample_gaussian_vector(GaussianSampler& sampler) { return sampler.sample(); }

// w_k = (1/sqrt(N)) sum_j exp(2 pi i j k / N) v_j for the columns of `family`.
// With the symmetric unitary DFT matrix F this is family * F; applying the
// adjoint transform recovers the originals.
inline cmat fourier_conjugate_family(const cmat& family) {
  if (family.cols() < 1) throw std::invalid_argument("fourier_conjugate_family: empty family");
  return family * qit::fourier_matrix(family.cols());
}

inline std::vector<qit::PureState> fourier_conjugate_family(
    const std::vector<qit::PureState>& family) {
  if (family.empty()) throw std::invalid_argument("fourier_conjugate_family: empty family");
  const index_t d = family.front().dim();
  cmat m(d, static_cast<index_t>(family.size()));
  for (std::size_t j = 0; j < family.size(); ++j) {
    if (family[j].dim() != d)
      throw std::invalid_argument("fourier_conjugate_family: mixed ambient dimensions");
    m.col(static_cast<index_t>(j)) = family[j].amplitudes();
  }
  const cmat w = fourier_conjugate_family(m);
  std::vector<qit::PureState> out;
  out.reserve(family.size());
  for (index_t k = 0; k < w.cols(); ++k) out.emplace_back(cvec(w.col(k)));
  return out;
}

}  // namespace gausscode::gauss
