// Linear-algebra kernel, typed states, entropies, and random-object sampling.

#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "gausscode/qit/entropy.hpp"
#include "gausscode/qit/linalg.hpp"
#include "gausscode/qit/random.hpp"
#include "gausscode/qit/types.hpp"
#include "gausscode/rng.hpp"

using namespace gausscode;
using doctest::Approx;

namespace {
const cplx I_UNIT(0.0, 1.0);

cmat pauli_x() {
  cmat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

cmat pauli_z() {
  cmat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace

TEST_CASE("kron matches the hand-computed sigma_x (x) sigma_z") {
  const cmat k = qit::kron(pauli_x(), pauli_z());
  CHECK(k.rows() == 4);
  CHECK(k(0, 2).real() == Approx(1.0));
  CHECK(k(1, 3).real() == Approx(-1.0));
  CHECK(k(2, 0).real() == Approx(1.0));
  CHECK(k(3, 1).real() == Approx(-1.0));
  CHECK(k.cwiseAbs().sum() == Approx(4.0));
}

TEST_CASE("fourier_matrix is unitary with the expected entries") {
  const cmat f = qit::fourier_matrix(4);
  CHECK((f.adjoint() * f - cmat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
  // F(j,k) = exp(+2 pi i j k / n) / sqrt(n)
  CHECK(std::abs(f(1, 1) - I_UNIT * 0.5) < 1e-14);
  CHECK(std::abs(f(1, 2) - cplx(-0.5, 0.0)) < 1e-14);
  CHECK(std::abs(f(0, 3) - cplx(0.5, 0.0)) < 1e-14);
}

TEST_CASE("partial trace of a product operator factorizes") {
  rng::xoshiro256pp g(11);
  const cmat a = qit::random_density(3, g).matrix();
  const cmat b = qit::random_density(4, g).matrix();
  const cmat ab = qit::kron(a, b);
  const cmat ta = qit::partial_trace(ab, {3, 4}, std::vector<int>{0});
  const cmat tb = qit::partial_trace(ab, {3, 4}, std::vector<int>{1});
  CHECK((ta - a).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((tb - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pure partial trace handles non-contiguous keep sets") {
  rng::xoshiro256pp g(12);
  const qit::PureState psi = qit::random_pure_state(2 * 3 * 2, g);
  const qit::SystemSplit split({2, 3, 2});
  const cmat direct = qit::partial_trace(psi.projector(), {2, 3, 2}, std::vector<int>{0, 2});
  const cmat fast = qit::pure_partial_trace(psi.amplitudes(), {2, 3, 2}, {0, 2});
  CHECK((direct - fast).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(fast.trace().real() == Approx(1.0));
}

TEST_CASE("maximally entangled state has maximally mixed marginals") {
  const qit::PureState phi = qit::maximally_entangled(5);
  const cmat m = qit::pure_partial_trace(phi.amplitudes(), {5, 5}, {0});
  CHECK((m - cmat::Identity(5, 5) / 5.0).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("purification traces back to the original state") {
  rng::xoshiro256pp g(13);
  const qit::DensityOperator rho = qit::random_density(6, g);
  const qit::PureState psi = qit::purify(rho);
  CHECK(psi.dim() == 36);
  const cmat back = qit::pure_partial_trace(psi.amplitudes(), {6, 6}, {1});
  CHECK((back - rho.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("operator square root and inverse square root") {
  rng::xoshiro256pp g(14);
  const cmat a = qit::random_density(5, g).matrix() * 5.0;
  const cmat r = qit::matrix_sqrt(a);
  CHECK((r * r - a).cwiseAbs().maxCoeff() < 1e-10);
  const cmat ri = qit::matrix_invsqrt(a);
  CHECK((ri * a * ri - cmat::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("operator_function clamps tiny negatives and rejects deep ones") {
  cmat m = cmat::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1e-12;  // within the PSD tolerance: clamped to zero
  const cmat r = qit::operator_function(m, [](double x) { return std::sqrt(x); });
  CHECK(r(1, 1).real() == Approx(0.0));
  m(1, 1) = -1e-3;
  CHECK_THROWS(qit::operator_function(m, [](double x) { return std::sqrt(x); }));
}

TEST_CASE("support projector rank and annihilation") {
  cmat m = cmat::Zero(4, 4);
  m(0, 0) = 2.0;
  m(2, 2) = 1e-3;
  const qit::SupportProjector sp = qit::support_projector(m);
  CHECK(sp.rank == 2);
  CHECK((sp.projector * m - m).cwiseAbs().maxCoeff() < 1e-12);
  const qit::SupportProjector zero = qit::support_projector(cmat::Zero(3, 3));
  CHECK(zero.rank == 0);
  CHECK(zero.projector.cwiseAbs().maxCoeff() == Approx(0.0));
}

TEST_CASE("entropy of diag(0.2, 0.8) equals the binary entropy") {
  cmat rho = cmat::Zero(2, 2);
  rho(0, 0) = 0.2;
  rho(1, 1) = 0.8;
  CHECK(qit::entropy_of(rho) == Approx(0.7219280948873623).epsilon(1e-12));
  CHECK(qit::binary_entropy(0.2) == Approx(0.7219280948873623).epsilon(1e-12));
  CHECK(qit::binary_entropy(0.1) == Approx(0.4689955935892812).epsilon(1e-12));
  CHECK(qit::binary_entropy(0.0) == Approx(0.0));
  CHECK(qit::binary_entropy(0.5) == Approx(1.0));
  CHECK_THROWS(qit::binary_entropy(-0.01));
  CHECK_THROWS(qit::binary_entropy(1.01));
}

TEST_CASE("entropy extremes: pure states and the maximally mixed state") {
  rng::xoshiro256pp g(15);
  const qit::PureState psi = qit::random_pure_state(7, g);
  CHECK(qit::entropy_of(cmat(psi.projector())) == Approx(0.0).epsilon(1e-9));
  CHECK(qit::entropy(qit::DensityOperator::maximally_mixed(8)) == Approx(3.0).epsilon(1e-12));
}

TEST_CASE("relative entropy: frozen value and nonnegativity") {
  cmat p = cmat::Zero(2, 2);
  p(0, 0) = 1.0;
  const qit::DensityOperator rho(std::move(p));
  const qit::DensityOperator tau = qit::DensityOperator::maximally_mixed(2);
  CHECK(qit::relative_entropy(rho, tau) == Approx(1.0).epsilon(1e-12));

  rng::xoshiro256pp g(16);
  for (int i = 0; i < 25; ++i) {
    const qit::DensityOperator a = qit::random_density(4, g);
    const qit::DensityOperator b = qit::random_density(4, g);
    CHECK(qit::relative_entropy(a, b) >= -1e-10);
  }
}

TEST_CASE("trace distance is unhalved: orthogonal pure states sit at 2") {
  cmat a = cmat::Zero(2, 2);
  a(0, 0) = 1.0;
  cmat b = cmat::Zero(2, 2);
  b(1, 1) = 1.0;
  CHECK(qit::trace_distance_of(a, b) == Approx(2.0).epsilon(1e-12));
  CHECK(qit::trace_distance_of(a, a) == Approx(0.0));
}

TEST_CASE("mutual information vanishes on product states") {
  rng::xoshiro256pp g(17);
  const cmat a = qit::random_density(2, g).matrix();
  const cmat b = qit::random_density(3, g).matrix();
  const qit::DensityOperator ab = qit::DensityOperator::unchecked(qit::kron(a, b));
  CHECK(qit::mutual_information(ab, qit::SystemSplit({2, 3})) == Approx(0.0).epsilon(1e-9));
}

TEST_CASE("coherent information of a maximally entangled state is log d") {
  const qit::PureState phi = qit::maximally_entangled(4);
  const qit::DensityOperator rho(cmat(phi.projector()));
  CHECK(qit::coherent_information_state(rho, qit::SystemSplit({4, 4})) ==
        Approx(2.0).epsilon(1e-9));
}

TEST_CASE("random isometries are isometric; densities are states") {
  rng::xoshiro256pp g(18);
  const cmat v = qit::random_isometry(7, 3, g);
  CHECK((v.adjoint() * v - cmat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  const qit::DensityOperator rho = qit::random_density(5, g);
  CHECK(rho.trace() == Approx(1.0).epsilon(1e-12));
  CHECK(qit::hermitian_eigenvalues(rho.matrix()).minCoeff() >= -1e-12);
}

TEST_CASE("hermitian_eigenvalues come out ascending") {
  cmat m = cmat::Zero(3, 3);
  m(0, 0) = 3.0;
  m(1, 1) = -1.0;
  m(2, 2) = 2.0;
  const rvec ev = qit::hermitian_eigenvalues(m);
  CHECK(ev(0) == Approx(-1.0));
  CHECK(ev(1) == Approx(2.0));
  CHECK(ev(2) == Approx(3.0));
}

TEST_CASE("typed wrappers validate their invariants") {
  CHECK_THROWS(qit::DensityOperator(cmat(2.0 * cmat::Identity(2, 2))));  // trace 4
  cmat nonherm(2, 2);
  nonherm << 1.0, 1.0, 0.0, 0.0;
  CHECK_THROWS(qit::DensityOperator(std::move(nonherm)));
  const qit::SystemSplit split({2, 3, 4});
  CHECK(split.dim() == 24);
  CHECK(split.dim_of(1) == 3);
  CHECK_THROWS(qit::SystemSplit({2, 0}));
}

TEST_CASE("tensor products of typed states") {
  rng::xoshiro256pp g(19);
  const qit::PureState a = qit::random_pure_state(2, g);
  const qit::PureState b = qit::random_pure_state(3, g);
  const qit::PureState ab = qit::tensor_product(a, b);
  CHECK(ab.dim() == 6);
  CHECK(ab.squared_norm() == Approx(1.0).epsilon(1e-12));
  const cmat proj = qit::kron(cmat(a.projector()), cmat(b.projector()));
  CHECK((proj - ab.projector()).cwiseAbs().maxCoeff() < 1e-12);
}
