// Tests for type-class enumeration, typical projectors (dimension/operator
// bounds, boundary inclusivity, truncation weights) and the reduction of an
// iid channel problem to an effective one-shot problem on the typical input
// subspace.
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include <gausscode/channels/stinespring.hpp>
#include <gausscode/qit/entropy.hpp>
#include <gausscode/qit/random.hpp>
#include <gausscode/serialize.hpp>
#include <gausscode/typicality/reduction.hpp>
#include <gausscode/typicality/typical.hpp>

using namespace gausscode;
using doctest::Approx;

namespace {

rvec spectrum2(double a, double b) {
  rvec s(2);
  s << a, b;
  return s;
}

qit::DensityOperator maximally_mixed(index_t d) {
  return qit::DensityOperator(cmat::Identity(d, d) / static_cast<double>(d));
}

}  // namespace

TEST_CASE("exact multinomial coefficients") {
  CHECK(typ::detail::multinomial({3, 3, 4}) == 4200ull);
  CHECK(typ::detail::multinomial({5, 15}) == 15504ull);  // C(20,5)
  CHECK(typ::detail::multinomial({0, 7}) == 1ull);
  CHECK(typ::detail::multinomial({1, 1, 1}) == 6ull);
  // The largest binomial under the sequence cap still fits in 64 bits exactly.
  CHECK(typ::detail::multinomial({31, 31}) == 465428353255261088ull);
}

TEST_CASE("type classes partition the sequence space") {
  const typ::TypicalProjector proj(rvec::Constant(3, 1.0 / 3.0), 5, 0.3);
  unsigned long long total = 0;
  double prob = 0.0;
  for (const auto& tc : proj.classes()) {
    int n = 0;
    for (int c : tc.counts) n += c;
    CHECK(n == 5);
    total += tc.multiplicity;
    if (std::isfinite(tc.log2_sequence_prob))
      prob += static_cast<double>(tc.multiplicity) * std::exp2(tc.log2_sequence_prob);
  }
  CHECK(total == 243ull);  // 3^5
  CHECK(prob == Approx(1.0).epsilon(1e-12));
  CHECK(proj.weight() + proj.truncation_weight() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flat spectra are typical to the last sequence") {
  // Every sequence of a uniform source sits exactly on the entropy boundary;
  // inclusive comparison keeps them all even for a vanishing window.
  const typ::TypicalProjector proj(spectrum2(0.5, 0.5), 10, 1e-12);
  CHECK(proj.subspace_dim() == 1024ull);
  CHECK(proj.weight() == Approx(1.0).epsilon(1e-12));
  CHECK(proj.truncation_weight() == Approx(0.0).epsilon(1e-12));
  CHECK(proj.entropy_bits() == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("impossible letters are excluded without breaking the counts") {
  rvec s(3);
  s << 0.5, 0.5, 0.0;
  const typ::TypicalProjector proj(s, 4, 0.2);
  CHECK(proj.entropy_bits() == Approx(1.0).epsilon(1e-15));
  CHECK(proj.subspace_dim() == 16ull);  // sequences over the two live letters
  CHECK(proj.weight() == Approx(1.0).epsilon(1e-12));
  unsigned long long total = 0;
  for (const auto& tc : proj.classes()) {
    total += tc.multiplicity;
    if (tc.counts[2] > 0) {
      CHECK(!tc.typical);
      CHECK(tc.log2_sequence_prob == -std::numeric_limits<double>::infinity());
    }
  }
  CHECK(total == 81ull);  // 3^4 including impossible sequences
}

TEST_CASE("frozen truncation weights for a (0.3, 0.7) source at delta 0.2") {
  const rvec s = spectrum2(0.3, 0.7);
  const int ns[] = {4, 8, 12, 16, 20};
  const double trunc[] = {0.5884, 0.44940268000000017, 0.2028737888110005, 0.1737112302249587,
                          0.08344502962981315};
  const unsigned long long dims[] = {4, 84, 1573, 26196, 431699};
  for (int i = 0; i < 5; ++i) {
    const typ::TypicalProjector proj(s, ns[i], 0.2);
    CHECK(proj.truncation_weight() == Approx(trunc[i]).epsilon(1e-12));
    CHECK(proj.subspace_dim() == dims[i]);
  }
}

TEST_CASE("frozen subspace data for a (0.2, 0.8) source at delta 0.1") {
  const rvec s = spectrum2(0.2, 0.8);

  const typ::TypicalProjector p8(s, 8, 0.1);
  CHECK(p8.subspace_dim() == 28ull);
  CHECK(p8.truncation_weight() == Approx(0.7063987199999999).epsilon(1e-12));

  const typ::TypicalProjector p12(s, 12, 0.1);
  CHECK(p12.subspace_dim() == 286ull);
  CHECK(p12.truncation_weight() == Approx(0.480308957184).epsilon(1e-12));

  const typ::TypicalProjector p16(s, 16, 0.1);
  CHECK(p16.subspace_dim() == 2380ull);
  CHECK(p16.truncation_weight() == Approx(0.5535982791229437).epsilon(1e-12));

  const typ::TypicalProjector p20(s, 20, 0.1);
  CHECK(p20.subspace_dim() == 21489ull);
  CHECK(p20.weight() == Approx(0.5981230665110763).epsilon(1e-12));
  // Exactly the classes with 3, 4 or 5 copies of the rare letter are typical;
  // the k = 3 class sits exactly on the lower probability boundary and is
  // kept by the inclusive comparison.
  std::set<int> ks;
  for (const auto& tc : p20.classes())
    if (tc.typical) ks.insert(tc.counts[0]);
  CHECK(ks == std::set<int>{3, 4, 5});
  CHECK(p20.max_typical_log2_prob() == Approx(-12.438561897747247).epsilon(1e-12));
}

TEST_CASE("typicality report certifies the dimension and operator bounds") {
  SUBCASE("frozen two-letter case") {
    cmat rho = cmat::Zero(2, 2);
    rho(0, 0) = 0.2;
    rho(1, 1) = 0.8;
    const auto r = typ::typicality_report(qit::DensityOperator(rho), 20, 0.1);
    CHECK(r.subspace_dim == Approx(21489.0).epsilon(1e-15));
    CHECK(r.dim_bound == Approx(88817.84197001242).epsilon(1e-12));
    CHECK(r.dim_ok);
    CHECK(r.op_ok);
    CHECK(std::log2(r.max_typical_prob) == Approx(-12.438561897747247).epsilon(1e-12));
  }
  SUBCASE("random state") {
    rng::xoshiro256pp gen(515);
    const auto rho = qit::random_density(3, gen);
    const auto r = typ::typicality_report(rho, 6, 0.25);
    CHECK(r.dim_ok);
    CHECK(r.op_ok);
    CHECK(r.weight > 0.0);
    CHECK(r.weight <= 1.0 + 1e-12);
    CHECK(r.subspace_dim <= r.dim_bound);
  }
}

TEST_CASE("sequence membership helpers") {
  const typ::TypicalProjector proj(spectrum2(0.5, 0.5), 2, 0.1);
  CHECK(proj.contains_sequence({0, 1}));
  CHECK(proj.contains_counts({1, 1}));
  CHECK_THROWS_AS(proj.contains_sequence({0, 1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(proj.contains_sequence({0, 2}), std::invalid_argument);
}

TEST_CASE("projector construction rejects invalid and intractable inputs") {
  CHECK_THROWS_AS(typ::TypicalProjector(spectrum2(0.5, 0.5), 0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(typ::TypicalProjector(spectrum2(0.5, 0.5), 4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(typ::TypicalProjector(spectrum2(0.6, 0.6), 4, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(typ::TypicalProjector(spectrum2(-0.1, 1.1), 4, 0.1), std::invalid_argument);
  // Too many type classes: C(47,7) compositions for d = 8, n = 40.
  CHECK_THROWS_AS(typ::TypicalProjector(rvec::Constant(8, 0.125), 40, 0.1),
                  std::invalid_argument);
  // Sequence count beyond the exact 64-bit window: n log2 d > 62.
  CHECK_THROWS_AS(typ::TypicalProjector(rvec::Constant(4, 0.25), 32, 0.1),
                  std::invalid_argument);
  // The boundary itself is allowed: 62 binary letters.
  CHECK_NOTHROW(typ::TypicalProjector(spectrum2(0.5, 0.5), 62, 0.1));
}

TEST_CASE("type class table serialization") {
  const typ::TypicalProjector proj(spectrum2(0.5, 0.5), 1, 0.1);
  const std::string csv = io::type_classes_csv(proj);
  CHECK(csv.rfind("counts,log2_sequence_prob,multiplicity,typical\n", 0) == 0);
  CHECK(csv.find("0;1") != std::string::npos);
  CHECK(csv.find("1;0") != std::string::npos);
  // Header plus one line per class.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("single-copy joint state carries the input spectrum to the reference") {
  rng::xoshiro256pp gen(2120);
  const auto rho = qit::random_density(3, gen);
  const auto v = chan::standard_channel(chan::ChannelFamily::identity, 3);
  const qit::PureState psi = typ::single_copy_state(v, rho);
  CHECK(psi.dim() == 3 * v.dim_out() * v.dim_env());
  const qit::SystemSplit split({static_cast<index_t>(3), v.dim_out(), v.dim_env()});
  const cmat rho_a = qit::partial_trace(psi, split, {0}).matrix();
  const rvec got = qit::hermitian_eigenvalues(rho_a);
  const rvec want = qit::hermitian_eigenvalues(rho.matrix());
  CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-12);
  // The output side has the same spectrum for a transparent channel.
  const cmat rho_b = qit::partial_trace(psi, split, {1}).matrix();
  CHECK((qit::hermitian_eigenvalues(rho_b) - want).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("iid reduction of the transparent qubit channel, n = 4") {
  const auto v = chan::standard_channel(chan::ChannelFamily::identity, 2);
  const auto red = typ::iid_reduction(v, maximally_mixed(2), 4, 0.1);

  CHECK(red.n == 4);
  CHECK(red.H_A == Approx(1.0).epsilon(1e-12));
  CHECK(red.H_B == Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(red.H_E) <= 1e-12);
  CHECK(red.coherent_info == Approx(1.0).epsilon(1e-12));

  // Flat spectrum: the typical subspace is everything.
  CHECK(red.max_constructible_N == 16ull);
  CHECK(red.rho_tilde.dim() == 16);
  CHECK(red.measured.epsilon <= 1e-10);
  CHECK(red.measured.D_param == Approx(16.0).epsilon(1e-9));
  CHECK(red.measured.Delta == Approx(16.0).epsilon(1e-9));
  CHECK(red.measured.rank_PB == 16);
  CHECK(red.measured.rank_PE == 1);

  // Recipe fragment: D = Delta = 2^{n(1-delta)}, N = floor(2^{n(1-3 delta)}).
  CHECK(red.D_recipe == Approx(12.125732532083186).epsilon(1e-12));
  CHECK(red.Delta_recipe == Approx(12.125732532083186).epsilon(1e-12));
  CHECK(red.recipe_N_real == Approx(6.964404506368992).epsilon(1e-12));
  CHECK(red.recipe_N == 6);

  // The effective channel is a genuine isometry and the projectors project.
  const cmat w = red.channel_n.matrix();
  CHECK((w.adjoint() * w - cmat::Identity(16, 16)).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((red.P_B * red.P_B - red.P_B).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((red.P_E * red.P_E - red.P_E).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(red.rho_tilde.matrix().trace().real() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("iid reduction of the dephasing qubit channel") {
  const auto v = chan::standard_channel(chan::ChannelFamily::dephasing, 2, 0.1);

  SUBCASE("small blocks have an empty environment window") {
    // At n in {2, 4, 6} no type class of the (0.9, 0.1) environment spectrum
    // is typical at delta = 0.15: the truncation weight is total and the
    // environment projector vanishes. The reduction reports that honestly.
    for (int n : {2, 4, 6}) {
      const auto red = typ::iid_reduction(v, maximally_mixed(2), n, 0.15);
      CHECK(red.measured.rank_PE == 0);
      CHECK(red.measured.epsilon == Approx(1.0).epsilon(1e-12));
      CHECK(red.max_constructible_N == (1ull << n));
    }
  }

  SUBCASE("n = 8 keeps exactly the single-flip window") {
    // Scalar route for the environment weight: only the one-flip class of the
    // (0.9, 0.1) spectrum is typical, so the kept weight is 8 * 0.9^7 * 0.1.
    for (double delta : {0.1, 0.15}) {
      const typ::TypicalProjector proj(spectrum2(0.9, 0.1), 8, delta);
      CHECK(proj.subspace_dim() == 8ull);
      CHECK(proj.weight() == Approx(0.38263751999999995).epsilon(1e-12));
      CHECK(proj.truncation_weight() == Approx(0.61736248).epsilon(1e-12));
    }
  }
}

TEST_CASE("iid reduction rejects an empty typical input subspace") {
  cmat rho = cmat::Zero(2, 2);
  rho(0, 0) = 0.01;
  rho(1, 1) = 0.99;
  const auto v = chan::standard_channel(chan::ChannelFamily::identity, 2);
  CHECK_THROWS_AS(typ::iid_reduction(v, qit::DensityOperator(rho), 2, 0.05),
                  std::invalid_argument);
}

TEST_CASE("iid reduction enforces its dense caps") {
  const auto v = chan::standard_channel(chan::ChannelFamily::erasure, 4, 0.25);  // output 5 x env 5
  CHECK_THROWS_AS(typ::iid_reduction(v, maximally_mixed(4), 8, 0.1), std::invalid_argument);
}
