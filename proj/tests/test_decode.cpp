// Tests for state discrimination (POVM validation, pretty-good measurement,
// Helstrom optimum, packing bounds), the one-shot capacity-defect bounds, and
// the joint-state information audit with its entropy inequalities.
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <gausscode/channels/ensemble.hpp>
#include <gausscode/channels/stinespring.hpp>
#include <gausscode/codes/code.hpp>
#include <gausscode/decode/audit.hpp>
#include <gausscode/decode/discrimination.hpp>
#include <gausscode/decode/oneshot.hpp>
#include <gausscode/qit/entropy.hpp>
#include <gausscode/qit/random.hpp>
#include <gausscode/serialize.hpp>

using namespace gausscode;
using doctest::Approx;

namespace {

qit::DensityOperator maximally_mixed(index_t d) {
  return qit::DensityOperator(cmat::Identity(d, d) / static_cast<double>(d));
}

cmat projector_on(const cvec& v) { return v * v.adjoint() / v.squaredNorm(); }

}  // namespace

TEST_CASE("Povm validates its elements") {
  const cmat half = 0.5 * cmat::Identity(2, 2);
  CHECK_NOTHROW(decode::Povm({half, half}));
  CHECK_THROWS_AS(decode::Povm({half}), std::invalid_argument);  // incomplete
  CHECK_THROWS_AS(decode::Povm({}), std::invalid_argument);
  cmat neg = cmat::Identity(2, 2);
  neg(0, 0) = -0.1;
  CHECK_THROWS_AS(decode::Povm({neg, cmat::Identity(2, 2) - neg}), std::invalid_argument);
  CHECK_THROWS_AS(decode::Povm({half, 0.5 * cmat::Identity(3, 3)}), std::invalid_argument);
}

TEST_CASE("pretty-good measurement recovers orthogonal states exactly") {
  cvec e0 = cvec::Zero(2), e1 = cvec::Zero(2);
  e0(0) = 1.0;
  e1(1) = 1.0;
  const std::vector<cmat> states = {projector_on(e0), projector_on(e1)};
  chan::Ensemble ens(rvec::Constant(2, 0.5), states);
  const decode::Povm povm = decode::pgm_povm(ens);
  CHECK(povm.size() == 2);  // full-rank average: no junk element
  CHECK((povm.element(0) - states[0]).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((povm.element(1) - states[1]).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(decode::classical_error(states, povm) == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rank-deficient ensembles get a junk outcome that completes the POVM") {
  // Two orthogonal states spanning 2 of 3 dimensions: the junk element is the
  // projector on the unused axis and never helps the decoder.
  cvec e0 = cvec::Zero(3), e1 = cvec::Zero(3);
  e0(0) = 1.0;
  e1(1) = 1.0;
  const std::vector<cmat> states = {projector_on(e0), projector_on(e1)};
  chan::Ensemble ens(rvec::Constant(2, 0.5), states);
  const decode::Povm povm = decode::pgm_povm(ens);
  CHECK(povm.size() == 3);
  cmat sum = cmat::Zero(3, 3);
  for (const cmat& e : povm.elements()) sum += e;
  CHECK((sum - cmat::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(povm.element(2)(2, 2).real() == Approx(1.0).epsilon(1e-12));
  CHECK(decode::classical_error(states, povm) == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("classical error is 1/2 for identical equiprobable states") {
  rng::xoshiro256pp gen(341);
  const cmat sigma = qit::random_density(3, gen).matrix();
  chan::Ensemble ens(rvec::Constant(2, 0.5), {sigma, sigma});
  const double err = decode::classical_error(ens.members(), decode::pgm_povm(ens));
  CHECK(err == Approx(0.5).epsilon(1e-10));
}

TEST_CASE("Helstrom error matches the pure-pair fidelity formula") {
  // For equiprobable pure states, P_err = (1 - sqrt(1 - F)) / 2 with
  // F = |<psi0|psi1>|^2.
  rng::xoshiro256pp gen(5150);
  for (int rep = 0; rep < 50; ++rep) {
    const index_t d = 2 + static_cast<index_t>(gen.next() % 2);
    const cvec a = qit::random_pure_state(d, gen).amplitudes();
    const cvec b = qit::random_pure_state(d, gen).amplitudes();
    const double fid = std::norm((a.adjoint() * b)(0, 0));
    const double expected = 0.5 * (1.0 - std::sqrt(1.0 - fid));
    const double got = decode::helstrom_error(qit::DensityOperator(projector_on(a)),
                                              qit::DensityOperator(projector_on(b)));
    CHECK(got == Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("Helstrom error on commuting states reduces to total variation") {
  rvec p(4), q(4);
  p << 0.4, 0.3, 0.2, 0.1;
  q << 0.1, 0.2, 0.3, 0.4;
  const cmat s0 = p.cast<cplx>().asDiagonal();
  const cmat s1 = q.cast<cplx>().asDiagonal();
  const double tv = 0.5 * (p - q).cwiseAbs().sum();
  CHECK(decode::helstrom_error(qit::DensityOperator(s0), qit::DensityOperator(s1)) ==
        Approx(0.5 * (1.0 - tv)).epsilon(1e-12));
}

TEST_CASE("pretty-good measurement never beats the Helstrom optimum") {
  rng::xoshiro256pp gen(31337);
  for (int rep = 0; rep < 60; ++rep) {
    const index_t d = 2 + static_cast<index_t>(gen.next() % 3);
    const cmat s0 = qit::random_density(d, gen).matrix();
    const cmat s1 = qit::random_density(d, gen).matrix();
    chan::Ensemble ens(rvec::Constant(2, 0.5), {s0, s1});
    const double pgm = decode::classical_error(ens.members(), decode::pgm_povm(ens));
    const double hel = decode::helstrom_error(qit::DensityOperator(s0), qit::DensityOperator(s1));
    CHECK(pgm >= hel - 1e-10);
  }
}

TEST_CASE("packing bound evaluates both closed forms") {
  const auto b = decode::packing_bound(0.04, 0.01);
  CHECK(b.tight == Approx(2.0 * 0.04 + 4.0 * 0.2 + 4.0 * 0.01).epsilon(1e-12));
  CHECK(b.simple == Approx(6.0 * 0.2 + 4.0 * 0.01).epsilon(1e-12));
  // The simple form dominates the tight form whenever eps <= 1.
  for (double eps : {0.0, 0.01, 0.2, 0.5, 1.0})
    CHECK(decode::packing_bound(eps, 0.003).simple >=
          decode::packing_bound(eps, 0.003).tight - 1e-12);
}

TEST_CASE("measured packing bound dominates the pretty-good error on random codes") {
  // Noisy channel, modest block: the mean decoding error of the basis ensemble
  // stays below the mean of the measured-parameter bound across draws.
  const auto v = chan::tensor_power(chan::standard_channel(chan::ChannelFamily::dephasing, 2, 0.1), 4);
  const auto rho = maximally_mixed(16);
  double err_acc = 0.0, bound_acc = 0.0;
  const int draws = 200;
  for (int c = 0; c < draws; ++c) {
    const auto code = codes::build_random_code(rho, 4, 70000 + static_cast<std::uint64_t>(c));
    const auto [eps, eta] = codes::measured_epsilon_eta(code);
    bound_acc += decode::packing_bound(eps, eta).simple;
    const chan::Ensemble ens = decode::detail::output_ensemble(v, code.phi);
    err_acc += decode::classical_error(ens.members(), decode::pgm_povm(ens));
  }
  CHECK(err_acc / draws <= bound_acc / draws);
}

TEST_CASE("one-shot preconditions on the transparent channel") {
  const auto v = chan::standard_channel(chan::ChannelFamily::identity, 4);
  const auto pre = decode::oneshot_preconditions(v, maximally_mixed(4), cmat::Identity(4, 4),
                                                 cmat::Identity(1, 1));
  CHECK(pre.epsilon == Approx(0.0).epsilon(1e-12));
  CHECK(pre.D_param == Approx(4.0).epsilon(1e-12));
  CHECK(pre.Delta == Approx(4.0).epsilon(1e-12));
  CHECK(pre.rank_PB == 4);
  CHECK(pre.rank_PE == 1);

  // A pure input state has Delta = 1.
  cmat pure = cmat::Zero(4, 4);
  pure(0, 0) = 1.0;
  const auto pre_pure = decode::oneshot_preconditions(v, qit::DensityOperator(pure),
                                                      cmat::Identity(4, 4), cmat::Identity(1, 1));
  CHECK(pre_pure.Delta == Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(decode::oneshot_preconditions(v, maximally_mixed(3), cmat::Identity(4, 4),
                                                cmat::Identity(1, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(decode::oneshot_preconditions(v, maximally_mixed(4), cmat::Identity(3, 3),
                                                cmat::Identity(1, 1)),
                  std::invalid_argument);
}

TEST_CASE("capacity-defect lambda and the derived bounds") {
  CHECK(decode::lambda_defect(0.01, 0.001, 16, 6) == Approx(49.10856114272676).epsilon(1e-14));
  CHECK(decode::lambda_defect(0.01, 0.001, 16, 4) == Approx(49.10216327569984).epsilon(1e-14));
  CHECK_THROWS_AS(decode::lambda_defect(0.01, 0.001, 16, 5), std::invalid_argument);
  CHECK_THROWS_AS(decode::lambda_defect(-0.01, 0.001, 16, 6), std::invalid_argument);
  CHECK_THROWS_AS(decode::lambda_defect(0.01, 0.001, 0, 6), std::invalid_argument);

  SUBCASE("zero defect gives the noiseless floor") {
    // The block-size term 3 N exp(-N eps^2 / divisor) keeps lambda away from
    // zero for any finite N, so the exact floor is probed by pinning lambda.
    decode::OneShotParams p;
    p.N = 4;
    p.lambda = 0.0;
    const auto b = decode::oneshot_bounds(p);
    CHECK(!b.vacuous);
    CHECK(b.chi_floor == Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(b.q_error) <= 1e-12);
    CHECK(b.epsilon_in_range);

    // And the parameter factory keeps the analytic formula: at eps = eta = 0
    // lambda is exactly the 3N block term.
    const auto p0 = decode::make_oneshot_params(0.0, 0.0, 16.0, 16.0, 1, 4);
    CHECK(p0.lambda == Approx(12.0).epsilon(1e-12));
  }

  SUBCASE("vacuous defect is flagged, not thrown") {
    const auto p = decode::make_oneshot_params(1.0, 0.5, 16.0, 16.0, 1, 4);
    const auto b = decode::oneshot_bounds(p);
    CHECK(b.vacuous);
    CHECK(std::isnan(b.chi_floor));
    CHECK(std::isnan(b.q_error));
    CHECK(std::isfinite(b.q_error_simplified));
    CHECK(!b.epsilon_in_range);
  }

  SUBCASE("simplified error bound dominates the entropic one when defined") {
    for (int n : {2, 4, 16})
      for (double lam : {1e-6, 1e-3, 0.05, 0.25, 0.5}) {
        decode::OneShotParams p;
        p.N = n;
        p.lambda = lam;
        const auto b = decode::oneshot_bounds(p);
        REQUIRE(!b.vacuous);
        CHECK(b.q_error <= b.q_error_simplified + 1e-12);
      }
  }

  SUBCASE("sizing check compares N against both caps") {
    auto p = decode::make_oneshot_params(0.1, 0.5, 64.0, 64.0, 2, 8);
    CHECK(decode::oneshot_bounds(p).sizing_ok);  // 8 <= min(0.5*64/2, 0.5*64) = 16
    p.N = 32;
    CHECK(!decode::oneshot_bounds(p).sizing_ok);
    p.N = 8;
    p.rank_PE = 0;  // no environment cap
    CHECK(decode::oneshot_bounds(p).sizing_ok);
  }
}

TEST_CASE("joint state has an exactly maximally mixed reference marginal") {
  const auto v = chan::standard_channel(chan::ChannelFamily::dephasing, 2, 0.1);
  const auto code = codes::build_random_code(maximally_mixed(2), 2, 7001);
  const qit::PureState psi = decode::joint_state(code, v);
  const qit::SystemSplit split({static_cast<index_t>(2), v.dim_out(), v.dim_env()});
  const cmat rho_r = qit::partial_trace(psi, split, {0}).matrix();
  CHECK((rho_r - 0.5 * cmat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);

  const auto v8 = chan::standard_channel(chan::ChannelFamily::identity, 8);
  const auto code8 = codes::build_random_code(maximally_mixed(8), 4, 7002);
  const cmat r8 = qit::partial_trace(decode::joint_state(code8, v8),
                                     qit::SystemSplit({4, 8, 1}), {0})
                      .matrix();
  CHECK((r8 - 0.25 * cmat::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("information audit on the transparent channel") {
  const auto v = chan::standard_channel(chan::ChannelFamily::identity, 16);
  const auto code = codes::build_random_code(maximally_mixed(16), 4, 8088);
  const auto audit = decode::information_audit(code, v);
  CHECK(audit.H_R == Approx(2.0).epsilon(1e-9));
  CHECK(audit.I_RB == Approx(4.0).epsilon(1e-9));
  CHECK(std::abs(audit.I_RE) <= 1e-10);
  CHECK(audit.decoupling_distance <= 1e-10);
  CHECK(audit.pgm_error_basis <= 1e-10);
  CHECK(audit.pgm_error_conjugate <= 1e-10);
  CHECK(audit.chi_basis == Approx(2.0).epsilon(1e-9));
  CHECK(audit.chi_conjugate == Approx(2.0).epsilon(1e-9));
  CHECK(audit.duality_ok);
  CHECK(audit.pinsker_ok);
  CHECK(audit.uncertainty_ok);
  CHECK(audit.fano_ok);
  CHECK(audit.fano_bound == Approx(2.0).epsilon(1e-9));
}

TEST_CASE("information audit inequalities on a noisy qubit channel") {
  const auto v = chan::standard_channel(chan::ChannelFamily::dephasing, 2, 0.1);
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const auto code = codes::build_random_code(maximally_mixed(2), 2, seed);
    const auto audit = decode::information_audit(code, v);
    CHECK(audit.H_R == Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(audit.duality_residual) <= 1e-9);
    CHECK(audit.I_RB + audit.I_RE == Approx(2.0 * audit.H_R).epsilon(1e-9));
    CHECK(audit.pinsker_slack >= -1e-8);
    CHECK(audit.uncertainty_slack >= -1e-8);
    CHECK(audit.duality_ok);
    CHECK(audit.pinsker_ok);
    CHECK(audit.uncertainty_ok);
    CHECK(audit.fano_ok);
    // Dephasing leaks to the environment: strictly positive I(R:E) for a
    // generic code, and the decoupling distance is strictly positive too.
    CHECK(audit.I_RE >= 0.0);
    CHECK(audit.decoupling_distance >= 0.0);
  }
}

TEST_CASE("audit serialization carries exactly the ten typed fields") {
  const auto v = chan::standard_channel(chan::ChannelFamily::identity, 8);
  const auto code = codes::build_random_code(maximally_mixed(8), 2, 11);
  const auto j = io::to_json(decode::information_audit(code, v));
  REQUIRE(j.size() == 10);
  for (const char* key :
       {"chi_basis", "chi_conjugate", "I_RB", "I_RE", "H_R", "duality_residual", "pinsker_slack",
        "uncertainty_slack", "fano_bound", "decoupling_distance"})
    CHECK(j.contains(key));
}

TEST_CASE("gentle measurement inequality") {
  rng::xoshiro256pp gen(2024);
  for (int rep = 0; rep < 50; ++rep) {
    const index_t d = 2 + static_cast<index_t>(gen.next() % 15);
    const cmat rho = qit::random_density(d, gen).matrix();
    // Random X with spectrum in [0, 1]: squash a random density's eigenvalues.
    const cmat u = qit::random_unitary(d, gen);
    rvec diag(d);
    for (index_t i = 0; i < d; ++i) diag(i) = gen.uniform01();
    const cmat x = u * cmat(diag.cast<cplx>().asDiagonal()) * u.adjoint();
    const auto rep_out = decode::gentle_measurement_check(qit::PositiveOperator(rho),
                                                          qit::PositiveOperator(x));
    CHECK(rep_out.pass);
    CHECK(rep_out.lhs >= -1e-12);
  }

  SUBCASE("projector case") {
    cmat p = cmat::Zero(4, 4);
    p(0, 0) = 1.0;
    p(1, 1) = 1.0;
    const cmat rho = 0.25 * cmat::Identity(4, 4);
    const auto r = decode::gentle_measurement_check(qit::PositiveOperator(rho),
                                                    qit::PositiveOperator(p));
    CHECK(r.epsilon == Approx(0.5).epsilon(1e-12));
    // || rho - P rho P ||_1 = 0.5 here; the bound is 2 sqrt(1/2) = 1.414...
    CHECK(r.lhs == Approx(0.5).epsilon(1e-10));
    CHECK(r.pass);
  }

  SUBCASE("X beyond the identity is rejected") {
    const cmat rho = 0.5 * cmat::Identity(2, 2);
    CHECK_THROWS_AS(decode::gentle_measurement_check(qit::PositiveOperator(rho),
                                                     qit::PositiveOperator(
                                                         cmat(2.0 * cmat::Identity(2, 2)))),
                    std::invalid_argument);
  }
}

TEST_CASE("environment-truncated support projector") {
  const auto v = chan::standard_channel(chan::ChannelFamily::identity, 4);
  rng::xoshiro256pp gen(606);
  const qit::PureState gamma = qit::random_pure_state(4, gen);
  const auto s = decode::schmidt_support_projector(v, cmat::Identity(1, 1), gamma);
  CHECK(!s.zero_input);
  CHECK(s.rank == 1);  // bounded by rank(P_E) = 1
  CHECK((s.projector * s.projector - s.projector).cwiseAbs().maxCoeff() <= 1e-10);
  const cvec out = v.apply(gamma.amplitudes());
  CHECK((s.projector * out - out).cwiseAbs().maxCoeff() <= 1e-10);

  // A vanishing environment projector annihilates the output.
  const auto z = decode::schmidt_support_projector(v, cmat::Zero(1, 1), gamma);
  CHECK(z.zero_input);
  CHECK(z.rank == 0);

  // With a genuine environment the rank is still capped by rank(P_E).
  const auto vd = chan::standard_channel(chan::ChannelFamily::depolarizing, 2, 0.5);
  cmat pe1 = cmat::Zero(vd.dim_env(), vd.dim_env());
  pe1(0, 0) = 1.0;
  const qit::PureState g2 = qit::random_pure_state(2, gen);
  const auto s2 = decode::schmidt_support_projector(vd, pe1, g2);
  CHECK(s2.rank <= 1);
}
