#include <string>

#include "causal/compilers.hpp"
#include "causal/effects.hpp"
#include "causal/error.hpp"
#include "causal/harness.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace causal;
using doctest::Approx;

TEST_CASE("single-variable SCM") {
  ScmSpec scm;
  scm.variables.push_back({"X", {"0", "1"}, {.7, .3}, {}, {0, 1}});
  const auto cs = compile_scm(scm);
  CHECK(oracle::max_diff(cs.p().weights(), {.7, .3}) <= 1e-15);
  CHECK(fx::row(cs.kernel(SubsetMask()), 0) == fx::weights(cs.p()));
  CHECK(fx::row(cs.kernel(SubsetMask::of({0})), 1) == std::vector<double>{0, 1});
  CHECK(validate_causal_space(cs).valid());
}

TEST_CASE("xor SCM tables") {
  const auto cs = compile_scm(xor_scm());
  // Noise atoms (N_X, N_Y): X = N_X, Y = N_X xor N_Y.
  CHECK(oracle::max_diff(cs.p().weights(), {.45, .05, .05, .45}) <= 1e-15);
  CHECK(cs.kernel(SubsetMask::of({0})).row(1)[3] == Approx(0.9));
  CHECK(oracle::max_diff(cs.kernel(SubsetMask::of({1})).row(0), {.5, 0, .5, 0}) <= 1e-15);
  CHECK(validate_causal_space(cs).valid());
}

TEST_CASE("SCM validation") {
  SUBCASE("cycle") {
    ScmSpec scm = xor_scm();
    scm.variables[0].parents = {1};
    scm.variables[0].table = {0, 1, 1, 0};
    try {
      scm.validate();
      FAIL("expected a cycle error");
    } catch (const DomainError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("X -> Y -> X") != std::string::npos);
    }
  }
  SUBCASE("table size") {
    ScmSpec scm = xor_scm();
    scm.variables[1].table.pop_back();
    CHECK_THROWS_AS(scm.validate(), DomainError);
  }
  SUBCASE("table entry outside the domain") {
    ScmSpec scm = xor_scm();
    scm.variables[1].table[0] = 2;
    CHECK_THROWS_AS(scm.validate(), DomainError);
  }
  SUBCASE("noise") {
    ScmSpec scm = xor_scm();
    scm.variables[0].noise = {.5, .6};
    CHECK_THROWS_AS(compile_scm(scm), DomainError);
  }
}

TEST_CASE("truncated factorization") {
  const auto xor_ = xor_scm();
  const auto cs = compile_scm(xor_);
  CHECK(oracle::max_diff(truncated_factorization_oracle(xor_, {std::nullopt, std::nullopt}).weights(),
                         cs.p().weights()) <= 1e-15);
  const Dist do_x1 = truncated_factorization_oracle(xor_, {1, std::nullopt});
  CHECK(oracle::max_diff(marginal(do_x1, SubsetMask::of({1})).weights(), {.1, .9}) <= 1e-15);

  const auto chain = chain_scm();
  const auto ccs = compile_scm(chain);
  for (std::size_t y = 0; y < 2; ++y) {
    const Dist d = truncated_factorization_oracle(chain, {std::nullopt, y, std::nullopt});
    CHECK(oracle::max_diff(marginal(d, SubsetMask::of({0})).weights(),
                           marginal(ccs.p(), SubsetMask::of({0})).weights()) <= 1e-15);
  }
}

TEST_CASE("compiled random SCMs are valid and agree with the oracle") {
  Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    const ScmSpec scm = random_scm(rng, 4, 3);
    const auto cs = compile_scm(scm);
    REQUIRE(validate_causal_space(cs).valid());
    const auto& sp = cs.space();
    for (std::size_t j = 0; j < scm.variables.size(); ++j) {
      std::vector<std::optional<std::size_t>> clamp(scm.variables.size());
      clamp[j] = rng.below(scm.variables[j].domain.size());
      const SubsetMask u = SubsetMask::of({j});
      const Dist via_kernel = intervene_hard(cs, u, dirac(sp, {u, *clamp[j]})).p();
      CHECK(max_abs_difference(via_kernel, truncated_factorization_oracle(scm, clamp)) <= 1e-12);
    }
  }
}

TEST_CASE("potential outcomes: single treatment level") {
  PoSpec po;
  po.treatments = {"t"};
  po.outcomes = {"0", "1"};
  po.joint = {.3, .7};
  const auto compiled = compile_po(po);
  const auto& cs = compiled.space;
  CHECK(fx::row(cs.kernel(SubsetMask::of({kPoTreatment})), 0) == fx::weights(cs.p()));
  CHECK(validate_causal_space(cs).valid());
}

TEST_CASE("potential outcomes: deterministic potentials") {
  const PoSpec po = deterministic_po();
  const auto compiled = compile_po(po);
  const auto& cs = compiled.space;
  const Kernel& kz = cs.kernel(SubsetMask::of({kPoTreatment}));
  const Event y1 = Event::atom(cs.space(), {SubsetMask::of({kPoOutcome}), 1});
  CHECK(kz.apply(0, y1) == 0.0);
  CHECK(kz.apply(1, y1) == 1.0);
  CHECK(ate(po, 1, 0) == Approx(1.0));
  CHECK(ate(po, 1, 1) == 0.0);
  CHECK(validate_causal_space(cs).valid());
}

TEST_CASE("potential outcomes: confounded table") {
  const PoSpec po = confounded_po();
  const auto compiled = compile_po(po);
  const auto& cs = compiled.space;
  const auto& sp = cs.space();
  // Hand sums over the joint, indexed z * 4 + y0 * 2 + y1.
  const auto& j = po.joint;
  const double y1_law = j[1] + j[3] + j[5] + j[7];
  const double y0_law = j[2] + j[3] + j[6] + j[7];
  const double p_y1_given_z1 = (j[5] + j[7]) / (j[4] + j[5] + j[6] + j[7]);
  CHECK(y1_law == Approx(.63));
  CHECK(p_y1_given_z1 == Approx(.86));

  const Kernel& kz = cs.kernel(SubsetMask::of({kPoTreatment}));
  const Event y1 = Event::atom(sp, {SubsetMask::of({kPoOutcome}), 1});
  CHECK(kz.apply(1, y1) == Approx(y1_law).epsilon(1e-15));
  CHECK(kz.apply(0, y1) == Approx(y0_law).epsilon(1e-15));
  CHECK(condition(cs.p(), {SubsetMask::of({kPoTreatment}), 1}).probability(y1) ==
        Approx(p_y1_given_z1).epsilon(1e-12));
  CHECK(ate(po, 1, 0) == Approx(y1_law - y0_law));
  const auto law = potential_outcome_law(po, 1);
  REQUIRE(law.size() == 2);
  CHECK(law[0] == Approx(1 - y1_law));
  CHECK(law[1] == Approx(y1_law));
  CHECK(validate_causal_space(cs).valid());

  CHECK(compiled.mask[0].origin == KernelOrigin::kAxiom);
  CHECK(compiled.mask[1].origin == KernelOrigin::kMandatedOnY);
  CHECK(compiled.mask[sp->subset_count() - 1].origin == KernelOrigin::kAxiom);
  CHECK(compiled.mask[2].origin == KernelOrigin::kFilled);
  CHECK(std::string(to_string(KernelOrigin::kMandatedOnY)) == "mandated-on-outcome");
}

TEST_CASE("potential outcomes with a covariate") {
  PoSpec po;
  po.treatments = {"0", "1"};
  po.outcomes = {"0", "1"};
  po.covariates = {"a", "b"};
  // (Z, X, Y0, Y1)
  po.joint = {.05, .05, .05, .05, .10, .05, .05, .10, .02, .03, .05, .05, .05, .05, .10, .15};
  const auto compiled = compile_po(po);
  const auto& cs = compiled.space;
  CHECK(validate_causal_space(cs).valid());
  const auto& sp = *cs.space();
  // K_Z(z, Y = y, X = x) = P~(Y_z = y) P(X = x | Z = z).
  const auto law1 = potential_outcome_law(po, 1);
  const double px_b_given_z1 = (.05 + .05 + .10 + .15) / (.02 + .03 + .05 + .05 + .05 + .05 + .10 + .15);
  const std::size_t atom = sp.encode(sp.all(), std::vector<std::size_t>{1, 1, 1});
  CHECK(cs.kernel(SubsetMask::of({kPoTreatment})).row(1)[atom] ==
        Approx(law1[1] * px_b_given_z1).epsilon(1e-12));
}
