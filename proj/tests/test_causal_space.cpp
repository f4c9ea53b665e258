#include "causal/compilers.hpp"
#include "causal/error.hpp"
#include "causal/harness.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace causal;
using doctest::Approx;

namespace {

CausalSpace uniform_conditionals() {
  const auto sp = fx::space({2, 2});
  const Dist p = Dist::uniform(sp, sp->all());
  return CausalSpace(p, mechanism_from_conditionals(p));
}

bool same_space(const CausalSpace& a, const CausalSpace& b) {
  if (fx::weights(a.p()) != fx::weights(b.p())) return false;
  for (std::size_t i = 0; i < a.mechanism().kernels().size(); ++i) {
    const auto x = a.mechanism().kernels()[i].data();
    const auto y = b.mechanism().kernels()[i].data();
    if (!std::equal(x.begin(), x.end(), y.begin(), y.end())) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("validation of conditional mechanisms") {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto sp = random_product_space(rng, 1, 4, 3);
    const Dist p = random_dist(rng, sp, sp->all());
    CHECK(validate_causal_space(CausalSpace(p, mechanism_from_conditionals(p))).valid());
  }
}

TEST_CASE("validation reports both axioms") {
  const auto sp = fx::space({2, 2});
  const Dist p(sp, sp->all(), {.4, .1, .1, .4});
  auto kernels = mechanism_from_conditionals(p).kernels();

  SUBCASE("K_empty differs from P") {
    kernels[0] = Kernel(sp, SubsetMask(), std::vector<double>{.25, .25, .25, .25});
    const auto report = validate_causal_space(CausalSpace(p, CausalMechanism(sp, kernels)));
    REQUIRE_FALSE(report.valid());
    CHECK(report.violations.front().kind == Violation::Kind::kTrivialIntervention);
  }
  SUBCASE("row marginal is not a Dirac mass") {
    kernels[1] = Kernel(sp, SubsetMask::of({0}), std::vector<double>{.5, .5, 0, 0, .25, .25, .25, .25});
    const auto report = validate_causal_space(CausalSpace(p, CausalMechanism(sp, kernels)));
    REQUIRE(report.violations.size() == 1);
    const auto& v = report.violations.front();
    CHECK(v.kind == Violation::Kind::kInterventionalDeterminism);
    CHECK(v.subset == SubsetMask::of({0}));
    CHECK(v.atom.flat == 1);
    CHECK(v.expected == Approx(1.0));
    CHECK(v.actual == Approx(0.5));
    CHECK_THROWS_AS(require_valid(CausalSpace(p, CausalMechanism(sp, kernels))), DomainError);
  }
}

TEST_CASE("mechanism from conditionals") {
  const auto sp = fx::space({2, 2});
  const auto cs = uniform_conditionals();
  CHECK(fx::row(cs.kernel(SubsetMask::of({0})), 0) == std::vector<double>{.5, .5, 0, 0});
  const Dist p(sp, sp->all(), {.5, .3, .1, .1});
  const auto m = mechanism_from_conditionals(p);
  const auto r = fx::row(m[SubsetMask::of({0})], 1);
  CHECK(oracle::max_diff(r, {0, 0, .5, .5}) <= 1e-15);
  CHECK_THROWS_AS(mechanism_from_conditionals(Dist(sp, sp->all(), {.5, .5, 0, 0})), NullSetError);
}

TEST_CASE("trivial mechanism") {
  const auto sp = fx::space({2, 2});
  const Dist q(sp, sp->all(), {.25, .25, .25, .25});
  const CausalSpace l = trivial_mechanism(sp->all(), q);
  CHECK(fx::row(l.kernel(SubsetMask()), 0) == fx::weights(q));
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(fx::row(l.kernel(sp->all()), r) == fx::weights(dirac(l.space(), {l.space()->all(), r})));
  }
  CHECK(fx::row(l.kernel(SubsetMask::of({0})), 0) == std::vector<double>{.5, .5, 0, 0});
  // Valid even when q does not factorize.
  const Dist coupled(sp, sp->all(), {.4, .1, .1, .4});
  CHECK(validate_causal_space(trivial_mechanism(sp->all(), coupled)).valid());
}

TEST_CASE("intervention on the empty set leaves the space alone") {
  const auto cs = compile_scm(xor_scm());
  const Dist q(cs.space(), SubsetMask(), {1.0});
  CHECK(same_space(intervene(cs, {SubsetMask(), q, std::nullopt}), cs));
  CHECK(same_space(intervene_hard(cs, SubsetMask(), q), cs));
}

TEST_CASE("xor SCM: do(X = 1) gives Y = 1 with probability 0.9") {
  const auto cs = compile_scm(xor_scm());
  const auto& sp = cs.space();
  const SubsetMask x = SubsetMask::of({0});
  const Dist q = dirac(sp, {x, 1});
  const auto after = intervene(cs, {x, q, std::nullopt});
  // Noise enumeration: N_Y = 0 (prob .9) gives Y = 1 xor 0 = 1.
  const Event y1 = Event::atom(sp, {SubsetMask::of({1}), 1});
  CHECK(after.p().probability(y1) == Approx(0.9).epsilon(1e-12));
  CHECK(intervene_hard(cs, x, q).p().probability(y1) == Approx(0.9).epsilon(1e-12));
  CHECK(after.p().probability(Event::atom(sp, {x, 1})) == Approx(1.0));
}

TEST_CASE("interventions place Q on H_U") {
  Rng rng(21);
  for (int i = 0; i < 60; ++i) {
    RandomSpaceConfig cfg;
    cfg.seed = 500 + i;
    cfg.style = static_cast<KernelStyle>(i % 4);
    const auto cs = random_causal_space(cfg);
    const auto& sp = cs.space();
    const SubsetMask u(static_cast<std::uint32_t>(rng.below(sp->subset_count())));
    const Dist q = random_dist(rng, sp, u, 0.3);
    const auto after = intervene(cs, {u, q, std::nullopt});
    CHECK(oracle::max_diff(marginal(after.p(), u).weights(), q.weights()) <= 1e-12);
    CHECK(validate_causal_space(after).valid());
  }
}

TEST_CASE("hard intervention with a Dirac measure selects a kernel row") {
  const auto cs = compile_scm(chain_scm());
  const auto& sp = *cs.space();
  const SubsetMask u = SubsetMask::of({1});
  const Dist q = dirac(cs.space(), {u, 1});
  const auto hard = intervene_hard(cs, u, q);
  const SubsetMask s = SubsetMask::of({0});
  for (std::size_t r = 0; r < 2; ++r) {
    const std::size_t joined = sp.encode(s | u, std::vector<std::size_t>{r, 1});
    CHECK(oracle::max_diff(hard.kernel(s).row(r), cs.kernel(s | u).row(joined)) <= 1e-15);
  }
  // U inside S: nothing changes.
  for (SubsetMask t : {u, SubsetMask::of({0, 1}), SubsetMask::of({1, 2}), sp.all()}) {
    CHECK(hard.kernel(t).data().size() == cs.kernel(t).data().size());
    CHECK(oracle::max_diff(hard.kernel(t).data(), cs.kernel(t).data()) == 0.0);
  }
}

TEST_CASE("discrete altitude: hard intervention on altitude") {
  const auto cs = discrete_altitude_space();
  const auto& sp = cs.space();
  const SubsetMask alt = SubsetMask::of({0});
  const SubsetMask temp = SubsetMask::of({1});
  for (std::size_t a = 0; a < 3; ++a) {
    const Dist q = dirac(sp, {alt, a});
    const auto after = intervene_hard(cs, alt, q);
    const auto want = oracle::marginal(cs.kernel(alt).row_dist(a), temp);
    CHECK(oracle::max_diff(marginal(after.p(), temp).weights(), want) <= 1e-12);
    const Dist mc = monte_carlo_intervention(cs, q, 100000, 7 + a);
    CHECK(total_variation(marginal(mc, temp), marginal(after.p(), temp)) < 0.01);
  }
}

TEST_CASE("intervention specs are checked") {
  const auto cs = compile_scm(xor_scm());
  const auto& sp = cs.space();
  const SubsetMask x = SubsetMask::of({0});
  CHECK_THROWS_AS(intervene(cs, {x, Dist::uniform(sp, SubsetMask::of({1})), std::nullopt}), DomainError);
  const Dist q(sp, x, {.3, .7});
  const auto wrong = trivial_mechanism(x, Dist(sp, x, {.5, .5}));
  CHECK_THROWS_AS(intervene(cs, {x, q, wrong}), DomainError);
  const auto right = trivial_mechanism(x, q);
  CHECK_NOTHROW(intervene(cs, {x, q, right}));
}
