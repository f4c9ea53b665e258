#include <iostream>

#include "causal/effects.hpp"
#include "causal/error.hpp"
#include "causal/harness.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "theorems.hpp"

using namespace causal;

TEST_CASE("theorem suite on random spaces") {
  // A seed range disjoint from the acceptance run.
  const auto suite = theorems::run_suite(240, 1u << 20);
  INFO(suite.report());
  CHECK(suite.violations() == 0);
  for (const auto& t : suite.tallies()) {
    CAPTURE(t.name);
    CHECK(t.premises > 0);
  }
}

TEST_CASE("compiled SCMs respect their topological order") {
  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const ScmSpec scm = random_scm(rng, 4, 3);
    const auto cs = compile_scm(scm);
    std::vector<SubsetMask> slices;
    for (std::size_t t = 0; t < scm.variables.size(); ++t) slices.push_back(SubsetMask::of({t}));
    CHECK(is_time_respecting(cs, TimePartition(slices)));
  }
}

TEST_CASE("hard interventions on several SCM variables match truncated factorization") {
  Rng rng(32);
  for (int i = 0; i < 100; ++i) {
    const ScmSpec scm = random_scm(rng, 4, 3);
    const auto cs = compile_scm(scm);
    const auto& sp = cs.space();
    std::vector<std::optional<std::size_t>> clamp(scm.variables.size());
    std::vector<std::size_t> coords;
    std::vector<std::size_t> which;
    for (std::size_t j = 0; j < scm.variables.size(); ++j) {
      if (rng.below(2) == 0) continue;
      clamp[j] = rng.below(scm.variables[j].domain.size());
      which.push_back(j);
      coords.push_back(*clamp[j]);
    }
    const SubsetMask u = SubsetMask::of(which);
    const Dist q = dirac(sp, {u, sp->encode(u, coords)});
    CHECK(max_abs_difference(intervene_hard(cs, u, q).p(), truncated_factorization_oracle(scm, clamp)) <= 1e-12);
  }
}

TEST_CASE("Monte Carlo agrees with the analytic intervention measure") {
  Rng rng(33);
  const CausalSpace spaces[] = {compile_scm(xor_scm()), compile_scm(chain_scm()), compile_scm(backdoor_scm()),
                                ice_cream_space(), discrete_altitude_space(),
                                reversibility_counterexample().space, composition_counterexample().space};
  std::uint64_t seed = 100;
  for (const auto& cs : spaces) {
    for (int k = 0; k < 3; ++k) {
      const SubsetMask u(static_cast<std::uint32_t>(rng.below(cs.space()->subset_count())));
      const Dist q = random_dist(rng, cs.space(), u);
      CHECK(total_variation(monte_carlo_intervention(cs, q, 100000, ++seed), intervention_measure(cs, q)) < 0.02);
    }
  }
}

TEST_CASE("repeating an intervention on the same algebra keeps only the last one") {
  Rng rng(34);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomSpaceConfig cfg;
    cfg.seed = 7000 + seed;
    cfg.style = static_cast<KernelStyle>(seed % 4);
    const auto cs = random_causal_space(cfg);
    const auto& sp = cs.space();
    const SubsetMask u(static_cast<std::uint32_t>(rng.below(sp->subset_count())));
    const Dist q1 = random_dist(rng, sp, u), q2 = random_dist(rng, sp, u);
    const auto twice = intervene_hard(intervene_hard(cs, u, q1), u, q2);
    const auto once = intervene_hard(cs, u, q2);
    CHECK(max_abs_difference(twice.p(), once.p()) <= 1e-12);
    for (std::size_t b = 0; b < sp->subset_count(); ++b) {
      const SubsetMask s(static_cast<std::uint32_t>(b));
      CHECK(oracle::max_diff(twice.kernel(s).data(), once.kernel(s).data()) <= 1e-12);
    }
  }
}

TEST_CASE("every dormant effect found at random can be activated") {
  Rng rng(35);
  std::size_t dormant = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    RandomSpaceConfig cfg;
    cfg.seed = 9000 + seed;
    cfg.style = seed % 2 ? KernelStyle::kScm : KernelStyle::kPerturbedConditional;
    const auto cs = random_causal_space(cfg);
    const auto& sp = cs.space();
    for (int k = 0; k < 4; ++k) {
      const Event a = theorems::random_event(rng, sp);
      const SubsetMask u(static_cast<std::uint32_t>(rng.below(sp->subset_count())));
      if (classify_effect(cs, u, a) != EffectClass::kDormant) continue;
      ++dormant;
      const auto w = activate_dormant(cs, u, a);
      CHECK(w.activated.is_subset_of(u));
      const auto& space = *sp;
      const auto at = space.projection(space.all(), w.intervened)[w.omega0.flat];
      const auto after = intervene_hard(cs, w.intervened, dirac(sp, {w.intervened, at}));
      CHECK(classify_effect(after, w.activated, a) == EffectClass::kActive);
    }
  }
  MESSAGE("dormant instances found: " << dormant);
}

TEST_CASE("the oracle notices a corrupted kernel") {
  const auto cs = compile_scm(chain_scm());
  const auto& sp = cs.space();
  const SubsetMask u = SubsetMask::of({1});
  const Dist q(sp, u, {.3, .7});
  const auto hard = intervene_hard(cs, u, q);
  auto kernels = hard.mechanism().kernels();
  const SubsetMask s = SubsetMask::of({0});
  std::vector<double> rows(kernels[s.bits()].data().begin(), kernels[s.bits()].data().end());
  // Move a little mass between two atoms with the same X value.
  rows[0] += 0.01;
  rows[1] -= 0.01;
  const Kernel broken(sp, s, std::move(rows));
  double worst = 0.0;
  for (std::size_t r = 0; r < 2; ++r) {
    worst = std::max(worst, oracle::max_diff(oracle::hard_row(cs, u, q, s, r), broken.row(r)));
  }
  CHECK(worst > 1e-3);
}
