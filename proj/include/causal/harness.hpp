#pragma once

// Random instances, the Monte Carlo oracle and the hand-built fixtures used
// by the test suites and the demos.

#include <cstdint>
#include <string>
#include <vector>

#include "causal/compilers.hpp"
#include "causal/rng.hpp"

namespace causal {

enum class KernelStyle {
  kConditional,           // every kernel is a conditional of P
  kPerturbedConditional,  // conditionals mixed with random fiber measures
  kFullyRandom,           // delta x arbitrary random measure on the rest
  kScm                    // compiled random DAG SCM
};

const char* to_string(KernelStyle style);

struct RandomSpaceConfig {
  std::uint64_t seed = 0;
  std::size_t min_components = 1;
  std::size_t max_components = 4;
  std::size_t max_outcomes = 3;
  KernelStyle style = KernelStyle::kFullyRandom;
};

/// Deterministic per seed; always passes validate_causal_space.
CausalSpace random_causal_space(const RandomSpaceConfig& cfg);

SpacePtr random_product_space(Rng& rng, std::size_t min_components, std::size_t max_components,
                              std::size_t max_outcomes);
/// Random measure on Omega_S; each weight is zero with probability
/// zero_chance (at least one weight stays positive).
Dist random_dist(Rng& rng, const SpacePtr& space, SubsetMask s, double zero_chance = 0.0);
/// A valid causal space on p's space with measure p and random
/// delta x measure kernels.
CausalSpace random_mechanism_on(Rng& rng, const Dist& p);
/// DAG SCM with 1..max_variables variables, 2..max_domain outcomes each and
/// up to max_domain noise values.
ScmSpec random_scm(Rng& rng, std::size_t max_variables, std::size_t max_domain);

/// Empirical law of the two-stage sampler omega_U ~ q, omega ~ K_U(omega_U, .).
Dist monte_carlo_intervention(const CausalSpace& cs, const Dist& q, std::size_t samples,
                              std::uint64_t seed);

// Counterexamples ------------------------------------------------------------

/// Intervening on H_S via Q versus on H_{S|R} via the restriction Q' of the
/// first intervention measure.
struct CompositionCase {
  CausalSpace space;
  SubsetMask s;
  SubsetMask r;
  Dist q;        // on Omega_S
  Dist q_prime;  // on Omega_{S|R}
  Dist small;    // P^do(S, Q)
  Dist big;      // P^do(S|R, Q')
  double discrepancy = 0.0;  // max |small(A) - big(A)| over atoms
};

/// Binary X1, X2, X3 and Y = X1 xor X2; the X's do not affect one another and
/// X1, X2 agree with probability 0.9 under P (independent when coupled is
/// false). S = {X3}, R = {X1}.
CompositionCase composition_counterexample(bool coupled = true);

struct ReversibilityCase {
  CausalSpace space;
  SubsetMask r;  // amount
  SubsetMask u;  // price
  Dist q1;       // on Omega_R
  Dist q2;       // on Omega_U
  double premise_u = 0.0;   // max |P^do(R, Q1)(B) - Q2(B)| over B in H_U
  double premise_r = 0.0;   // max |P^do(U, Q2)(C) - Q1(C)| over C in H_R
  double conclusion = 0.0;  // max |P(A) - Q1(A)| over A in H_R
  std::string witness;      // an atom A of Omega_R attaining the conclusion gap
};

/// Checks the reversibility premises and conclusion with S empty for given
/// Q1 on H_R and Q2 on H_U.
ReversibilityCase check_reversibility(const CausalSpace& cs, SubsetMask r, SubsetMask u,
                                      const Dist& q1, const Dist& q2);
/// Q1, Q2 solving both premises, by fixed-point iteration of
/// Q1 -> marginal(P^do(U, marginal(P^do(R, Q1), U)), R).
std::pair<Dist, Dist> reversibility_fixed_point(const CausalSpace& cs, SubsetMask r, SubsetMask u);
/// Binary amount and price with cyclic kernels; P's amount marginal is away
/// from the fixed point.
ReversibilityCase reversibility_counterexample();

// Fixtures -------------------------------------------------------------------

/// X := N_X ~ Bern(0.5), Y := X xor N_Y with N_Y ~ Bern(0.1).
ScmSpec xor_scm();
/// Binary Markov chain X -> Y -> Z with flip noise.
ScmSpec chain_scm();
/// Binary V -> U, V -> A, U -> A.
ScmSpec backdoor_scm();
/// Binary H -> U -> M -> Y with H -> Y; H is the first component.
ScmSpec hidden_confounder_scm();
/// Y := (X0 + X1 + N) mod k with uniform X0, X1 and N = 0 with probability
/// 1 - flip, optionally with an independent uniform extra component. H_{X0}
/// is dormant on {Y = 0}.
ScmSpec dormant_scm(std::size_t k, double flip, bool extra);

/// Ice cream sales I and shark attacks S, correlated under P
/// ([.4, .1, .1, .4]) while neither kernel depends on the other variable.
CausalSpace ice_cream_space();
/// 3 x 3 quantized altitude/temperature: altitude is a global source,
/// intervening on temperature leaves altitude at its marginal.
CausalSpace discrete_altitude_space();

/// Binary Z and Y, no covariate, Y_0 = 0 and Y_1 = 1.
PoSpec deterministic_po();
/// Binary Z and Y, no covariate; treated units tend to have Y_1 = 1.
PoSpec confounded_po();

}  // namespace causal
