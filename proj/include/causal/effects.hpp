#pragma once

// Causal effects, sources, time-respecting mechanisms and adjustment. Every
// universally quantified definition is evaluated by an exhaustive scan over
// the subsets of T and the atoms of the relevant Omega_S.

#include <optional>
#include <string>
#include <vector>

#include "causal/causal_space.hpp"

namespace causal {

enum class EffectClass { kNone, kActive, kDormant };

const char* to_string(EffectClass c);

/// Effect of H_U on the event a: NONE if K_S(., a) == K_{S-U}(., a) for every
/// S; otherwise ACTIVE if K_U(omega, a) != P(a) for some omega; otherwise
/// DORMANT.
EffectClass classify_effect(const CausalSpace& cs, SubsetMask u, const Event& a);

/// Effect of H_U on the sub-sigma-algebra H_V, decided on the atoms of Omega_V.
EffectClass classify_effect_on_sigma(const CausalSpace& cs, SubsetMask u, SubsetMask v);

/// H_U has no causal effect on a given H_V:
/// K_{S|V}(., a) == K_{(S|V)-(U-V)}(., a) for every S.
bool has_no_effect_given(const CausalSpace& cs, SubsetMask u, SubsetMask v, const Event& a);

/// K_U is trivial: H_U has no causal effect on H_{T-U}.
bool is_trivial_kernel(const CausalSpace& cs, SubsetMask u);

/// Disjoint subsets of T listed in increasing time order.
class TimePartition {
 public:
  explicit TimePartition(std::vector<SubsetMask> slices);
  const std::vector<SubsetMask>& slices() const { return slices_; }

 private:
  std::vector<SubsetMask> slices_;
};

/// For every i < j, H_{slice j} has no causal effect on H_{slice i}.
bool is_time_respecting(const CausalSpace& cs, const TimePartition& tp);

/// K_U(., a) is a version of P(a | H_U). Atoms of Omega_U with zero P-mass are
/// skipped.
bool is_source(const CausalSpace& cs, SubsetMask u, const Event& a);
/// H_U is a source of every event: each row of K_U over a positive-mass atom
/// equals the conditional distribution of P.
bool is_global_source(const CausalSpace& cs, SubsetMask u);
/// H_U is a source of every event of H_V.
bool is_source_of_sigma(const CausalSpace& cs, SubsetMask u, SubsetMask v);

struct ActivationWitness {
  SubsetMask intervened;  // S - U, hard-intervened with a Dirac mass
  AtomIndex omega0;       // witness atom of Omega
  SubsetMask activated;   // V = S & U
  double kernel_value = 0.0;        // K^do_V(omega0, a) in the intervened space
  double intervened_measure = 0.0;  // P^do(a) in the intervened space
};

/// Turns a dormant effect into an active one: finds S and omega0 with
/// K_S(omega0, a) != K_{S-U}(omega0, a), hard-intervenes on H_{S-U} with the
/// Dirac mass at omega0 and checks that H_{S&U} is actively causal to a there.
/// Throws ContractError unless the effect is DORMANT, InternalError if no
/// witness verifies.
ActivationWitness activate_dormant(const CausalSpace& cs, SubsetMask u, const Event& a);

struct AdjustmentReport {
  double estimate = 0.0;
  bool condition_i = false;  // do-conditional equals observational conditional
  bool case_a = false;       // H_U is a local source of H_V
  bool case_b = false;       // H_U has no causal effect on H_V
  bool case_c = false;       // V subset of U
  bool trusted = false;      // condition_i and one of the cases
  std::vector<std::string> notes;
};

/// Estimates P^do(U, Q)(a) from P and Q alone through
/// sum_{omega_U} Q(omega_U) sum_{omega_V} r(omega_V | omega_U) P(a | omega_U, omega_V)
/// with r chosen by the case that holds (degenerate for V subset of U, the
/// conditional P(. | omega_U) for a source, the P-marginal for no effect).
/// The hypotheses are checked numerically against the actual intervention;
/// when they fail the estimate is still returned with trusted == false.
AdjustmentReport adjustment_estimate(const CausalSpace& cs, SubsetMask u, SubsetMask v,
                                     const Dist& q, const Event& a);

}  // namespace causal
