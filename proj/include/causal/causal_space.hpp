#pragma once

// Causal spaces over finite product spaces: an observational measure plus one
// causal kernel per subset of the index set, together with interventions.

#include <optional>
#include <string>
#include <vector>

#include "causal/measure.hpp"

namespace causal {

/// The family {K_S : S subset of T}, stored totally: kernels[S.bits()].
class CausalMechanism {
 public:
  CausalMechanism(SpacePtr space, std::vector<Kernel> kernels);

  const SpacePtr& space() const { return space_; }
  const Kernel& operator[](SubsetMask s) const;
  const std::vector<Kernel>& kernels() const { return kernels_; }

 private:
  SpacePtr space_;
  std::vector<Kernel> kernels_;
};

/// (Omega, H, P, K). Construction checks only that the pieces fit together;
/// use validate_causal_space for the axioms.
class CausalSpace {
 public:
  CausalSpace(Dist p, CausalMechanism mechanism);

  const SpacePtr& space() const { return p_.space(); }
  const Dist& p() const { return p_; }
  const CausalMechanism& mechanism() const { return mechanism_; }
  const Kernel& kernel(SubsetMask s) const { return mechanism_[s]; }

 private:
  Dist p_;
  CausalMechanism mechanism_;
};

struct Violation {
  enum class Kind {
    kTrivialIntervention,       // K_empty differs from P
    kInterventionalDeterminism  // a row of K_S does not fix omega_S
  };
  Kind kind;
  SubsetMask subset;
  AtomIndex atom;     // the row omega_S
  std::string event;  // the event A on which the axiom fails
  double expected = 0.0;
  double actual = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }
  std::string summary(const FiniteProductSpace& space) const;
};

/// Checks K_empty(., A) == P(A) and K_S(omega, A & B) == 1_A(omega) K_S(omega, B)
/// for A in H_S. On a finite space the second axiom holds iff every row's
/// S-marginal is the Dirac mass at the row's atom; each failing row is
/// reported with the event {omega' : omega'_S == omega_S}.
ValidationReport validate_causal_space(const CausalSpace& cs, double tolerance = kEpsNorm);

/// Throws DomainError carrying the report summary if cs is not valid.
void require_valid(const CausalSpace& cs);

/// An intervention on H_U via (Q, L). `internal` is a causal space over the
/// U-subspace whose measure is Q; leaving it empty requests a hard
/// intervention.
struct InterventionSpec {
  SubsetMask u;
  Dist q;
  std::optional<CausalSpace> internal;
};

/// P^do(U, Q)(A) = sum_{omega_U} Q(omega_U) K_U(omega_U, A).
Dist intervention_measure(const CausalSpace& cs, const Dist& q);

/// The intervened causal space: measure from intervention_measure and kernels
/// K^do_S(omega, A) = sum_{omega'_U} L_{S&U}(omega_{S&U}, omega'_U)
///                    K_{S|U}((omega_{S-U}, omega'_U), A).
/// A spec without an internal mechanism uses trivial_mechanism(U, Q).
CausalSpace intervene(const CausalSpace& cs, const InterventionSpec& spec);

/// Hard intervention through its closed form
/// K^do_S(omega, A) = sum_{omega'_{U-S}} Q(omega'_{U-S}) K_{S|U}((omega_S, omega'_{U-S}), A).
CausalSpace intervene_hard(const CausalSpace& cs, SubsetMask u, const Dist& q);

/// The internal mechanism of a hard intervention, as a causal space on the
/// U-subspace: every L_V row at omega_V is delta_{omega_V} x Q restricted to
/// U - V. This is used even when Q does not factorize across V and U - V.
CausalSpace trivial_mechanism(SubsetMask u, const Dist& q);

/// Mechanism whose kernel rows are the conditional distributions of p. p must
/// give positive mass to every atom of every Omega_S (NullSetError otherwise).
CausalMechanism mechanism_from_conditionals(const Dist& p);

/// The U-subspace image of a measure on Omega_U.
Dist to_subspace(const Dist& q, const SpacePtr& subspace);

}  // namespace causal
