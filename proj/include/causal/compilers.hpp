#pragma once

// Structural causal models and potential-outcome tables compiled into causal
// spaces, plus the truncated-factorization oracle used to cross-check them.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "causal/causal_space.hpp"

namespace causal {

/// One structural assignment X_j := f_j(PA_j, N_j) with a finite noise N_j.
struct ScmVariable {
  std::string name;
  std::vector<std::string> domain;
  /// Distribution of N_j; a deterministic variable has a single noise value.
  std::vector<double> noise;
  /// Indices of earlier variables.
  std::vector<std::size_t> parents;
  /// f_j as a lookup table, row-major over (parent values in `parents` order,
  /// then the noise value); entries are indices into `domain`.
  std::vector<std::size_t> table;
};

struct ScmSpec {
  std::vector<ScmVariable> variables;

  /// Checks table sizes, noise distributions and that the listed order is
  /// topological. A cyclic parent graph is rejected with the cycle spelled
  /// out.
  void validate() const;
  SpacePtr space() const;
};

/// P is the pushforward of the noise through the assignments, and the row of
/// K_S at omega_S is the pushforward through the assignments with X_j
/// replaced by omega_j for j in S.
CausalSpace compile_scm(const ScmSpec& scm);

/// Interventional distribution of the SCM with the given variables clamped,
/// by truncated factorization: prod_{j unclamped} P(x_j | pa_j) times the
/// clamp indicators. Entries of `clamp` are nullopt or an index into the
/// variable's domain.
Dist truncated_factorization_oracle(const ScmSpec& scm,
                                    const std::vector<std::optional<std::size_t>>& clamp);

/// Treatment Z, outcome Y and covariate X with one potential outcome Y_z per
/// treatment level.
struct PoSpec {
  std::vector<std::string> treatments;
  std::vector<std::string> outcomes;
  /// Empty means "no covariate"; the compiled space then carries a one-point
  /// covariate component.
  std::vector<std::string> covariates;
  /// Real scores of the outcome levels for treatment effects; empty means
  /// the level index.
  std::vector<double> outcome_scores;
  /// Joint law of (Z, X, Y_{z_0}, ..., Y_{z_{k-1}}), row-major in that order.
  std::vector<double> joint;

  void validate() const;
  std::size_t covariate_count() const { return covariates.empty() ? 1 : covariates.size(); }
};

/// Where each kernel of a compiled PO space comes from.
enum class KernelOrigin {
  kAxiom,           // fixed by the axioms (K_empty = P, K_T = Dirac)
  kMandatedOnY,     // K_Z: its restriction to outcome events is prescribed
  kFilled           // completed with observational conditionals
};

struct KernelProvenance {
  SubsetMask subset;
  KernelOrigin origin;
};

struct CompiledPo {
  CausalSpace space;
  std::vector<KernelProvenance> mask;  // one entry per subset, indexed by bits
};

/// Component indices of the compiled PO space: Omega = Z x Y x X.
inline constexpr std::size_t kPoTreatment = 0;
inline constexpr std::size_t kPoOutcome = 1;
inline constexpr std::size_t kPoCovariate = 2;

/// P(A x B x C) = P~(Z in A, Y_Z in B, X in C); K_Z(z, .) = delta_z x
/// P~(Y_z in .) x P(X in . | Z = z). Other kernels are observational
/// conditionals, falling back to delta x marginal on null atoms.
CompiledPo compile_po(const PoSpec& po);

/// P~(Y_z = y) for every outcome level y.
std::vector<double> potential_outcome_law(const PoSpec& po, std::size_t z);

/// E~[score(Y_{z1}) - score(Y_{z2})].
double ate(const PoSpec& po, std::size_t z1, std::size_t z2);

const char* to_string(KernelOrigin origin);

}  // namespace causal
