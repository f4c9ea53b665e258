#pragma once

// JSON documents for spaces, SCMs and potential-outcome tables, the event
// expression language, and the demo reports. Subsets are written as sorted
// index lists ("0,2"); weights are flat row-major arrays.

#include <string>
#include <string_view>

#include "json.hpp"

#include "causal/compilers.hpp"
#include "causal/effects.hpp"

namespace causal {

using nlohmann::json;

/// Throws ParseError with the byte offset on malformed text.
json parse_json_text(std::string_view text);

enum class DocumentKind { kSpace, kScm, kPo };
/// Decided by the top-level keys: "variables" is an SCM, "treatments" a PO
/// table, anything else a space.
DocumentKind document_kind(const json& doc);

/// {"components": [...], "p": [...], "kernels": {"": [[...]], "0": [[...], ...]}}
/// or {"components": [...], "p": [...], "mechanism": "conditionals"}. The
/// kernels of the empty set and of T may be omitted (P and Dirac rows).
/// Structure is checked here; the axioms are left to validate_causal_space.
CausalSpace space_from_json(const json& doc);
json space_to_json(const CausalSpace& cs);

/// {"variables": [{"name", "domain", "noise", "parents" (names), "table"}]}
ScmSpec scm_from_json(const json& doc);
json scm_to_json(const ScmSpec& scm);

/// {"treatments", "outcomes", "covariates"?, "outcome_scores"?, "joint"}
PoSpec po_from_json(const json& doc);
json po_to_json(const PoSpec& po);
/// {"kernels": {"0": "mandated-on-outcome", ...}, "components": [...]}
json po_mask_to_json(const CompiledPo& compiled);

/// Compiles SCM and PO documents and parses space documents.
CausalSpace load_any(const json& doc);

json report_to_json(const ValidationReport& report, const FiniteProductSpace& space);
json adjustment_to_json(const AdjustmentReport& report);

/// "0,2", "[0,2]", "[]", "" or component names such as "X,Y".
SubsetMask parse_subset(const FiniteProductSpace& space, std::string_view text);
/// Conjunction of predicates joined by '&': "name=value" or
/// "name in {a,b}". The empty string is the whole space.
Event parse_event(const SpacePtr& space, std::string_view text);
/// Outcome labels of the components of u in ascending order, comma separated.
AtomIndex parse_atom(const FiniteProductSpace& space, SubsetMask u, std::string_view text);
/// Comma separated numbers, optionally in brackets.
std::vector<double> parse_weights(std::string_view text);

/// CSV with columns time, mean_intervened, var_intervened, mean_conditioned,
/// var_conditioned for Brownian motion set (or conditioned) to value at time at.
std::string brownian_demo_csv(std::size_t steps, double horizon, double at, double value);
json altitude_demo_json();
json rice_demo_json();

}  // namespace causal
