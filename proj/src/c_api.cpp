#include "causal_spaces.h"

#include <cstring>
#include <optional>
#include <string>

#include "causal/document.hpp"
#include "causal/error.hpp"

using namespace causal;

struct cs_space {
  CausalSpace value;
  // Cached outcome of validate_causal_space.
  mutable std::optional<bool> valid;
};

namespace {

thread_local std::string last_error;

cs_status fail(cs_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
cs_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const ParseError& e) {
    return fail(CS_ERR_PARSE, e.what());
  } catch (const NullSetError& e) {
    return fail(CS_ERR_NULL_SET, e.what());
  } catch (const ContractError& e) {
    return fail(CS_ERR_CONTRACT, e.what());
  } catch (const DomainError& e) {
    return fail(CS_ERR_DOMAIN, e.what());
  } catch (const std::exception& e) {
    return fail(CS_ERR_INTERNAL, e.what());
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bool is_valid(const cs_space* s) {
  if (!s->valid) s->valid = validate_causal_space(s->value).valid();
  return *s->valid;
}

std::optional<cs_status> require_space(const cs_space* s) {
  if (!s) return fail(CS_ERR_ARGUMENT, "null space");
  if (!is_valid(s)) return fail(CS_ERR_INVALID_SPACE, "the space violates the causal-space axioms");
  return std::nullopt;
}

cs_status copy_weights(std::span<const double> w, double* out, size_t cap, size_t* len) {
  if (!len) return fail(CS_ERR_ARGUMENT, "null length pointer");
  *len = w.size();
  if (!out || cap < w.size()) {
    return fail(CS_ERR_ARGUMENT, "buffer holds " + std::to_string(cap) + " values, need " +
                                     std::to_string(w.size()));
  }
  std::copy(w.begin(), w.end(), out);
  return CS_OK;
}

Dist make_q(const cs_space* s, SubsetMask u, const double* q, size_t q_len) {
  if (!q && q_len > 0) throw DomainError("null intervention weights");
  return Dist(s->value.space(), u, std::vector<double>(q, q + q_len));
}

}  // namespace

extern "C" {

const char* cs_version(void) { return "0.1.0"; }

const char* cs_last_error(void) { return last_error.c_str(); }

void cs_string_free(char* s) { std::free(s); }

cs_status cs_space_load(const char* json_text, cs_space** out) {
  return guarded([&] {
    if (!json_text || !out) return fail(CS_ERR_ARGUMENT, "null argument");
    *out = new cs_space{load_any(parse_json_text(json_text)), std::nullopt};
    return CS_OK;
  });
}

cs_status cs_space_compile(const char* json_text, cs_space** out, char** mask_json) {
  return guarded([&] {
    if (!json_text || !out) return fail(CS_ERR_ARGUMENT, "null argument");
    if (mask_json) *mask_json = nullptr;
    const json doc = parse_json_text(json_text);
    switch (document_kind(doc)) {
      case DocumentKind::kSpace:
        return fail(CS_ERR_PARSE, "expected an SCM or potential-outcome document");
      case DocumentKind::kScm:
        *out = new cs_space{load_any(doc), std::nullopt};
        return CS_OK;
      case DocumentKind::kPo: {
        const PoSpec po = po_from_json(doc);
        CompiledPo compiled = [&] {
          try {
            return compile_po(po);
          } catch (const DomainError& e) {
            throw ParseError("", e.what());
          }
        }();
        const std::string mask = po_mask_to_json(compiled).dump(2);
        *out = new cs_space{std::move(compiled.space), std::nullopt};
        if (mask_json) *mask_json = copy_string(mask);
        return CS_OK;
      }
    }
    return fail(CS_ERR_INTERNAL, "unknown document kind");
  });
}

void cs_space_free(cs_space* space) { delete space; }

cs_status cs_space_to_json(const cs_space* space, char** out) {
  return guarded([&] {
    if (!space || !out) return fail(CS_ERR_ARGUMENT, "null argument");
    *out = copy_string(space_to_json(space->value).dump());
    return CS_OK;
  });
}

cs_status cs_space_dimension(const cs_space* space, size_t* out) {
  if (!space || !out) return fail(CS_ERR_ARGUMENT, "null argument");
  *out = space->value.space()->dimension();
  return CS_OK;
}

cs_status cs_space_atom_count(const cs_space* space, const char* subset, size_t* out) {
  return guarded([&] {
    if (!space || !subset || !out) return fail(CS_ERR_ARGUMENT, "null argument");
    const auto& sp = *space->value.space();
    *out = sp.atom_count(parse_subset(sp, subset));
    return CS_OK;
  });
}

cs_status cs_space_weights(const cs_space* space, double* out, size_t cap, size_t* len) {
  if (!space) return fail(CS_ERR_ARGUMENT, "null space");
  return copy_weights(space->value.p().weights(), out, cap, len);
}

cs_status cs_space_validate(const cs_space* space, int* valid, char** report_json) {
  return guarded([&] {
    if (!space || !valid) return fail(CS_ERR_ARGUMENT, "null argument");
    const auto report = validate_causal_space(space->value);
    space->valid = report.valid();
    *valid = report.valid() ? 1 : 0;
    if (report_json) {
      *report_json = copy_string(report_to_json(report, *space->value.space()).dump(2));
    }
    return CS_OK;
  });
}

cs_status cs_space_dirac(const cs_space* space, const char* subset, const char* labels,
                         double* out, size_t cap, size_t* len) {
  return guarded([&] {
    if (!space || !subset || !labels) return fail(CS_ERR_ARGUMENT, "null argument");
    const auto& sp = space->value.space();
    const SubsetMask u = parse_subset(*sp, subset);
    const Dist d = dirac(sp, parse_atom(*sp, u, labels));
    return copy_weights(d.weights(), out, cap, len);
  });
}

cs_status cs_space_intervene(const cs_space* space, const char* subset, const double* q,
                             size_t q_len, int hard, cs_space** out) {
  return guarded([&] {
    if (auto st = require_space(space)) return *st;
    if (!subset || !out) return fail(CS_ERR_ARGUMENT, "null argument");
    const SubsetMask u = parse_subset(*space->value.space(), subset);
    const Dist qd = make_q(space, u, q, q_len);
    CausalSpace result = hard ? intervene_hard(space->value, u, qd)
                              : intervene(space->value, InterventionSpec{u, qd, std::nullopt});
    *out = new cs_space{std::move(result), std::nullopt};
    return CS_OK;
  });
}

cs_status cs_space_probability(const cs_space* space, const char* event, double* out) {
  return guarded([&] {
    if (!space || !event || !out) return fail(CS_ERR_ARGUMENT, "null argument");
    *out = space->value.p().probability(parse_event(space->value.space(), event));
    return CS_OK;
  });
}

cs_status cs_space_classify(const cs_space* space, const char* u, const char* event,
                            cs_effect* out) {
  return guarded([&] {
    if (auto st = require_space(space)) return *st;
    if (!u || !event || !out) return fail(CS_ERR_ARGUMENT, "null argument");
    const auto& sp = space->value.space();
    switch (classify_effect(space->value, parse_subset(*sp, u), parse_event(sp, event))) {
      case EffectClass::kNone: *out = CS_EFFECT_NONE; break;
      case EffectClass::kActive: *out = CS_EFFECT_ACTIVE; break;
      case EffectClass::kDormant: *out = CS_EFFECT_DORMANT; break;
    }
    return CS_OK;
  });
}

cs_status cs_space_no_effect_given(const cs_space* space, const char* u, const char* v,
                                   const char* event, int* out) {
  return guarded([&] {
    if (auto st = require_space(space)) return *st;
    if (!u || !v || !event || !out) return fail(CS_ERR_ARGUMENT, "null argument");
    const auto& sp = space->value.space();
    *out = has_no_effect_given(space->value, parse_subset(*sp, u), parse_subset(*sp, v),
                               parse_event(sp, event))
               ? 1
               : 0;
    return CS_OK;
  });
}

cs_status cs_space_is_source(const cs_space* space, const char* u, const char* event, int* out) {
  return guarded([&] {
    if (auto st = require_space(space)) return *st;
    if (!u || !out) return fail(CS_ERR_ARGUMENT, "null argument");
    const auto& sp = space->value.space();
    const SubsetMask um = parse_subset(*sp, u);
    const bool src = event ? is_source(space->value, um, parse_event(sp, event))
                           : is_global_source(space->value, um);
    *out = src ? 1 : 0;
    return CS_OK;
  });
}

cs_status cs_space_adjust(const cs_space* space, const char* u, const char* v, const double* q,
                          size_t q_len, const char* event, char** report_json) {
  return guarded([&] {
    if (auto st = require_space(space)) return *st;
    if (!u || !v || !event || !report_json) return fail(CS_ERR_ARGUMENT, "null argument");
    const auto& sp = space->value.space();
    const SubsetMask um = parse_subset(*sp, u);
    const Dist qd = make_q(space, um, q, q_len);
    const Event a = parse_event(sp, event);
    const AdjustmentReport rep = adjustment_estimate(space->value, um, parse_subset(*sp, v), qd, a);
    json out = adjustment_to_json(rep);
    out["interventional"] = intervention_measure(space->value, qd).probability(a);
    *report_json = copy_string(out.dump(2));
    return CS_OK;
  });
}

cs_status cs_demo_brownian(size_t steps, double horizon, double at, double value, char** csv) {
  return guarded([&] {
    if (!csv) return fail(CS_ERR_ARGUMENT, "null argument");
    *csv = copy_string(brownian_demo_csv(steps, horizon, at, value));
    return CS_OK;
  });
}

cs_status cs_demo_altitude(char** json_out) {
  return guarded([&] {
    if (!json_out) return fail(CS_ERR_ARGUMENT, "null argument");
    *json_out = copy_string(altitude_demo_json().dump(2));
    return CS_OK;
  });
}

cs_status cs_demo_rice(char** json_out) {
  return guarded([&] {
    if (!json_out) return fail(CS_ERR_ARGUMENT, "null argument");
    *json_out = copy_string(rice_demo_json().dump(2));
    return CS_OK;
  });
}

}  // extern "C"
