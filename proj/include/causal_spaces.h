#ifndef CAUSAL_SPACES_H
#define CAUSAL_SPACES_H

/* C interface to the causal-spaces library. Every function returns a
 * cs_status; on failure cs_last_error() describes the problem. Strings
 * returned through char** are owned by the caller and released with
 * cs_string_free. Subsets are index lists such as "0,2" (names are accepted
 * too) and events are conjunctions such as "X=1 & Y in {0,1}". */

#include <stddef.h>

#if defined(CS_BUILDING_LIBRARY)
#define CS_API __attribute__((visibility("default")))
#else
#define CS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct cs_space cs_space;

typedef enum cs_status {
  CS_OK = 0,
  CS_ERR_ARGUMENT = 1,      /* null pointer, buffer too small */
  CS_ERR_PARSE = 2,         /* malformed document or expression */
  CS_ERR_DOMAIN = 3,        /* argument does not fit the space */
  CS_ERR_INVALID_SPACE = 4, /* the space violates an axiom */
  CS_ERR_NULL_SET = 5,      /* conditioning on a null atom */
  CS_ERR_CONTRACT = 6,      /* precondition of the operation not met */
  CS_ERR_INTERNAL = 7
} cs_status;

typedef enum cs_effect { CS_EFFECT_NONE = 0, CS_EFFECT_ACTIVE = 1, CS_EFFECT_DORMANT = 2 } cs_effect;

CS_API const char* cs_version(void);
/* Message of the last failed call on this thread, "" if none. */
CS_API const char* cs_last_error(void);
CS_API void cs_string_free(char* s);

/* Parses a space, SCM or potential-outcome document (SCM and PO documents are
 * compiled). The axioms are not checked here. */
CS_API cs_status cs_space_load(const char* json_text, cs_space** out);
/* Compiles an SCM or PO document. For PO documents *mask_json receives the
 * kernel provenance mask; otherwise it is set to NULL. mask_json may be NULL. */
CS_API cs_status cs_space_compile(const char* json_text, cs_space** out, char** mask_json);
CS_API void cs_space_free(cs_space* space);

CS_API cs_status cs_space_to_json(const cs_space* space, char** out);
CS_API cs_status cs_space_dimension(const cs_space* space, size_t* out);
/* Number of atoms of Omega_U. */
CS_API cs_status cs_space_atom_count(const cs_space* space, const char* subset, size_t* out);
/* Copies P into out (capacity cap); *len receives the number of atoms. */
CS_API cs_status cs_space_weights(const cs_space* space, double* out, size_t cap, size_t* len);

/* *valid is 1 or 0; report_json (may be NULL) receives the violations. */
CS_API cs_status cs_space_validate(const cs_space* space, int* valid, char** report_json);

/* Weights of the Dirac measure at the atom given by outcome labels of U. */
CS_API cs_status cs_space_dirac(const cs_space* space, const char* subset, const char* labels,
                                double* out, size_t cap, size_t* len);
/* Intervention on H_U via Q (weights over Omega_U). hard != 0 uses the
 * hard-intervention closed form, otherwise the general formula with the
 * trivial internal mechanism. Fails with CS_ERR_INVALID_SPACE if the input
 * space is invalid. */
CS_API cs_status cs_space_intervene(const cs_space* space, const char* subset, const double* q,
                                    size_t q_len, int hard, cs_space** out);
CS_API cs_status cs_space_probability(const cs_space* space, const char* event, double* out);

CS_API cs_status cs_space_classify(const cs_space* space, const char* u, const char* event,
                                   cs_effect* out);
CS_API cs_status cs_space_no_effect_given(const cs_space* space, const char* u, const char* v,
                                          const char* event, int* out);
/* event NULL: global source. */
CS_API cs_status cs_space_is_source(const cs_space* space, const char* u, const char* event,
                                    int* out);
/* Report with the estimate, the hypotheses and the true interventional value. */
CS_API cs_status cs_space_adjust(const cs_space* space, const char* u, const char* v,
                                 const double* q, size_t q_len, const char* event,
                                 char** report_json);

CS_API cs_status cs_demo_brownian(size_t steps, double horizon, double at, double value,
                                  char** csv);
CS_API cs_status cs_demo_altitude(char** json_out);
CS_API cs_status cs_demo_rice(char** json_out);

#ifdef __cplusplus
}
#endif

#endif
