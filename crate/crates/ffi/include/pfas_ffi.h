/* Generated by cbindgen; do not edit. */

#ifndef PFAS_FFI_H
#define PFAS_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum PfasStatus {
  PFAS_STATUS_OK = 0,
  PFAS_STATUS_NULL_POINTER = 1,
  PFAS_STATUS_INVALID_UTF8 = 2,
  PFAS_STATUS_UNKNOWN_PROCESS = 3,
  PFAS_STATUS_UNKNOWN_PRESET = 4,
  PFAS_STATUS_VALIDATION = 5,
  PFAS_STATUS_DOMAIN = 6,
  PFAS_STATUS_PARSE = 7,
  PFAS_STATUS_CONFLICT = 8,
  PFAS_STATUS_INTERNAL = 99,
} PfasStatus;

/**
 * Exposure class of a patterning process.
 */
typedef enum PfasExposure {
  PFAS_EXPOSURE_DUV_DRY = 0,
  PFAS_EXPOSURE_DUV_IMMERSION = 1,
  PFAS_EXPOSURE_EUV = 2,
} PfasExposure;

/**
 * Opaque process catalog: the built-in processes plus registered custom ones.
 */
typedef struct PfasCatalog PfasCatalog;

/**
 * Opaque layer stack.
 */
typedef struct PfasStack PfasStack;

/**
 * One catalog row. `steps` is ordered dry etch, litho, metallization,
 * metrology, wet etch, deposition.
 */
typedef struct PfasProcessInfo {
  uint32_t steps[6];
  uint32_t masks;
  enum PfasExposure exposure;
} PfasProcessInfo;

/**
 * Stack-level totals.
 */
typedef struct PfasTotals {
  uint32_t total_pfas_layers;
  uint32_t feol_pfas_layers;
  uint32_t mol_pfas_layers;
  uint32_t beol_pfas_layers;
  uint32_t euv_masks;
  uint32_t duv_masks;
  uint32_t litho_steps;
  uint32_t total_steps;
  double litho_energy;
} PfasTotals;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into this library on the same thread.
 */
const char *pfas_last_error_message(void);

/**
 * Creates a catalog holding the built-in processes.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PfasStatus pfas_catalog_new(struct PfasCatalog **out);

/**
 * # Safety
 * `catalog` must come from `pfas_catalog_new` or be null.
 */
void pfas_catalog_free(struct PfasCatalog *catalog);

/**
 * Registers a custom process given as a JSON object.
 *
 * # Safety
 * `catalog` must be a live handle and `json` a NUL-terminated string.
 */
enum PfasStatus pfas_catalog_register_json(struct PfasCatalog *catalog, const char *json);

/**
 * Looks up a process by id. A null catalog means the built-in processes.
 *
 * # Safety
 * `id` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PfasStatus pfas_lookup_process(const struct PfasCatalog *catalog,
                                    const char *id,
                                    struct PfasProcessInfo *out);

/**
 * Creates a stack from a preset name (`asap7`, `n7-euv`, `n7-duv`).
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PfasStatus pfas_stack_from_preset(const char *name, struct PfasStack **out);

/**
 * Creates a stack from a stack document. Custom processes in the document
 * are registered into `catalog`, which must then be non-null.
 *
 * # Safety
 * `catalog` must be a live handle or null, `json` a NUL-terminated string
 * and `out` a valid pointer.
 */
enum PfasStatus pfas_stack_from_json(struct PfasCatalog *catalog,
                                     const char *json,
                                     struct PfasStack **out);

/**
 * # Safety
 * `stack` must come from a `pfas_stack_from_*` call or be null.
 */
void pfas_stack_free(struct PfasStack *stack);

/**
 * Validates the stack and fills `out` with its totals under the default
 * energy weights. A null catalog means the built-in processes.
 *
 * # Safety
 * `stack` must be a live handle, `catalog` live or null, `out` valid.
 */
enum PfasStatus pfas_stack_metrics(const struct PfasStack *stack,
                                   const struct PfasCatalog *catalog,
                                   struct PfasTotals *out);

/**
 * Chip-level PFAS: PFAS layers × area / yield, in layer·cm².
 *
 * # Safety
 * `stack` must be a live handle, `catalog` live or null, `out` valid.
 */
enum PfasStatus pfas_chip_pfas(const struct PfasStack *stack,
                               const struct PfasCatalog *catalog,
                               double area_cm2,
                               double fab_yield,
                               double *out);

/**
 * Full analysis report as JSON, identical in shape to `pfas analyze --format json`.
 *
 * # Safety
 * `stack` must be a live handle, `catalog` live or null, `out` valid.
 * Free the returned string with `pfas_string_free`.
 */
enum PfasStatus pfas_analyze_json(const struct PfasStack *stack,
                                  const struct PfasCatalog *catalog,
                                  double area_cm2,
                                  double fab_yield,
                                  char **out);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void pfas_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PFAS_FFI_H */
