#ifndef LEMPERT_LAB_H
#define LEMPERT_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LlStatus {
  LL_STATUS_OK = 0,
  LL_STATUS_NULL_POINTER = 1,
  LL_STATUS_INVALID_ARGUMENT = 2,
  LL_STATUS_INVALID_DOMAIN = 3,
  LL_STATUS_OUTSIDE_DOMAIN = 4,
  LL_STATUS_NO_CONVERGENCE = 5,
  LL_STATUS_IO = 6,
  LL_STATUS_PANIC = 7,
} LlStatus;

/**
 * A planar Jordan domain.
 */
typedef struct LlDomain LlDomain;

/**
 * A normalized Riemann map from a domain onto the unit disc.
 */
typedef struct LlMap LlMap;

/**
 * Result of one experiment run.
 */
typedef struct LlReport LlReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static string.
 */
const char *ll_version(void);

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *ll_last_error_message(void);

/**
 * Builds a domain from its JSON description, e.g.
 * `{"kind": "ellipse", "a": 2, "b": 1}`.
 */
enum LlStatus ll_domain_from_json(const char *json, struct LlDomain **out);

/**
 * Releases a domain; null is ignored.
 */
void ll_domain_free(struct LlDomain *domain);

/**
 * Signed Euclidean distance to the boundary, positive inside.
 */
enum LlStatus ll_domain_signed_distance(const struct LlDomain *domain,
                                        double re,
                                        double im,
                                        double *out);

/**
 * Riemann map sending `(center_re, center_im)` to 0 with positive
 * derivative there. The map does not borrow the domain.
 */
enum LlStatus ll_map_new(const struct LlDomain *domain,
                         double center_re,
                         double center_im,
                         struct LlMap **out);

void ll_map_free(struct LlMap *map);

/**
 * Image of `z` and the derivative there, each as `(re, im)`; `derivative`
 * may be null.
 */
enum LlStatus ll_map_forward(const struct LlMap *map,
                             double re,
                             double im,
                             double *value,
                             double *derivative);

/**
 * Preimage of a point of the open unit disc.
 */
enum LlStatus ll_map_inverse(const struct LlMap *map, double re, double im, double *out);

/**
 * Lempert function of the mapped domain.
 */
enum LlStatus ll_lempert_planar(const struct LlMap *map,
                                double z_re,
                                double z_im,
                                double w_re,
                                double w_im,
                                double *out);

/**
 * Kobayashi–Royden metric at `z` in direction 1.
 */
enum LlStatus ll_kobayashi_royden(const struct LlMap *map, double re, double im, double *out);

/**
 * Lempert function of the unit ball of `ℂ^dim`; `z` and `w` hold
 * `2 dim` doubles each.
 */
enum LlStatus ll_lempert_ball(size_t dim, const double *z, const double *w, double *out);

/**
 * Runs `example4`, `theorem1`, `proposition2` or `estimates` on a JSON
 * configuration.
 */
enum LlStatus ll_experiment_run(const char *name, const char *config_json, struct LlReport **out);

/**
 * 1 when every verdict passed, 0 otherwise.
 */
enum LlStatus ll_report_passed(const struct LlReport *report, int32_t *out);

/**
 * Aggregates, verdicts and failures as JSON; release with
 * [`ll_string_free`].
 */
enum LlStatus ll_report_json(const struct LlReport *report, char **out);

/**
 * Writes `report.csv`, `report.json` and the plots into `dir`.
 */
enum LlStatus ll_report_write(const struct LlReport *report, const char *dir);

void ll_report_free(struct LlReport *report);

/**
 * Releases a string returned by this library.
 */
void ll_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEMPERT_LAB_H */
