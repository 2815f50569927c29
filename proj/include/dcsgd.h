/* C interface to the dcsgd library: robust divide-and-conquer stochastic
 * optimization, scalar robust mean estimation, candidate merging, the
 * synthetic benchmark harness, and SVG summary plots.
 *
 * All functions return DCSGD_OK on success. On failure they return a status
 * code and leave a human-readable message retrievable (per thread) through
 * dcsgd_last_error(). Strings returned through char** out-parameters are
 * heap-allocated and must be released with dcsgd_string_free().
 */
#ifndef DCSGD_H
#define DCSGD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DCSGD_API __declspec(dllexport)
#else
#define DCSGD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dcsgd_status {
  DCSGD_OK = 0,
  DCSGD_EINVAL = 1, /* invalid argument / config validation failure */
  DCSGD_EIO = 2,    /* file system failure */
  DCSGD_EFAIL = 3   /* internal failure */
} dcsgd_status;

/* Opaque experiment configuration handle. */
typedef struct dcsgd_config dcsgd_config;

DCSGD_API const char* dcsgd_version(void);

/* Message describing the most recent failure on this thread ("" if none). */
DCSGD_API const char* dcsgd_last_error(void);

DCSGD_API void dcsgd_string_free(char* s);

/* --- experiment configs ------------------------------------------------- */

DCSGD_API dcsgd_status dcsgd_config_from_json(const char* json_text, dcsgd_config** out);

/* scale is "desk" or "paper". */
DCSGD_API dcsgd_status dcsgd_config_from_preset(const char* id, const char* scale,
                                                dcsgd_config** out);

DCSGD_API dcsgd_status dcsgd_config_set_seed(dcsgd_config* cfg, uint64_t seed);

DCSGD_API dcsgd_status dcsgd_config_to_json(const dcsgd_config* cfg, char** out_json);

DCSGD_API void dcsgd_config_free(dcsgd_config* cfg);

/* Newline-separated "id: description" lines for every known preset. */
DCSGD_API dcsgd_status dcsgd_preset_list(char** out_text);

/* Runs every configured method over every trial and writes records.csv,
 * summary.csv and config.resolved.json into out_dir (created if missing). */
DCSGD_API dcsgd_status dcsgd_run(const dcsgd_config* cfg, const char* out_dir, int workers);

/* --- one-off estimators and merges -------------------------------------- */

/* method: "mean", "mom", "catoni" or "trunc". k_blocks <= 0 picks the
 * default block count for mom; sigma <= 0 plugs the sample variance into
 * catoni (sigma is a standard deviation). */
DCSGD_API dcsgd_status dcsgd_estimate(const char* method, const double* xs, size_t n,
                                      double delta, int k_blocks, double sigma, double* out);

/* rule: "geomed", "smball" or "median". cands is k x d row-major; out
 * receives d values. beta <= 0 keeps the bare-majority smball threshold. */
DCSGD_API dcsgd_status dcsgd_merge(const char* rule, const double* cands, size_t k, size_t d,
                                   double beta, double* out);

/* --- reporting ----------------------------------------------------------- */

/* metric must be "excess_risk". */
DCSGD_API dcsgd_status dcsgd_plot(const char* summary_csv_path, const char* metric,
                                  const char* out_svg_path);

/* Runs the property-check battery (merge requirement, quadratic growth,
 * smoothness, majority concentration). Prints one line per property to
 * stdout when verbose is nonzero; *failures receives the failure count. */
DCSGD_API dcsgd_status dcsgd_verify(uint64_t seed, int verbose, int* failures);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DCSGD_H */
