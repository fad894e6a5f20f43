/*
 * wpcurve — probabilistic wind-turbine power curve estimation.
 *
 * C interface of the shared library. All entry points are thread-safe as
 * long as each handle is used from one thread at a time. Functions return
 * WPC_OK (0) on success; on failure they return a status code and leave a
 * human-readable message retrievable with wpc_last_error() on the calling
 * thread.
 */

#ifndef WPCURVE_H
#define WPCURVE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wpc_status {
    WPC_OK = 0,
    WPC_ERR_INTERNAL = 1, /* unexpected failure inside the library */
    WPC_ERR_CONFIG = 2,   /* bad configuration: unknown key, invalid value, missing path */
    WPC_ERR_DATA = 3,     /* unusable input data, checkpoint or file */
    WPC_ERR_NUMERIC = 4   /* training divergence or numeric overflow */
} wpc_status;

/* Library version as "major.minor.patch". Static storage, do not free. */
const char* wpc_version(void);

/* Message of the most recent failure on this thread; valid until the next
 * library call on the same thread. Never NULL. */
const char* wpc_last_error(void);

/*
 * Batch commands. `config_json` is one JSON document (see docs in the README
 * for the schema); every command writes its artifacts under the configured
 * output directory. When `summary_json` is non-NULL it receives a heap
 * allocated JSON summary of the run, released with wpc_string_free().
 */
wpc_status wpc_cmd_ingest(const char* config_json, char** summary_json);
wpc_status wpc_cmd_train(const char* config_json, char** summary_json);
wpc_status wpc_cmd_predict(const char* config_json, char** summary_json);
wpc_status wpc_cmd_evaluate(const char* config_json, char** summary_json);
wpc_status wpc_cmd_ablate(const char* config_json, char** summary_json);
wpc_status wpc_cmd_synth(const char* config_json, char** summary_json);

void wpc_string_free(char* s);

/*
 * Embedding interface: a trained model as an opaque handle.
 */
typedef struct wpc_model wpc_model;

wpc_status wpc_model_open(const char* checkpoint_path, wpc_model** out_model);
void wpc_model_close(wpc_model* model);

/* Number of input features the model expects. */
int32_t wpc_model_feature_count(const wpc_model* model);

/* Name of feature `index` ("WS", "TI", ...); NULL when out of range. The
 * returned pointer has static storage. */
const char* wpc_model_feature_name(const wpc_model* model, int32_t index);

/*
 * Monte-Carlo prediction over `n_rows` rows of `n_features` raw (physical
 * unit) feature values in row-major order. Inputs are standardized
 * internally with the moments stored in the checkpoint. `mask_mode` is
 * "hard", "relaxed" or "off"; `n_passes` is the number of stochastic forward
 * evaluations. Each output array must hold n_rows doubles; any of them may
 * be NULL to skip that output. Outputs are in physical units: kW for the
 * mean, kW^2 for the variances.
 */
wpc_status wpc_model_predict(const wpc_model* model, const double* features, int32_t n_rows,
                             int32_t n_features, int32_t n_passes, const char* mask_mode,
                             uint64_t seed, double* out_mean_kw, double* out_epistemic_var_kw2,
                             double* out_aleatoric_var_kw2);

#ifdef __cplusplus
}
#endif

#endif /* WPCURVE_H */
