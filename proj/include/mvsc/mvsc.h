/* mvsc: multi-view subspace clustering toolkit.
 *
 * C API over the core library. All functions return mvsc_status; on failure
 * mvsc_last_error() carries a message for the calling thread. Handles are
 * opaque and freed with the matching *_free function. Matrix buffers are
 * row-major double arrays sized by the documented dimensions.
 */
#ifndef MVSC_H
#define MVSC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mvsc_status {
  MVSC_OK = 0,
  MVSC_ERR_INVALID_ARGUMENT = 1,
  MVSC_ERR_IO = 2,
  MVSC_ERR_FORMAT = 3,
  MVSC_ERR_NONFINITE = 4,
  MVSC_ERR_NUMERIC = 5,
  MVSC_ERR_VERIFY = 6,
  MVSC_ERR_INTERNAL = 7
} mvsc_status;

const char* mvsc_status_name(mvsc_status status);
const char* mvsc_last_error(void);

typedef struct mvsc_dataset mvsc_dataset;
typedef struct mvsc_config mvsc_config;
typedef struct mvsc_model mvsc_model;
typedef struct mvsc_result mvsc_result;

/* ---------- datasets ---------- */

typedef struct mvsc_synth_spec {
  int n;
  int k;
  int subspace_dim;
  int latent_dim;
  const int* view_dims;
  int num_views;
  double noise_sigma;
  const char* nonlinearity; /* "none" | "tanh-affine" */
  uint64_t seed;
} mvsc_synth_spec;

mvsc_status mvsc_dataset_generate(const mvsc_synth_spec* spec, mvsc_dataset** out);
mvsc_status mvsc_dataset_load(const char* dir, mvsc_dataset** out);
mvsc_status mvsc_dataset_save(const mvsc_dataset* ds, const char* dir);
/* mode: "zscore" | "minmax" | "none" */
mvsc_status mvsc_dataset_normalize(const mvsc_dataset* ds, const char* mode,
                                   mvsc_dataset** out);
void mvsc_dataset_free(mvsc_dataset* ds);

int mvsc_dataset_num_samples(const mvsc_dataset* ds);
int mvsc_dataset_num_views(const mvsc_dataset* ds);
int mvsc_dataset_view_dim(const mvsc_dataset* ds, int view);
int mvsc_dataset_num_classes(const mvsc_dataset* ds); /* 0 when unlabeled */
mvsc_status mvsc_dataset_labels(const mvsc_dataset* ds, int* out /* n */);
mvsc_status mvsc_dataset_view(const mvsc_dataset* ds, int view, double* out /* n*d */);

/* ---------- configuration ---------- */

mvsc_status mvsc_config_create(mvsc_config** out); /* defaults */
mvsc_status mvsc_config_load(const char* path, mvsc_config** out);
mvsc_status mvsc_config_set(mvsc_config* cfg, const char* key, const char* value);
mvsc_status mvsc_config_get(const mvsc_config* cfg, const char* key, char* buf,
                            size_t buflen);
/* Full key = value echo (documented != 0 adds doc comments). Returns the
 * required size including the NUL terminator; fills buf when large enough. */
size_t mvsc_config_echo(const mvsc_config* cfg, int documented, char* buf, size_t buflen);
void mvsc_config_free(mvsc_config* cfg);

/* ---------- training ---------- */

/* phase is "pretrain" or "train"; names/values describe one logged step. */
typedef void (*mvsc_step_callback)(void* user, const char* phase, int step,
                                   int num_values, const char* const* names,
                                   const double* values);

/* Normalizes per config, runs the warm-up phase and the alternating
 * critic/main schedule. The callback (optional) observes every logged step. */
mvsc_status mvsc_train(const mvsc_dataset* ds, const mvsc_config* cfg,
                       mvsc_step_callback callback, void* user, mvsc_model** out);
void mvsc_model_free(mvsc_model* model);
int mvsc_model_num_views(const mvsc_model* model);
mvsc_status mvsc_model_save(const mvsc_model* model, const char* path);
mvsc_status mvsc_model_load(const char* path, mvsc_model** out);

/* ---------- clustering and metrics ---------- */

/* k = 0 infers the cluster count from dataset labels. */
mvsc_status mvsc_model_cluster(const mvsc_model* model, const mvsc_dataset* ds, int k,
                               mvsc_result** out);
int mvsc_result_num_samples(const mvsc_result* res);
mvsc_status mvsc_result_labels(const mvsc_result* res, int* out /* n */);
mvsc_status mvsc_result_affinity(const mvsc_result* res, double* out /* n*n */);
mvsc_status mvsc_result_coeffs(const mvsc_result* res, int view, double* out /* n*n */);
/* Fails when the dataset that produced the result had no ground truth. */
mvsc_status mvsc_result_metrics(const mvsc_result* res, double* acc, double* nmi,
                                double* ari);
void mvsc_result_free(mvsc_result* res);

mvsc_status mvsc_evaluate_labels(const int* truth, const int* pred, int n, double* acc,
                                 double* nmi, double* ari);

/* ---------- embeddings and correlation structure ---------- */

/* which: "h" | "zc" | "zs"; zc is the posterior mean (noise-free). Call with
 * out == NULL to query rows/cols. The dataset is normalized per the model's
 * config before encoding. */
mvsc_status mvsc_model_embed(const mvsc_model* model, const mvsc_dataset* ds, int view,
                             const char* which, double* out, int* rows, int* cols);
/* Top-2 principal-component projection of an embedding; out is n*2. */
mvsc_status mvsc_model_embed2d(const mvsc_model* model, const mvsc_dataset* ds, int view,
                               const char* which, double* out);
/* Mean |cosine| between matched common codes of two views, and between the
 * common and specific code inside view_i. */
mvsc_status mvsc_model_cosine_stats(const mvsc_model* model, const mvsc_dataset* ds,
                                    int view_i, int view_j, double* common_common,
                                    double* common_specific);
/* Block cosine matrix over a sampled subset; blocks are zc_i, zs_i, zc_j,
 * zs_j. Call with out == NULL to query dim (= 4 * subset). */
mvsc_status mvsc_model_cosine_block(const mvsc_model* model, const mvsc_dataset* ds,
                                    int view_i, int view_j, int subset, uint64_t seed,
                                    double* out, int* dim);

/* ---------- plot exports ---------- */

/* Binary PPM heatmap. signed_scale == 0 maps |value| from white to dark blue;
 * signed_scale != 0 maps [-1, 1] to blue/white/red. */
mvsc_status mvsc_write_heatmap_ppm(const char* path, const double* values, int rows,
                                   int cols, int signed_scale);
/* 2D scatter (xy is n*2 row-major) colored by optional labels. */
mvsc_status mvsc_write_scatter_ppm(const char* path, const double* xy, const int* labels,
                                   int n);

/* ---------- verification ---------- */

typedef void (*mvsc_check_callback)(void* user, const char* name, double value,
                                    double threshold, int pass, const char* note);

/* Runs the oracle suite (information identities, KL Monte Carlo, tabular
 * discriminator objective, self-expression closed form, assignment metrics).
 * Returns MVSC_ERR_VERIFY when any check fails. */
mvsc_status mvsc_verify(mvsc_check_callback callback, void* user);

#ifdef __cplusplus
}
#endif

#endif /* MVSC_H */
