#include "mvsc/mvsc.h"

#include <cstring>
#include <string>

#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/losses.hpp"
#include "core/metrics.hpp"
#include "core/trainer.hpp"
#include "core/verify.hpp"
#include "core/viz.hpp"

struct mvsc_dataset {
  mvsc::MultiViewDataset ds;
};
struct mvsc_config {
  mvsc::Config cfg;
};
struct mvsc_model {
  mvsc::TrainedModel model;
};
struct mvsc_result {
  mvsc::ClusterResult res;
};

namespace {

thread_local std::string g_last_error;

mvsc_status status_of(mvsc::errc code) {
  switch (code) {
    case mvsc::errc::invalid_argument: return MVSC_ERR_INVALID_ARGUMENT;
    case mvsc::errc::io: return MVSC_ERR_IO;
    case mvsc::errc::format: return MVSC_ERR_FORMAT;
    case mvsc::errc::nonfinite: return MVSC_ERR_NONFINITE;
    case mvsc::errc::numeric: return MVSC_ERR_NUMERIC;
    case mvsc::errc::verify: return MVSC_ERR_VERIFY;
    case mvsc::errc::internal: return MVSC_ERR_INTERNAL;
  }
  return MVSC_ERR_INTERNAL;
}

template <typename F>
mvsc_status guarded(F&& f) {
  try {
    return f();
  } catch (const mvsc::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MVSC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MVSC_ERR_INTERNAL;
  }
}

mvsc_status invalid(const char* msg) {
  g_last_error = msg;
  return MVSC_ERR_INVALID_ARGUMENT;
}

void copy_row_major(const mvsc::Matrix& m, double* out) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) *out++ = m(r, c);
}

// Recomputes noise-free embeddings against the model's own normalization.
mvsc::LatentBundle embed_view(const mvsc_model* model, const mvsc_dataset* ds, int view) {
  mvsc::require(view >= 0 && view < model->model.shapes.num_views(),
                mvsc::errc::invalid_argument, "view index out of range");
  const mvsc::MultiViewDataset norm = mvsc::normalize_views(
      ds->ds, mvsc::parse_normalize_mode(model->model.config.normalize));
  const mvsc::Matrix zero_noise =
      mvsc::Matrix::Zero(norm.num_samples(), model->model.shapes.code_dim);
  return mvsc::encode(norm.views[static_cast<size_t>(view)], model->model.params, view,
                      zero_noise, model->model.shapes);
}

}  // namespace

extern "C" {

const char* mvsc_status_name(mvsc_status status) {
  switch (status) {
    case MVSC_OK: return "ok";
    case MVSC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case MVSC_ERR_IO: return "io";
    case MVSC_ERR_FORMAT: return "format";
    case MVSC_ERR_NONFINITE: return "nonfinite";
    case MVSC_ERR_NUMERIC: return "numeric";
    case MVSC_ERR_VERIFY: return "verify";
    case MVSC_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* mvsc_last_error(void) { return g_last_error.c_str(); }

mvsc_status mvsc_dataset_generate(const mvsc_synth_spec* spec, mvsc_dataset** out) {
  if (!spec || !out) return invalid("null argument");
  return guarded([&]() {
    mvsc::SynthSpec s;
    s.n = spec->n;
    s.k = spec->k;
    s.subspace_dim = spec->subspace_dim;
    s.latent_dim = spec->latent_dim;
    s.view_dims.assign(spec->view_dims, spec->view_dims + spec->num_views);
    s.noise_sigma = spec->noise_sigma;
    s.nonlinearity = mvsc::SynthSpec::parse_nonlinearity(
        spec->nonlinearity ? spec->nonlinearity : "tanh-affine");
    s.seed = spec->seed;
    *out = new mvsc_dataset{mvsc::generate_synthetic(s)};
    return MVSC_OK;
  });
}

mvsc_status mvsc_dataset_load(const char* dir, mvsc_dataset** out) {
  if (!dir || !out) return invalid("null argument");
  return guarded([&]() {
    *out = new mvsc_dataset{mvsc::load_dataset(dir)};
    return MVSC_OK;
  });
}

mvsc_status mvsc_dataset_save(const mvsc_dataset* ds, const char* dir) {
  if (!ds || !dir) return invalid("null argument");
  return guarded([&]() {
    mvsc::save_dataset(ds->ds, dir);
    return MVSC_OK;
  });
}

mvsc_status mvsc_dataset_normalize(const mvsc_dataset* ds, const char* mode,
                                   mvsc_dataset** out) {
  if (!ds || !mode || !out) return invalid("null argument");
  return guarded([&]() {
    *out = new mvsc_dataset{
        mvsc::normalize_views(ds->ds, mvsc::parse_normalize_mode(mode))};
    return MVSC_OK;
  });
}

void mvsc_dataset_free(mvsc_dataset* ds) { delete ds; }

int mvsc_dataset_num_samples(const mvsc_dataset* ds) { return ds ? ds->ds.num_samples() : 0; }
int mvsc_dataset_num_views(const mvsc_dataset* ds) { return ds ? ds->ds.num_views() : 0; }

int mvsc_dataset_view_dim(const mvsc_dataset* ds, int view) {
  if (!ds || view < 0 || view >= ds->ds.num_views()) return 0;
  return static_cast<int>(ds->ds.views[static_cast<size_t>(view)].cols());
}

int mvsc_dataset_num_classes(const mvsc_dataset* ds) { return ds ? ds->ds.num_classes() : 0; }

mvsc_status mvsc_dataset_labels(const mvsc_dataset* ds, int* out) {
  if (!ds || !out) return invalid("null argument");
  if (!ds->ds.labels) return invalid("dataset has no labels");
  const auto& labels = ds->ds.labels.value();
  std::memcpy(out, labels.data(), labels.size() * sizeof(int));
  return MVSC_OK;
}

mvsc_status mvsc_dataset_view(const mvsc_dataset* ds, int view, double* out) {
  if (!ds || !out) return invalid("null argument");
  if (view < 0 || view >= ds->ds.num_views()) return invalid("view index out of range");
  copy_row_major(ds->ds.views[static_cast<size_t>(view)], out);
  return MVSC_OK;
}

mvsc_status mvsc_config_create(mvsc_config** out) {
  if (!out) return invalid("null argument");
  *out = new mvsc_config{};
  return MVSC_OK;
}

mvsc_status mvsc_config_load(const char* path, mvsc_config** out) {
  if (!path || !out) return invalid("null argument");
  return guarded([&]() {
    *out = new mvsc_config{mvsc::Config::from_file(path)};
    return MVSC_OK;
  });
}

mvsc_status mvsc_config_set(mvsc_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return invalid("null argument");
  return guarded([&]() {
    cfg->cfg.set(key, value);
    return MVSC_OK;
  });
}

mvsc_status mvsc_config_get(const mvsc_config* cfg, const char* key, char* buf,
                            size_t buflen) {
  if (!cfg || !key || !buf || buflen == 0) return invalid("null argument");
  return guarded([&]() {
    const std::string v = cfg->cfg.get(key);
    std::snprintf(buf, buflen, "%s", v.c_str());
    return MVSC_OK;
  });
}

size_t mvsc_config_echo(const mvsc_config* cfg, int documented, char* buf, size_t buflen) {
  if (!cfg) return 0;
  const std::string s = documented ? cfg->cfg.to_string_documented() : cfg->cfg.to_string();
  if (buf && buflen > 0) std::snprintf(buf, buflen, "%s", s.c_str());
  return s.size() + 1;
}

void mvsc_config_free(mvsc_config* cfg) { delete cfg; }

mvsc_status mvsc_train(const mvsc_dataset* ds, const mvsc_config* cfg,
                       mvsc_step_callback callback, void* user, mvsc_model** out) {
  if (!ds || !cfg || !out) return invalid("null argument");
  return guarded([&]() {
    const mvsc::MultiViewDataset norm =
        mvsc::normalize_views(ds->ds, mvsc::parse_normalize_mode(cfg->cfg.normalize));
    mvsc::TrainOutcome outcome = mvsc::train(norm, cfg->cfg);
    if (callback) {
      static const char* pretrain_names[3] = {"recon", "kl", "total"};
      for (const mvsc::PretrainRecord& r : outcome.pretrain_log) {
        const double values[3] = {r.recon, r.kl, r.total};
        callback(user, "pretrain", r.step, 3, pretrain_names, values);
      }
      const int m = ds->ds.num_views();
      const std::vector<std::string> names = mvsc::LossReport::column_names(m);
      std::vector<const char*> cnames;
      for (const std::string& n : names) cnames.push_back(n.c_str());
      for (const auto& [step, report] : outcome.train_log) {
        const std::vector<double> values = report.column_values(m);
        callback(user, "train", step, static_cast<int>(values.size()), cnames.data(),
                 values.data());
      }
    }
    *out = new mvsc_model{std::move(outcome.model)};
    return MVSC_OK;
  });
}

void mvsc_model_free(mvsc_model* model) { delete model; }

int mvsc_model_num_views(const mvsc_model* model) {
  return model ? model->model.shapes.num_views() : 0;
}

mvsc_status mvsc_model_save(const mvsc_model* model, const char* path) {
  if (!model || !path) return invalid("null argument");
  return guarded([&]() {
    mvsc::save_model(model->model, path);
    return MVSC_OK;
  });
}

mvsc_status mvsc_model_load(const char* path, mvsc_model** out) {
  if (!path || !out) return invalid("null argument");
  return guarded([&]() {
    *out = new mvsc_model{mvsc::load_model(path)};
    return MVSC_OK;
  });
}

mvsc_status mvsc_model_cluster(const mvsc_model* model, const mvsc_dataset* ds, int k,
                               mvsc_result** out) {
  if (!model || !ds || !out) return invalid("null argument");
  return guarded([&]() {
    const int kk = k > 0 ? k : ds->ds.num_classes();
    mvsc::require(kk >= 2, mvsc::errc::invalid_argument,
                  "cluster count unknown: pass k or use a labeled dataset");
    *out = new mvsc_result{mvsc::cluster(model->model, ds->ds, kk)};
    return MVSC_OK;
  });
}

int mvsc_result_num_samples(const mvsc_result* res) {
  return res ? static_cast<int>(res->res.labels.size()) : 0;
}

mvsc_status mvsc_result_labels(const mvsc_result* res, int* out) {
  if (!res || !out) return invalid("null argument");
  std::memcpy(out, res->res.labels.data(), res->res.labels.size() * sizeof(int));
  return MVSC_OK;
}

mvsc_status mvsc_result_affinity(const mvsc_result* res, double* out) {
  if (!res || !out) return invalid("null argument");
  copy_row_major(res->res.affinity, out);
  return MVSC_OK;
}

mvsc_status mvsc_result_coeffs(const mvsc_result* res, int view, double* out) {
  if (!res || !out) return invalid("null argument");
  if (view < 0 || view >= static_cast<int>(res->res.per_view_coeffs.size()))
    return invalid("view index out of range");
  copy_row_major(res->res.per_view_coeffs[static_cast<size_t>(view)], out);
  return MVSC_OK;
}

mvsc_status mvsc_result_metrics(const mvsc_result* res, double* acc, double* nmi,
                                double* ari) {
  if (!res) return invalid("null argument");
  if (!res->res.metrics) return invalid("result carries no metrics (unlabeled dataset)");
  if (acc) *acc = res->res.metrics->acc;
  if (nmi) *nmi = res->res.metrics->nmi;
  if (ari) *ari = res->res.metrics->ari;
  return MVSC_OK;
}

void mvsc_result_free(mvsc_result* res) { delete res; }

mvsc_status mvsc_evaluate_labels(const int* truth, const int* pred, int n, double* acc,
                                 double* nmi, double* ari) {
  if (!truth || !pred || n <= 0) return invalid("null argument");
  return guarded([&]() {
    const std::vector<int> t(truth, truth + n), p(pred, pred + n);
    const mvsc::MetricsReport rep = mvsc::evaluate_clustering(t, p);
    if (acc) *acc = rep.acc;
    if (nmi) *nmi = rep.nmi;
    if (ari) *ari = rep.ari;
    return MVSC_OK;
  });
}

mvsc_status mvsc_model_embed(const mvsc_model* model, const mvsc_dataset* ds, int view,
                             const char* which, double* out, int* rows, int* cols) {
  if (!model || !ds || !which) return invalid("null argument");
  return guarded([&]() {
    const mvsc::LatentBundle b = embed_view(model, ds, view);
    const std::string w = which;
    const mvsc::Matrix* m = nullptr;
    if (w == "h") {
      m = &b.h;
    } else if (w == "zc") {
      m = &b.code.mean;
    } else if (w == "zs") {
      m = &b.zs;
    } else {
      mvsc::fail(mvsc::errc::invalid_argument, "unknown embedding kind: " + w);
    }
    if (rows) *rows = static_cast<int>(m->rows());
    if (cols) *cols = static_cast<int>(m->cols());
    if (out) copy_row_major(*m, out);
    return MVSC_OK;
  });
}

mvsc_status mvsc_model_embed2d(const mvsc_model* model, const mvsc_dataset* ds, int view,
                               const char* which, double* out) {
  if (!model || !ds || !which || !out) return invalid("null argument");
  return guarded([&]() {
    const mvsc::LatentBundle b = embed_view(model, ds, view);
    const std::string w = which;
    const mvsc::Matrix* m = nullptr;
    if (w == "h") {
      m = &b.h;
    } else if (w == "zc") {
      m = &b.code.mean;
    } else if (w == "zs") {
      m = &b.zs;
    } else {
      mvsc::fail(mvsc::errc::invalid_argument, "unknown embedding kind: " + w);
    }
    copy_row_major(mvsc::pca2(*m), out);
    return MVSC_OK;
  });
}

mvsc_status mvsc_model_cosine_stats(const mvsc_model* model, const mvsc_dataset* ds,
                                    int view_i, int view_j, double* common_common,
                                    double* common_specific) {
  if (!model || !ds) return invalid("null argument");
  return guarded([&]() {
    const mvsc::LatentBundle bi = embed_view(model, ds, view_i);
    const mvsc::LatentBundle bj = embed_view(model, ds, view_j);
    // Noise-free bundles: zc equals the posterior mean.
    mvsc::LatentBundle bi_mean = bi;
    bi_mean.zc = bi.code.mean;
    mvsc::LatentBundle bj_mean = bj;
    bj_mean.zc = bj.code.mean;
    const mvsc::CosineStats s = mvsc::cosine_stats(bi_mean, bj_mean);
    if (common_common) *common_common = s.common_common;
    if (common_specific) *common_specific = s.common_specific;
    return MVSC_OK;
  });
}

mvsc_status mvsc_model_cosine_block(const mvsc_model* model, const mvsc_dataset* ds,
                                    int view_i, int view_j, int subset, uint64_t seed,
                                    double* out, int* dim) {
  if (!model || !ds) return invalid("null argument");
  return guarded([&]() {
    mvsc::LatentBundle bi = embed_view(model, ds, view_i);
    bi.zc = bi.code.mean;
    mvsc::LatentBundle bj = embed_view(model, ds, view_j);
    bj.zc = bj.code.mean;
    const mvsc::CosineBlockMatrix block = mvsc::cosine_block_matrix(bi, bj, subset, seed);
    if (dim) *dim = static_cast<int>(block.values.rows());
    if (out) copy_row_major(block.values, out);
    return MVSC_OK;
  });
}

mvsc_status mvsc_write_heatmap_ppm(const char* path, const double* values, int rows,
                                   int cols, int signed_scale) {
  if (!path || !values || rows <= 0 || cols <= 0) return invalid("null argument");
  return guarded([&]() {
    mvsc::Matrix m(rows, cols);
    const double* p = values;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = *p++;
    if (signed_scale) {
      mvsc::write_signed_heatmap_ppm(path, m);
    } else {
      mvsc::write_heatmap_ppm(path, m);
    }
    return MVSC_OK;
  });
}

mvsc_status mvsc_write_scatter_ppm(const char* path, const double* xy, const int* labels,
                                   int n) {
  if (!path || !xy || n <= 0) return invalid("null argument");
  return guarded([&]() {
    mvsc::Matrix m(n, 2);
    for (int r = 0; r < n; ++r) {
      m(r, 0) = xy[2 * r];
      m(r, 1) = xy[2 * r + 1];
    }
    std::vector<int> lab;
    if (labels) lab.assign(labels, labels + n);
    mvsc::write_scatter_ppm(path, m, lab);
    return MVSC_OK;
  });
}

mvsc_status mvsc_verify(mvsc_check_callback callback, void* user) {
  return guarded([&]() {
    const std::vector<mvsc::CheckResult> checks = mvsc::run_verification();
    if (callback)
      for (const mvsc::CheckResult& c : checks)
        callback(user, c.name.c_str(), c.value, c.threshold, c.pass ? 1 : 0,
                 c.note.c_str());
    if (!mvsc::all_passed(checks)) {
      g_last_error = "verification failed";
      return MVSC_ERR_VERIFY;
    }
    return MVSC_OK;
  });
}

}  // extern "C"
