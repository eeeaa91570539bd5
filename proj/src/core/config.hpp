#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace mvsc {

// Every hyperparameter of the pipeline, addressable as flat `key = value`
// text. Defaults were calibrated on the bundled synthetic benchmark and then
// frozen; the acceptance suite pins them.
struct Config {
  std::uint64_t seed = 1;
  std::string precision = "f64";   // only f64 is supported
  std::string normalize = "zscore";
  std::string batch_policy = "full";
  int full_batch_ceiling = 3000;

  std::vector<int> trunk_hidden = {128, 128};
  int feature_dim = 64;  // pre-split feature width
  int code_dim = 16;     // width of each of the two codes
  std::vector<int> decoder_hidden = {64, 128, 128};
  int disc_hidden = 64;
  int pred_hidden = 64;

  double lambda = 0.01;     // bottleneck multiplier (shared across views)
  double alpha = 0.1;       // cross-code unpredictability weight
  double beta = 1.0;        // reconstruction weight
  double gamma = 1.0;       // self-expression weight
  double lambda_se = 1.0;   // ridge weight inside the self-expression loss

  double step_size = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int pretrain_steps = 400;
  int train_steps = 600;
  int critic_steps = 1;     // critic updates per main update

  int cluster_k = 0;        // 0 = infer from labels
  int kmeans_restarts = 20;
  int kmeans_iters = 300;
  double kmeans_tol = 1e-6;

  std::string ablate;       // comma list of drop_Ls, drop_mkl, drop_cmi, drop_dis
  int log_every = 1;

  void validate() const;

  // key = value access; unknown keys are rejected by name.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  static std::vector<std::string> keys();
  static std::string key_doc(const std::string& key);

  // Full echo, one key = value line per key (stable order).
  std::string to_string() const;
  // Echo with doc comments, for --print-config.
  std::string to_string_documented() const;

  static Config from_string(const std::string& text);
  static Config from_file(const std::string& path);
};

std::vector<int> parse_int_list(const std::string& s);
std::string format_int_list(const std::vector<int>& v);

}  // namespace mvsc
