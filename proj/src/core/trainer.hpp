#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/losses.hpp"
#include "core/metrics.hpp"
#include "core/nets.hpp"

namespace mvsc {

// Parameter groups. Critic parameters (discriminators, predictors) and main
// parameters (encoders, decoders, self-expression matrices) update on
// separate optimizer instances and never mix.
bool is_critic_param(const std::string& name);
bool is_selfexpr_param(const std::string& name);
bool is_encoder_decoder_param(const std::string& name);
bool is_main_param(const std::string& name);

class Adam {
 public:
  Adam(const ParamStore& like, double step_size, double beta1, double beta2, double eps);
  // direction = -1 descends, +1 ascends. Only tensors matching `mask` move.
  void update(ParamStore& params, const ParamStore& grads,
              const std::function<bool(const std::string&)>& mask, double direction);

 private:
  ParamStore m_, v_;
  double lr_, b1_, b2_, eps_;
  int t_ = 0;
};

struct TrainedModel {
  ParamStore params;
  NetShapes shapes;
  Config config;

  std::vector<Matrix> selfexpr_matrices() const;  // copies, diag exactly zero
};

struct PretrainRecord {
  int step;
  double recon;
  double kl;
  double total;
};

struct TrainOutcome {
  TrainedModel model;
  std::vector<PretrainRecord> pretrain_log;
  std::vector<std::pair<int, LossReport>> train_log;
};

// Expects an already-normalized dataset. Initializes parameters from the
// config seed, runs the warm-up phase over encoders/decoders, then the
// alternating critic/main schedule. Aborts with a numeric error when the loss
// leaves the finite range.
TrainOutcome train(const MultiViewDataset& dataset, const Config& cfg);

// Warm-up phase only (encoders/decoders); exposed for inspection.
ParamStore pretrain(const MultiViewDataset& dataset, const Config& cfg,
                    std::vector<PretrainRecord>* log = nullptr);

struct ClusterResult {
  std::vector<int> labels;
  Matrix affinity;
  std::vector<Matrix> per_view_coeffs;
  std::optional<MetricsReport> metrics;  // filled when the dataset has labels
};

ClusterResult cluster(const TrainedModel& model, const MultiViewDataset& dataset, int k);

// normalize -> train -> cluster -> evaluate; the whole pipeline behind the
// `train` command.
struct PipelineResult {
  TrainOutcome outcome;
  ClusterResult clusters;
  int k = 0;
};
PipelineResult run_pipeline(const MultiViewDataset& raw, const Config& cfg);

// Noise-free embeddings (common code = posterior mean) for every view.
std::vector<LatentBundle> embed_dataset(const TrainedModel& model,
                                        const MultiViewDataset& normalized_ds);

// Checkpoint round-trip. The archive carries the config echo; view widths are
// recovered from the stored tensor shapes.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace mvsc
