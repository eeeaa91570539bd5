#include "core/trainer.hpp"

#include <cmath>

#include "core/rng.hpp"

namespace mvsc {

bool is_critic_param(const std::string& name) {
  return name.rfind("disc.", 0) == 0 || name.rfind("pred", 0) == 0;
}

bool is_selfexpr_param(const std::string& name) { return name.rfind("se", 0) == 0; }

bool is_encoder_decoder_param(const std::string& name) {
  return name.rfind("enc", 0) == 0 || name.rfind("dec", 0) == 0;
}

bool is_main_param(const std::string& name) {
  return is_encoder_decoder_param(name) || is_selfexpr_param(name);
}

Adam::Adam(const ParamStore& like, double step_size, double beta1, double beta2, double eps)
    : m_(like.zeros_like()), v_(like.zeros_like()), lr_(step_size), b1_(beta1), b2_(beta2),
      eps_(eps) {}

void Adam::update(ParamStore& params, const ParamStore& grads,
                  const std::function<bool(const std::string&)>& mask, double direction) {
  ++t_;
  const double bc1 = 1.0 - std::pow(b1_, t_);
  const double bc2 = 1.0 - std::pow(b2_, t_);
  for (int i = 0; i < params.count(); ++i) {
    if (!mask(params.name(i))) continue;
    const Matrix& g = grads.value(i);
    Matrix& m = m_.value(i);
    Matrix& v = v_.value(i);
    m = b1_ * m + (1.0 - b1_) * g;
    v = b2_ * v + (1.0 - b2_) * g.cwiseProduct(g);
    const Matrix mhat = m / bc1;
    const Matrix vhat = v / bc2;
    params.value(i) +=
        direction * lr_ * mhat.cwiseQuotient(vhat.cwiseSqrt().array().matrix() +
                                             Matrix::Constant(g.rows(), g.cols(), eps_));
  }
}

std::vector<Matrix> TrainedModel::selfexpr_matrices() const {
  std::vector<Matrix> out;
  for (int v = 0; v < shapes.num_views(); ++v) {
    Matrix c = params.at(selfexpr_name(v));
    c.diagonal().setZero();
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

std::vector<int> dataset_dims(const MultiViewDataset& ds) {
  std::vector<int> dims;
  for (const Matrix& v : ds.views) dims.push_back(static_cast<int>(v.cols()));
  return dims;
}

ParamStore init_all_params(const MultiViewDataset& ds, const Config& cfg,
                           const NetShapes& shapes) {
  ParamStore params;
  init_encoder_decoder_params(params, shapes, cfg.seed);
  init_critic_params(params, shapes, cfg.seed);
  init_selfexpr_params(params, ds.num_samples(), ds.num_views());
  return params;
}

void check_train_inputs(const MultiViewDataset& ds, const Config& cfg) {
  cfg.validate();
  ds.validate();
  require(ds.num_samples() <= cfg.full_batch_ceiling, errc::invalid_argument,
          "dataset has " + std::to_string(ds.num_samples()) +
              " samples, above the full-batch ceiling of " +
              std::to_string(cfg.full_batch_ceiling) +
              "; raise full_batch_ceiling if the quadratic cost is acceptable");
  require(ds.num_samples() >= 2, errc::invalid_argument, "training needs at least 2 samples");
}

void run_pretrain_phase(ParamStore& params, const MultiViewDataset& ds, const Config& cfg,
                        const NetShapes& shapes, std::vector<PretrainRecord>* log) {
  Adam opt(params, cfg.step_size, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  const std::uint64_t phase_seed = derive_seed(cfg.seed, "pretrain");
  for (int step = 0; step < cfg.pretrain_steps; ++step) {
    const StepRandomness rand = make_step_randomness(
        phase_seed, static_cast<std::uint64_t>(step), ds.num_samples(), ds.num_views(),
        shapes.code_dim);
    ad::Tape tape;
    TapeParams p(tape, params, is_encoder_decoder_param);
    const PretrainLossVars loss = build_pretrain_loss(tape, ds.views, p, shapes, cfg.lambda, rand);
    const double value = tape.backward(loss.total);
    require(std::isfinite(value), errc::numeric,
            "pretraining diverged (non-finite loss at step " + std::to_string(step) + ")");
    const ParamStore grads = p.grads(tape);
    opt.update(params, grads, is_encoder_decoder_param, -1.0);
    if (log && step % cfg.log_every == 0)
      log->push_back({step, loss.recon.scalar(), loss.kl.scalar(), value});
  }
}

}  // namespace

ParamStore pretrain(const MultiViewDataset& ds, const Config& cfg,
                    std::vector<PretrainRecord>* log) {
  check_train_inputs(ds, cfg);
  const NetShapes shapes = NetShapes::from_config(cfg, dataset_dims(ds));
  ParamStore params = init_all_params(ds, cfg, shapes);
  run_pretrain_phase(params, ds, cfg, shapes, log);
  return params;
}

TrainOutcome train(const MultiViewDataset& ds, const Config& cfg) {
  check_train_inputs(ds, cfg);
  const NetShapes shapes = NetShapes::from_config(cfg, dataset_dims(ds));
  const LossWeights weights = LossWeights::from_config(cfg);
  const AblationFlags flags = AblationFlags::parse(cfg.ablate);

  TrainOutcome out;
  out.model.shapes = shapes;
  out.model.config = cfg;
  out.model.params = init_all_params(ds, cfg, shapes);
  ParamStore& params = out.model.params;

  run_pretrain_phase(params, ds, cfg, shapes, &out.pretrain_log);

  Adam main_opt(params, cfg.step_size, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  Adam critic_opt(params, cfg.step_size, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  const std::uint64_t phase_seed = derive_seed(cfg.seed, "train");
  const int m = ds.num_views();

  for (int step = 0; step < cfg.train_steps; ++step) {
    const StepRandomness rand = make_step_randomness(
        phase_seed, static_cast<std::uint64_t>(step), ds.num_samples(), m, shapes.code_dim);

    // (1) critic step(s): ascend the discriminator/predictor objectives with
    // encoder outputs held constant.
    if (cfg.critic_steps > 0 && !(flags.drop_dis && flags.drop_cmi && flags.drop_ls)) {
      std::vector<LatentBundle> bundles;
      for (int v = 0; v < m; ++v)
        bundles.push_back(encode(ds.views[static_cast<size_t>(v)], params, v,
                                 rand.noise[static_cast<size_t>(v)], shapes));
      for (int c = 0; c < cfg.critic_steps; ++c) {
        ad::Tape tape;
        TapeParams p(tape, params, is_critic_param);
        const ad::Var obj = build_critic_objective(tape, bundles, p, shapes, flags, rand);
        const double value = tape.backward(obj);
        require(std::isfinite(value), errc::numeric,
                "critic objective diverged at step " + std::to_string(step));
        const ParamStore grads = p.grads(tape);
        critic_opt.update(params, grads, is_critic_param, +1.0);
      }
    }

    // (2) main step: descend the total objective with critics frozen.
    ad::Tape tape;
    TapeParams p(tape, params, is_main_param);
    const TotalLossVars vars =
        build_total_loss(tape, ds.views, p, shapes, weights, flags, rand);
    const double value = tape.backward(vars.total);
    require(std::isfinite(value), errc::numeric,
            "training diverged (non-finite loss at step " + std::to_string(step) + ")");
    const ParamStore grads = p.grads(tape);
    main_opt.update(params, grads, is_main_param, -1.0);

    // The self-expression diagonal is structurally zero; updates never move it
    // off zero, re-assert after every step.
    for (int v = 0; v < m; ++v) {
      Matrix& c = params.at(selfexpr_name(v));
      c.diagonal().setZero();
      require(c.diagonal().cwiseAbs().maxCoeff() == 0.0, errc::internal,
              "self-expression diagonal left zero constraint");
    }

    if (step % cfg.log_every == 0)
      out.train_log.push_back({step, vars.report(weights, m)});
  }
  return out;
}

ClusterResult cluster(const TrainedModel& model, const MultiViewDataset& ds, int k) {
  require(k >= 2, errc::invalid_argument, "clustering needs k >= 2");
  require(k <= ds.num_samples(), errc::invalid_argument,
          "clustering needs k <= sample count");
  ClusterResult res;
  res.per_view_coeffs = model.selfexpr_matrices();
  res.affinity = fuse_affinities(res.per_view_coeffs);
  res.labels = spectral_cluster(res.affinity, k, derive_seed(model.config.seed, "cluster"),
                                model.config.kmeans_restarts, model.config.kmeans_iters,
                                model.config.kmeans_tol);
  if (ds.labels)
    res.metrics = evaluate_clustering(ds.labels.value(), res.labels);
  return res;
}

PipelineResult run_pipeline(const MultiViewDataset& raw, const Config& cfg) {
  const MultiViewDataset ds = normalize_views(raw, parse_normalize_mode(cfg.normalize));
  PipelineResult out;
  out.outcome = train(ds, cfg);
  out.k = cfg.cluster_k > 0 ? cfg.cluster_k : ds.num_classes();
  require(out.k >= 2, errc::invalid_argument,
          "cluster count unknown: dataset has no labels and cluster.k is not set");
  out.clusters = cluster(out.outcome.model, ds, out.k);
  return out;
}

std::vector<LatentBundle> embed_dataset(const TrainedModel& model,
                                        const MultiViewDataset& ds) {
  std::vector<LatentBundle> bundles;
  for (int v = 0; v < ds.num_views(); ++v) {
    const Matrix zero_noise = Matrix::Zero(ds.num_samples(), model.shapes.code_dim);
    bundles.push_back(
        encode(ds.views[static_cast<size_t>(v)], model.params, v, zero_noise, model.shapes));
  }
  return bundles;
}

void save_model(const TrainedModel& model, const std::string& path) {
  save_checkpoint(model.params, path, model.config.to_string());
}

TrainedModel load_model(const std::string& path) {
  TrainedModel model;
  std::string echo;
  model.params = load_checkpoint(path, &echo);
  model.config = Config::from_string(echo);
  std::vector<int> dims;
  for (int v = 0;; ++v) {
    const std::string name = enc_prefix(v) + ".trunk.0.W";
    if (!model.params.has(name)) break;
    dims.push_back(static_cast<int>(model.params.at(name).rows()));
  }
  require(!dims.empty(), errc::format, "checkpoint holds no encoder tensors");
  model.shapes = NetShapes::from_config(model.config, dims);
  return model;
}

}  // namespace mvsc
