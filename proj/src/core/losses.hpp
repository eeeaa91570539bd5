#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/mi.hpp"
#include "core/nets.hpp"
#include "core/selfexpr.hpp"

namespace mvsc {

struct LossWeights {
  double lambda = 0.01;     // bottleneck multiplier, shared across views
  double alpha = 0.1;
  double beta = 1.0;
  double gamma = 1.0;
  double lambda_se = 1.0;

  static LossWeights from_config(const Config& cfg);
  void validate() const;
};

struct AblationFlags {
  bool drop_ls = false;
  bool drop_mkl = false;
  bool drop_cmi = false;
  bool drop_dis = false;

  static AblationFlags parse(const std::string& csv);  // unknown flags rejected
  std::string to_string() const;
  bool any() const { return drop_ls || drop_mkl || drop_cmi || drop_dis; }
};

// Scalar value of every named loss term plus the weighted total. The stored
// reconstruction term is the squared error itself (>= 0); it enters the
// minimized total with weight +beta.
struct LossReport {
  double l_c_dis = 0.0;
  double l_c_cmi = 0.0;
  double l_c_mkl = 0.0;
  double l_s = 0.0;
  double l_r = 0.0;
  double l_se = 0.0;
  double total = 0.0;
  std::vector<std::pair<std::string, double>> detail;  // per-view / per-pair contributions

  // Weighted recombination of the components; matches `total` bit-for-bit.
  double recombined(const LossWeights& w) const;
  static std::vector<std::string> column_names(int num_views);
  std::vector<double> column_values(int num_views) const;
};

// Fresh randomness for one optimization step: one noise draw per view and one
// negative permutation shared by every pair term, all derived from the master
// seed and the step counter.
struct StepRandomness {
  std::vector<Matrix> noise;  // per view: n x code_dim
  std::vector<int> neg_perm;  // length n
};
StepRandomness make_step_randomness(std::uint64_t seed, std::uint64_t step, int n,
                                    int num_views, int code_dim);

// Substitute targets for the unpredictability terms. Live runs detach the
// targets in-graph; gradient checking supplies them as fixed matrices so the
// checked function matches the implemented gradient.
struct SpecificLossTargets {
  std::vector<Matrix> zc, zs;  // per view
};

struct TotalLossVars {
  ad::Var total;
  ad::Var dis, cmi, mkl, ls, lr, lse;  // invalid when the term is dropped
  std::vector<EncodeVars> enc;
  std::vector<std::pair<std::string, double>> detail_storage;
  LossReport report(const LossWeights& w, int num_views) const;
};

TotalLossVars build_total_loss(ad::Tape& t, const std::vector<Matrix>& views,
                               const TapeParams& p, const NetShapes& s,
                               const LossWeights& w, const AblationFlags& flags,
                               const StepRandomness& rand,
                               const SpecificLossTargets* frozen_targets = nullptr);

// Critic side of the min-max: discriminators and predictors maximize this,
// with the encoder outputs held constant.
ad::Var build_critic_objective(ad::Tape& t, const std::vector<LatentBundle>& bundles,
                               const TapeParams& p, const NetShapes& s,
                               const AblationFlags& flags, const StepRandomness& rand);

// Warm-up objective: reconstruction straight from (zs, zc) plus the KL term.
struct PretrainLossVars {
  ad::Var total, recon, kl;
};
PretrainLossVars build_pretrain_loss(ad::Tape& t, const std::vector<Matrix>& views,
                                     const TapeParams& p, const NetShapes& s, double lambda,
                                     const StepRandomness& rand);

// Operation-level evaluation on precomputed bundles (reporting paths and
// tests; the trainer drives the graph builders directly).
struct ViewCommonParts {
  double l_c_dis = 0.0;
  double l_c_cmi = 0.0;
  double l_c_mkl = 0.0;
};
ViewCommonParts view_common_loss(const std::vector<LatentBundle>& bundles,
                                 const ParamStore& params, const NetShapes& s,
                                 const LossWeights& w, std::uint64_t seed);
double view_specific_loss(const std::vector<LatentBundle>& bundles, const ParamStore& params,
                          const NetShapes& s);
double reconstruction_loss(const std::vector<Matrix>& views,
                           const std::vector<LatentBundle>& bundles,
                           const std::vector<Matrix>& coeff_list, const ParamStore& params,
                           const NetShapes& s);
LossReport total_loss(const std::vector<Matrix>& views, const ParamStore& params,
                      const NetShapes& s, const LossWeights& w, const AblationFlags& flags,
                      std::uint64_t seed);

}  // namespace mvsc
