#include "core/mi.hpp"

#include "core/rng.hpp"

namespace mvsc {

std::vector<int> negative_permutation(int n, std::uint64_t seed) {
  require(n >= 2, errc::invalid_argument,
          "negative sampling needs at least 2 rows (got " + std::to_string(n) + ")");
  Rng rng(seed);
  auto is_identity = [](const std::vector<int>& p) {
    for (size_t i = 0; i < p.size(); ++i)
      if (p[i] != static_cast<int>(i)) return false;
    return true;
  };
  auto is_derangement = [](const std::vector<int>& p) {
    for (size_t i = 0; i < p.size(); ++i)
      if (p[i] == static_cast<int>(i)) return false;
    return true;
  };
  std::vector<int> last_non_identity;
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::vector<int> p = rng.permutation(n);
    if (is_derangement(p)) return p;
    if (!is_identity(p)) last_non_identity = std::move(p);
  }
  if (!last_non_identity.empty()) return last_non_identity;
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<int> p = rng.permutation(n);
    if (!is_identity(p)) return p;
  }
  // Cyclic shift as a final fallback; always a derangement.
  std::vector<int> p(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] = (i + 1) % n;
  return p;
}

Matrix negative_sampling(const Matrix& batch, std::uint64_t seed) {
  const std::vector<int> perm = negative_permutation(static_cast<int>(batch.rows()), seed);
  Matrix out(batch.rows(), batch.cols());
  for (int r = 0; r < batch.rows(); ++r) out.row(r) = batch.row(perm[static_cast<size_t>(r)]);
  return out;
}

ad::Var jsd_objective_graph(ad::Tape& t, ad::Var logits_pos, ad::Var logits_neg) {
  require(logits_pos.rows() == logits_neg.rows() && logits_pos.cols() == 1 &&
              logits_neg.cols() == 1,
          errc::invalid_argument, "jsd objective: logits must be aligned column vectors");
  // log(1 - sigmoid(x)) = log(sigmoid(-x))
  return ad::add(ad::mean_all(ad::log_sigmoid(logits_pos)),
                 ad::mean_all(ad::log_sigmoid(ad::neg(logits_neg))));
}

double jsd_mi_objective(const Matrix& anchor, const Matrix& positive, const Matrix& negative,
                        const ParamStore& params, const std::string& head_id) {
  require(anchor.rows() == positive.rows() && positive.rows() == negative.rows() &&
              positive.cols() == negative.cols(),
          errc::invalid_argument, "jsd objective: shape mismatch");
  ad::Tape t;
  TapeParams p(t, params, [](const std::string&) { return false; });
  ad::Var a = t.constant(anchor);
  ad::Var lp = disc_logits_graph(t, a, t.constant(positive), p, head_id);
  ad::Var ln = disc_logits_graph(t, a, t.constant(negative), p, head_id);
  return jsd_objective_graph(t, lp, ln).scalar();
}

ad::Var kl_std_normal_graph(ad::Tape& t, ad::Var mean, ad::Var log_var) {
  require(mean.rows() == log_var.rows() && mean.cols() == log_var.cols(),
          errc::invalid_argument, "kl: mean/log_var shape mismatch");
  // 1/2 * mean_over_batch sum_j (mean^2 + exp(log_var) - log_var - 1)
  ad::Var inner = ad::add_scalar(
      ad::sub(ad::add(ad::square(mean), ad::vexp(log_var)), log_var), -1.0);
  return ad::scale(ad::sum_all(inner), 0.5 / static_cast<double>(mean.rows()));
}

double kl_to_standard_normal(const GaussianCode& code) {
  require(all_finite(code.mean) && all_finite(code.log_var), errc::nonfinite,
          "kl: non-finite inputs");
  ad::Tape t;
  return kl_std_normal_graph(t, t.constant(code.mean), t.constant(code.log_var)).scalar();
}

}  // namespace mvsc
