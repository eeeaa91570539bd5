#include "core/losses.hpp"

#include <sstream>

#include "core/rng.hpp"

namespace mvsc {

LossWeights LossWeights::from_config(const Config& cfg) {
  LossWeights w;
  w.lambda = cfg.lambda;
  w.alpha = cfg.alpha;
  w.beta = cfg.beta;
  w.gamma = cfg.gamma;
  w.lambda_se = cfg.lambda_se;
  w.validate();
  return w;
}

void LossWeights::validate() const {
  require(lambda >= 0 && alpha >= 0 && beta >= 0 && gamma >= 0 && lambda_se >= 0,
          errc::invalid_argument, "loss weights must be >= 0");
}

AblationFlags AblationFlags::parse(const std::string& csv) {
  AblationFlags f;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    // trim spaces
    const size_t a = item.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const size_t b = item.find_last_not_of(" \t");
    item = item.substr(a, b - a + 1);
    if (item == "drop_Ls") {
      f.drop_ls = true;
    } else if (item == "drop_mkl") {
      f.drop_mkl = true;
    } else if (item == "drop_cmi") {
      f.drop_cmi = true;
    } else if (item == "drop_dis") {
      f.drop_dis = true;
    } else {
      fail(errc::invalid_argument, "unknown ablation flag: " + item);
    }
  }
  return f;
}

std::string AblationFlags::to_string() const {
  std::string s;
  auto append = [&s](const char* name) {
    if (!s.empty()) s += ',';
    s += name;
  };
  if (drop_ls) append("drop_Ls");
  if (drop_mkl) append("drop_mkl");
  if (drop_cmi) append("drop_cmi");
  if (drop_dis) append("drop_dis");
  return s;
}

double LossReport::recombined(const LossWeights& w) const {
  return ((((l_c_dis + l_c_cmi) + l_c_mkl) + w.alpha * l_s) + w.beta * l_r) + w.gamma * l_se;
}

std::vector<std::string> LossReport::column_names(int m) {
  std::vector<std::string> names = {"l_c_dis", "l_c_cmi", "l_c_mkl",
                                    "l_s",     "l_r",     "l_se",
                                    "total"};
  for (int v = 0; v < m; ++v) names.push_back("kl_v" + std::to_string(v));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) names.push_back("dis_" + std::to_string(i) + "a" + std::to_string(j));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) names.push_back("cmi_" + std::to_string(i) + "a" + std::to_string(j));
  for (int v = 0; v < m; ++v) names.push_back("ls_v" + std::to_string(v));
  for (int v = 0; v < m; ++v) names.push_back("lr_v" + std::to_string(v));
  for (int v = 0; v < m; ++v) names.push_back("lse_v" + std::to_string(v));
  return names;
}

std::vector<double> LossReport::column_values(int m) const {
  std::vector<double> vals = {l_c_dis, l_c_cmi, l_c_mkl, l_s, l_r, l_se, total};
  const std::vector<std::string> names = column_names(m);
  require(detail.size() + 7 == names.size(), errc::internal,
          "loss report detail does not match the expected layout");
  for (size_t i = 0; i < detail.size(); ++i) {
    require(detail[i].first == names[i + 7], errc::internal,
            "loss report detail order mismatch: " + detail[i].first);
    vals.push_back(detail[i].second);
  }
  return vals;
}

StepRandomness make_step_randomness(std::uint64_t seed, std::uint64_t step, int n,
                                    int num_views, int code_dim) {
  StepRandomness r;
  for (int v = 0; v < num_views; ++v) {
    Rng rng(derive_seed(seed, "noise", step, static_cast<std::uint64_t>(v)));
    r.noise.push_back(rng.normal_matrix(n, code_dim));
  }
  if (n >= 2) r.neg_perm = negative_permutation(n, derive_seed(seed, "negperm", step));
  return r;
}

namespace {

// mean over rows of -1/2 ||target_row - pred_row||^2
ad::Var neg_half_mean_sq(ad::Var target, ad::Var pred) {
  return ad::scale(ad::sum_sq(ad::sub(target, pred)), -0.5 / target.rows());
}

ad::Var jsd_pair_graph(ad::Tape& t, const TapeParams& p, ad::Var anchor, ad::Var other,
                       const std::vector<int>& perm, const std::string& head) {
  ad::Var neg = ad::permute_rows(other, perm);
  ad::Var lp = disc_logits_graph(t, anchor, other, p, head);
  ad::Var ln = disc_logits_graph(t, anchor, neg, p, head);
  return jsd_objective_graph(t, lp, ln);
}

}  // namespace

TotalLossVars build_total_loss(ad::Tape& t, const std::vector<Matrix>& views,
                               const TapeParams& p, const NetShapes& s,
                               const LossWeights& w, const AblationFlags& flags,
                               const StepRandomness& rand,
                               const SpecificLossTargets* frozen_targets) {
  const int m = static_cast<int>(views.size());
  require(m >= 2, errc::invalid_argument, "the joint objective needs at least 2 views");
  require(static_cast<int>(rand.noise.size()) == m, errc::invalid_argument,
          "step randomness does not match view count");
  const int n = static_cast<int>(views.front().rows());
  require(static_cast<int>(rand.neg_perm.size()) == n, errc::invalid_argument,
          "negative permutation does not match batch size");

  TotalLossVars out;
  for (int v = 0; v < m; ++v) {
    out.enc.push_back(encode_graph(t, t.constant(views[static_cast<size_t>(v)]), p, v,
                                   t.constant(rand.noise[static_cast<size_t>(v)]), s));
  }

  std::vector<std::pair<std::string, double>> kl_detail, dis_detail, cmi_detail, ls_detail,
      lr_detail, lse_detail;

  // Compression term: lambda * KL to the standard-normal prior, per view.
  if (!flags.drop_mkl) {
    ad::Var acc;
    for (int v = 0; v < m; ++v) {
      ad::Var kl = ad::scale(
          kl_std_normal_graph(t, out.enc[static_cast<size_t>(v)].mean,
                              out.enc[static_cast<size_t>(v)].log_var),
          w.lambda);
      kl_detail.push_back({"kl_v" + std::to_string(v), kl.scalar()});
      acc = acc.valid() ? ad::add(acc, kl) : kl;
    }
    out.mkl = acc;
  } else {
    for (int v = 0; v < m; ++v) kl_detail.push_back({"kl_v" + std::to_string(v), 0.0});
  }

  // Cross-view code alignment: one objective per anchor direction, negated.
  if (!flags.drop_dis) {
    ad::Var acc;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        ad::Var jsd = jsd_pair_graph(t, p, out.enc[static_cast<size_t>(j)].zc,
                                     out.enc[static_cast<size_t>(i)].zc, rand.neg_perm,
                                     dis_head_id(i, j));
        ad::Var contrib = ad::neg(jsd);
        dis_detail.push_back(
            {"dis_" + std::to_string(i) + "a" + std::to_string(j), contrib.scalar()});
        acc = acc.valid() ? ad::add(acc, contrib) : contrib;
      }
    }
    out.dis = acc;
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j)
          dis_detail.push_back({"dis_" + std::to_string(i) + "a" + std::to_string(j), 0.0});
  }

  // Cross-view feature grounding: anchor code of view j against the pre-split
  // feature of view i, weighted by the input view's lambda.
  if (!flags.drop_cmi) {
    ad::Var acc;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        ad::Var jsd = jsd_pair_graph(t, p, out.enc[static_cast<size_t>(j)].zc,
                                     out.enc[static_cast<size_t>(i)].h, rand.neg_perm,
                                     cmi_head_id(i, j));
        ad::Var contrib = ad::scale(jsd, -w.lambda);
        cmi_detail.push_back(
            {"cmi_" + std::to_string(i) + "a" + std::to_string(j), contrib.scalar()});
        acc = acc.valid() ? ad::add(acc, contrib) : contrib;
      }
    }
    out.cmi = acc;
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j)
          cmi_detail.push_back({"cmi_" + std::to_string(i) + "a" + std::to_string(j), 0.0});
  }

  // Unpredictability between the two codes of each view. Targets are
  // detached; gradient reaches the encoder only through the predictor inputs.
  if (!flags.drop_ls) {
    ad::Var acc;
    for (int v = 0; v < m; ++v) {
      const EncodeVars& ev = out.enc[static_cast<size_t>(v)];
      ad::Var target_c = frozen_targets
                             ? t.constant(frozen_targets->zc[static_cast<size_t>(v)])
                             : ad::stop_gradient(ev.zc);
      ad::Var target_s = frozen_targets
                             ? t.constant(frozen_targets->zs[static_cast<size_t>(v)])
                             : ad::stop_gradient(ev.zs);
      ad::Var pc = predictor_graph(t, ev.zs, p, v, true);
      ad::Var ps = predictor_graph(t, ev.zc, p, v, false);
      ad::Var term =
          ad::add(neg_half_mean_sq(target_c, pc), neg_half_mean_sq(target_s, ps));
      ls_detail.push_back({"ls_v" + std::to_string(v), term.scalar()});
      acc = acc.valid() ? ad::add(acc, term) : term;
    }
    out.ls = acc;
  } else {
    for (int v = 0; v < m; ++v) ls_detail.push_back({"ls_v" + std::to_string(v), 0.0});
  }

  // Reconstruction through the self-expressed common code, plus the
  // self-expression objective itself.
  {
    ad::Var lr_acc, lse_acc;
    for (int v = 0; v < m; ++v) {
      const EncodeVars& ev = out.enc[static_cast<size_t>(v)];
      ad::Var c = ad::zero_diag(p.at(selfexpr_name(v)));
      ad::Var lse_v = selfexpr_loss_graph(t, ev.zc, c, w.lambda_se);
      lse_detail.push_back({"lse_v" + std::to_string(v), lse_v.scalar()});
      lse_acc = lse_acc.valid() ? ad::add(lse_acc, lse_v) : lse_v;

      ad::Var zct = ad::matmul(ad::transpose(c), ev.zc);
      ad::Var recon = decode_graph(t, ev.zs, zct, p, v, s);
      ad::Var lr_v =
          ad::scale(ad::sum_sq(ad::sub(t.constant(views[static_cast<size_t>(v)]), recon)),
                    1.0 / n);
      lr_detail.push_back({"lr_v" + std::to_string(v), lr_v.scalar()});
      lr_acc = lr_acc.valid() ? ad::add(lr_acc, lr_v) : lr_v;
    }
    out.lr = lr_acc;
    out.lse = lse_acc;
  }

  ad::Var total = t.constant(Matrix::Zero(1, 1));
  if (out.dis.valid()) total = ad::add(total, out.dis);
  if (out.cmi.valid()) total = ad::add(total, out.cmi);
  if (out.mkl.valid()) total = ad::add(total, out.mkl);
  if (out.ls.valid()) total = ad::add(total, ad::scale(out.ls, w.alpha));
  total = ad::add(total, ad::scale(out.lr, w.beta));
  total = ad::add(total, ad::scale(out.lse, w.gamma));
  out.total = total;

  // Assemble the detail block in the canonical column order.
  TotalLossVars& o = out;
  o.detail_storage.clear();
  for (auto& kv : kl_detail) o.detail_storage.push_back(std::move(kv));
  for (auto& kv : dis_detail) o.detail_storage.push_back(std::move(kv));
  for (auto& kv : cmi_detail) o.detail_storage.push_back(std::move(kv));
  for (auto& kv : ls_detail) o.detail_storage.push_back(std::move(kv));
  for (auto& kv : lr_detail) o.detail_storage.push_back(std::move(kv));
  for (auto& kv : lse_detail) o.detail_storage.push_back(std::move(kv));
  return out;
}

LossReport TotalLossVars::report(const LossWeights& w, int num_views) const {
  LossReport rep;
  rep.l_c_dis = dis.valid() ? dis.scalar() : 0.0;
  rep.l_c_cmi = cmi.valid() ? cmi.scalar() : 0.0;
  rep.l_c_mkl = mkl.valid() ? mkl.scalar() : 0.0;
  rep.l_s = ls.valid() ? ls.scalar() : 0.0;
  rep.l_r = lr.valid() ? lr.scalar() : 0.0;
  rep.l_se = lse.valid() ? lse.scalar() : 0.0;
  rep.total = total.valid() ? total.scalar() : 0.0;
  rep.detail = detail_storage;
  (void)num_views;
  (void)w;
  return rep;
}

ad::Var build_critic_objective(ad::Tape& t, const std::vector<LatentBundle>& bundles,
                               const TapeParams& p, const NetShapes& s,
                               const AblationFlags& flags, const StepRandomness& rand) {
  const int m = static_cast<int>(bundles.size());
  require(m >= 2, errc::invalid_argument, "critic objective needs at least 2 views");
  (void)s;
  ad::Var obj = t.constant(Matrix::Zero(1, 1));
  std::vector<ad::Var> zc(static_cast<size_t>(m)), zs(static_cast<size_t>(m)),
      h(static_cast<size_t>(m));
  for (int v = 0; v < m; ++v) {
    zc[static_cast<size_t>(v)] = t.constant(bundles[static_cast<size_t>(v)].zc);
    zs[static_cast<size_t>(v)] = t.constant(bundles[static_cast<size_t>(v)].zs);
    h[static_cast<size_t>(v)] = t.constant(bundles[static_cast<size_t>(v)].h);
  }
  if (!flags.drop_dis) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j)
          obj = ad::add(obj, jsd_pair_graph(t, p, zc[static_cast<size_t>(j)],
                                            zc[static_cast<size_t>(i)], rand.neg_perm,
                                            dis_head_id(i, j)));
  }
  if (!flags.drop_cmi) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j)
          obj = ad::add(obj, jsd_pair_graph(t, p, zc[static_cast<size_t>(j)],
                                            h[static_cast<size_t>(i)], rand.neg_perm,
                                            cmi_head_id(i, j)));
  }
  if (!flags.drop_ls) {
    for (int v = 0; v < m; ++v) {
      ad::Var pc = predictor_graph(t, zs[static_cast<size_t>(v)], p, v, true);
      ad::Var ps = predictor_graph(t, zc[static_cast<size_t>(v)], p, v, false);
      obj = ad::add(obj, ad::add(neg_half_mean_sq(zc[static_cast<size_t>(v)], pc),
                                 neg_half_mean_sq(zs[static_cast<size_t>(v)], ps)));
    }
  }
  return obj;
}

PretrainLossVars build_pretrain_loss(ad::Tape& t, const std::vector<Matrix>& views,
                                     const TapeParams& p, const NetShapes& s, double lambda,
                                     const StepRandomness& rand) {
  const int m = static_cast<int>(views.size());
  const int n = static_cast<int>(views.front().rows());
  PretrainLossVars out;
  out.recon = t.constant(Matrix::Zero(1, 1));
  out.kl = t.constant(Matrix::Zero(1, 1));
  for (int v = 0; v < m; ++v) {
    EncodeVars ev = encode_graph(t, t.constant(views[static_cast<size_t>(v)]), p, v,
                                 t.constant(rand.noise[static_cast<size_t>(v)]), s);
    ad::Var recon = decode_graph(t, ev.zs, ev.zc, p, v, s);
    ad::Var fit = ad::scale(
        ad::sum_sq(ad::sub(t.constant(views[static_cast<size_t>(v)]), recon)), 1.0 / n);
    out.recon = ad::add(out.recon, fit);
    out.kl = ad::add(out.kl, kl_std_normal_graph(t, ev.mean, ev.log_var));
  }
  out.total = ad::add(out.recon, ad::scale(out.kl, lambda));
  return out;
}

ViewCommonParts view_common_loss(const std::vector<LatentBundle>& bundles,
                                 const ParamStore& params, const NetShapes& s,
                                 const LossWeights& w, std::uint64_t seed) {
  const int m = static_cast<int>(bundles.size());
  require(m >= 2, errc::invalid_argument,
          "view-common loss is undefined for a single view");
  (void)s;
  const int n = static_cast<int>(bundles.front().zc.rows());
  const std::vector<int> perm = negative_permutation(n, derive_seed(seed, "negperm", 0));
  ViewCommonParts parts;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const Matrix& anchor = bundles[static_cast<size_t>(j)].zc;
      const Matrix& zc_i = bundles[static_cast<size_t>(i)].zc;
      const Matrix& h_i = bundles[static_cast<size_t>(i)].h;
      Matrix zc_neg(zc_i.rows(), zc_i.cols()), h_neg(h_i.rows(), h_i.cols());
      for (int r = 0; r < n; ++r) {
        zc_neg.row(r) = zc_i.row(perm[static_cast<size_t>(r)]);
        h_neg.row(r) = h_i.row(perm[static_cast<size_t>(r)]);
      }
      parts.l_c_dis -= jsd_mi_objective(anchor, zc_i, zc_neg, params, dis_head_id(i, j));
      parts.l_c_cmi -= w.lambda * jsd_mi_objective(anchor, h_i, h_neg, params, cmi_head_id(i, j));
    }
  }
  for (int v = 0; v < m; ++v)
    parts.l_c_mkl += w.lambda * kl_to_standard_normal(bundles[static_cast<size_t>(v)].code);
  return parts;
}

double view_specific_loss(const std::vector<LatentBundle>& bundles, const ParamStore& params,
                          const NetShapes& s) {
  (void)s;
  double l = 0.0;
  for (int v = 0; v < static_cast<int>(bundles.size()); ++v) {
    const LatentBundle& b = bundles[static_cast<size_t>(v)];
    const double n = static_cast<double>(b.zc.rows());
    const Matrix pc = predictor_forward(b.zs, params, v, true);
    const Matrix ps = predictor_forward(b.zc, params, v, false);
    l += -0.5 * (b.zc - pc).squaredNorm() / n;
    l += -0.5 * (b.zs - ps).squaredNorm() / n;
  }
  return l;
}

double reconstruction_loss(const std::vector<Matrix>& views,
                           const std::vector<LatentBundle>& bundles,
                           const std::vector<Matrix>& coeff_list, const ParamStore& params,
                           const NetShapes& s) {
  require(views.size() == bundles.size() && views.size() == coeff_list.size(),
          errc::invalid_argument, "reconstruction loss: per-view inputs must align");
  double l = 0.0;
  for (int v = 0; v < static_cast<int>(views.size()); ++v) {
    const LatentBundle& b = bundles[static_cast<size_t>(v)];
    const Matrix zct = self_express(b.zc, coeff_list[static_cast<size_t>(v)]);
    const Matrix recon = decode(b.zs, zct, params, v, s);
    require(recon.rows() == views[static_cast<size_t>(v)].rows() &&
                recon.cols() == views[static_cast<size_t>(v)].cols(),
            errc::invalid_argument, "reconstruction loss: shape mismatch");
    l += (views[static_cast<size_t>(v)] - recon).squaredNorm() /
         static_cast<double>(views[static_cast<size_t>(v)].rows());
  }
  return l;
}

LossReport total_loss(const std::vector<Matrix>& views, const ParamStore& params,
                      const NetShapes& s, const LossWeights& w, const AblationFlags& flags,
                      std::uint64_t seed) {
  const int m = static_cast<int>(views.size());
  const int n = static_cast<int>(views.front().rows());
  const StepRandomness rand = make_step_randomness(seed, 0, n, m, s.code_dim);
  ad::Tape t;
  TapeParams p(t, params, [](const std::string&) { return false; });
  const TotalLossVars vars = build_total_loss(t, views, p, s, w, flags, rand);
  return vars.report(w, m);
}

}  // namespace mvsc
