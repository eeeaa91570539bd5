#include "core/nets.hpp"

#include "core/rng.hpp"

namespace mvsc {

NetShapes NetShapes::from_config(const Config& cfg, const std::vector<int>& view_dims) {
  NetShapes s;
  s.view_dims = view_dims;
  s.trunk_hidden = cfg.trunk_hidden;
  s.feature_dim = cfg.feature_dim;
  s.code_dim = cfg.code_dim;
  s.decoder_hidden = cfg.decoder_hidden;
  s.disc_hidden = cfg.disc_hidden;
  s.pred_hidden = cfg.pred_hidden;
  return s;
}

std::string enc_prefix(int view) { return "enc" + std::to_string(view); }
std::string dec_prefix(int view) { return "dec" + std::to_string(view); }
std::string disc_prefix(const std::string& head_id) { return "disc." + head_id; }
std::string pred_prefix(int view, bool s2c) {
  return "pred" + std::to_string(view) + (s2c ? ".s2c" : ".c2s");
}
std::string selfexpr_name(int view) { return "se" + std::to_string(view) + ".C"; }
std::string dis_head_id(int input_view, int anchor_view) {
  return "dis." + std::to_string(input_view) + "a" + std::to_string(anchor_view);
}
std::string cmi_head_id(int input_view, int anchor_view) {
  return "cmi." + std::to_string(input_view) + "a" + std::to_string(anchor_view);
}

namespace {

// Dense layer parameters, W stored input x output.
void add_dense(ParamStore& params, Rng& rng, const std::string& prefix, int in, int out) {
  Matrix& w = params.add(prefix + ".W", in, out);
  const double sd = std::sqrt(2.0 / (in + out));
  w = rng.normal_matrix(in, out) * sd;
  params.add(prefix + ".b", 1, out);  // zeros
}

// Chain of dense layers through an MLP prefix: <prefix>.0, <prefix>.1, ...
void add_mlp(ParamStore& params, Rng& rng, const std::string& prefix,
             const std::vector<int>& dims) {
  for (size_t l = 0; l + 1 < dims.size(); ++l)
    add_dense(params, rng, prefix + "." + std::to_string(l), dims[l], dims[l + 1]);
}

ad::Var dense_graph(ad::Tape&, ad::Var x, const TapeParams& p, const std::string& prefix) {
  return ad::add_rowvec(ad::matmul(x, p.at(prefix + ".W")), p.at(prefix + ".b"));
}

// ELU between layers, linear output.
ad::Var mlp_graph(ad::Tape& t, ad::Var x, const TapeParams& p, const std::string& prefix,
                  int layers) {
  ad::Var h = x;
  for (int l = 0; l < layers; ++l) {
    h = dense_graph(t, h, p, prefix + "." + std::to_string(l));
    if (l + 1 < layers) h = ad::elu(h);
  }
  return h;
}

std::function<bool(const std::string&)> no_grad() {
  return [](const std::string&) { return false; };
}

}  // namespace

void init_encoder_decoder_params(ParamStore& params, const NetShapes& s, std::uint64_t seed) {
  for (int v = 0; v < s.num_views(); ++v) {
    Rng rng(derive_seed(seed, "init.enc", static_cast<std::uint64_t>(v)));
    std::vector<int> trunk = {s.view_dims[static_cast<size_t>(v)]};
    trunk.insert(trunk.end(), s.trunk_hidden.begin(), s.trunk_hidden.end());
    trunk.push_back(s.feature_dim);
    add_mlp(params, rng, enc_prefix(v) + ".trunk", trunk);
    add_dense(params, rng, enc_prefix(v) + ".mean", s.feature_dim, s.code_dim);
    add_dense(params, rng, enc_prefix(v) + ".logvar", s.feature_dim, s.code_dim);
    add_dense(params, rng, enc_prefix(v) + ".zs", s.feature_dim, s.code_dim);

    std::vector<int> dec = {2 * s.code_dim};
    dec.insert(dec.end(), s.decoder_hidden.begin(), s.decoder_hidden.end());
    dec.push_back(s.view_dims[static_cast<size_t>(v)]);
    add_mlp(params, rng, dec_prefix(v), dec);
  }
}

void init_critic_params(ParamStore& params, const NetShapes& s, std::uint64_t seed) {
  const int d = s.code_dim;
  for (int i = 0; i < s.num_views(); ++i) {
    for (int j = 0; j < s.num_views(); ++j) {
      if (i == j) continue;
      Rng rng(derive_seed(seed, "init.disc", static_cast<std::uint64_t>(i),
                          static_cast<std::uint64_t>(j)));
      // Common-code alignment head: input (anchor code, other code).
      add_mlp(params, rng, disc_prefix(dis_head_id(i, j)), {2 * d, s.disc_hidden, 1});
      // Cross-view feature head: input (anchor code, pre-split feature).
      add_mlp(params, rng, disc_prefix(cmi_head_id(i, j)), {d + s.feature_dim, s.disc_hidden, 1});
    }
  }
  for (int v = 0; v < s.num_views(); ++v) {
    Rng rng(derive_seed(seed, "init.pred", static_cast<std::uint64_t>(v)));
    add_mlp(params, rng, pred_prefix(v, true), {d, s.pred_hidden, d});
    add_mlp(params, rng, pred_prefix(v, false), {d, s.pred_hidden, d});
  }
}

void init_selfexpr_params(ParamStore& params, int n, int num_views) {
  for (int v = 0; v < num_views; ++v) params.add(selfexpr_name(v), n, n);
}

EncodeVars encode_graph(ad::Tape& t, ad::Var x, const TapeParams& p, int view,
                        ad::Var noise, const NetShapes& s) {
  require(view >= 0 && view < s.num_views(), errc::invalid_argument,
          "encode: view index out of range");
  require(x.cols() == s.view_dims[static_cast<size_t>(view)], errc::invalid_argument,
          "encode: input width does not match view dimension");
  require(noise.rows() == x.rows() && noise.cols() == s.code_dim, errc::invalid_argument,
          "encode: noise must be batch x code_dim");
  const int trunk_layers = static_cast<int>(s.trunk_hidden.size()) + 1;
  EncodeVars out;
  out.h = mlp_graph(t, x, p, enc_prefix(view) + ".trunk", trunk_layers);
  out.mean = dense_graph(t, out.h, p, enc_prefix(view) + ".mean");
  out.log_var = ad::clamp(dense_graph(t, out.h, p, enc_prefix(view) + ".logvar"),
                          -kLogVarClamp, kLogVarClamp);
  // zc = mean + exp(log_var / 2) * noise
  out.zc = ad::add(out.mean, ad::cmul(ad::vexp(ad::scale(out.log_var, 0.5)), noise));
  out.zs = dense_graph(t, out.h, p, enc_prefix(view) + ".zs");
  return out;
}

ad::Var decode_graph(ad::Tape& t, ad::Var zs, ad::Var zc_tilde, const TapeParams& p,
                     int view, const NetShapes& s) {
  require(zs.rows() == zc_tilde.rows(), errc::invalid_argument, "decode: batch mismatch");
  require(zs.cols() == s.code_dim && zc_tilde.cols() == s.code_dim, errc::invalid_argument,
          "decode: both codes must be batch x code_dim");
  const int layers = static_cast<int>(s.decoder_hidden.size()) + 1;
  return mlp_graph(t, ad::concat_cols(zs, zc_tilde), p, dec_prefix(view), layers);
}

ad::Var disc_logits_graph(ad::Tape& t, ad::Var anchor, ad::Var other, const TapeParams& p,
                          const std::string& head_id) {
  require(anchor.rows() == other.rows(), errc::invalid_argument,
          "discriminator: row-aligned inputs required");
  require(p.has(disc_prefix(head_id) + ".0.W"), errc::invalid_argument,
          "unknown discriminator head: " + head_id);
  return mlp_graph(t, ad::concat_cols(anchor, other), p, disc_prefix(head_id), 2);
}

ad::Var predictor_graph(ad::Tape& t, ad::Var z, const TapeParams& p, int view, bool s2c) {
  require(p.has(pred_prefix(view, s2c) + ".0.W"), errc::invalid_argument,
          "unknown predictor direction for view " + std::to_string(view));
  return mlp_graph(t, z, p, pred_prefix(view, s2c), 2);
}

LatentBundle encode(const Matrix& x, const ParamStore& params, int view, const Matrix& noise,
                    const NetShapes& s) {
  ad::Tape t;
  TapeParams p(t, params, no_grad());
  EncodeVars ev = encode_graph(t, t.constant(x), p, view, t.constant(noise), s);
  LatentBundle b;
  b.h = ev.h.value();
  b.code.mean = ev.mean.value();
  b.code.log_var = ev.log_var.value();
  b.zc = ev.zc.value();
  b.zs = ev.zs.value();
  return b;
}

Matrix decode(const Matrix& zs, const Matrix& zc_tilde, const ParamStore& params, int view,
              const NetShapes& s) {
  ad::Tape t;
  TapeParams p(t, params, no_grad());
  return decode_graph(t, t.constant(zs), t.constant(zc_tilde), p, view, s).value();
}

Matrix discriminator_score(const Matrix& anchor, const Matrix& other,
                           const ParamStore& params, const std::string& head_id) {
  ad::Tape t;
  TapeParams p(t, params, no_grad());
  return disc_logits_graph(t, t.constant(anchor), t.constant(other), p, head_id).value();
}

Matrix predictor_forward(const Matrix& z, const ParamStore& params, int view, bool s2c) {
  ad::Tape t;
  TapeParams p(t, params, no_grad());
  return predictor_graph(t, t.constant(z), p, view, s2c).value();
}

}  // namespace mvsc
