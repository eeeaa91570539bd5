#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/params.hpp"
#include "core/tape.hpp"

namespace mvsc {

// Layer widths resolved against a concrete dataset.
struct NetShapes {
  std::vector<int> view_dims;
  std::vector<int> trunk_hidden;
  int feature_dim = 64;  // h
  int code_dim = 16;     // each code
  std::vector<int> decoder_hidden;
  int disc_hidden = 64;
  int pred_hidden = 64;

  int num_views() const { return static_cast<int>(view_dims.size()); }
  static NetShapes from_config(const Config& cfg, const std::vector<int>& view_dims);
};

// Diagonal-Gaussian posterior parameters for a batch of common codes.
struct GaussianCode {
  Matrix mean;     // batch x d
  Matrix log_var;  // batch x d, clamped to [-10, 10]
};

// Everything the encoder of one view produces for one batch.
struct LatentBundle {
  Matrix h;            // batch x feature_dim
  GaussianCode code;   // posterior of the common code
  Matrix zc;           // reparameterized sample, batch x d
  Matrix zs;           // deterministic specific code, batch x d
};

inline constexpr double kLogVarClamp = 10.0;

// Parameter tensor names -------------------------------------------------
std::string enc_prefix(int view);
std::string dec_prefix(int view);
std::string disc_prefix(const std::string& head_id);  // head_id: "dis.0a1", "cmi.1a0"
std::string pred_prefix(int view, bool specific_to_common);
std::string selfexpr_name(int view);
std::string dis_head_id(int input_view, int anchor_view);
std::string cmi_head_id(int input_view, int anchor_view);

// Registration + deterministic initialization ------------------------------
void init_encoder_decoder_params(ParamStore& params, const NetShapes& s, std::uint64_t seed);
void init_critic_params(ParamStore& params, const NetShapes& s, std::uint64_t seed);
void init_selfexpr_params(ParamStore& params, int n, int num_views);  // zeros

// Graph builders ------------------------------------------------------------
struct EncodeVars {
  ad::Var h, mean, log_var, zc, zs;
};
EncodeVars encode_graph(ad::Tape& tape, ad::Var x, const TapeParams& p, int view,
                        ad::Var noise, const NetShapes& s);
ad::Var decode_graph(ad::Tape& tape, ad::Var zs, ad::Var zc_tilde, const TapeParams& p,
                     int view, const NetShapes& s);
ad::Var disc_logits_graph(ad::Tape& tape, ad::Var anchor, ad::Var other,
                          const TapeParams& p, const std::string& head_id);
ad::Var predictor_graph(ad::Tape& tape, ad::Var z, const TapeParams& p, int view,
                        bool specific_to_common);

// Plain (value-only) wrappers; same code paths via a throwaway tape ---------
LatentBundle encode(const Matrix& x, const ParamStore& params, int view,
                    const Matrix& noise, const NetShapes& s);
Matrix decode(const Matrix& zs, const Matrix& zc_tilde, const ParamStore& params, int view,
              const NetShapes& s);
Matrix discriminator_score(const Matrix& anchor, const Matrix& other,
                           const ParamStore& params, const std::string& head_id);
Matrix predictor_forward(const Matrix& z, const ParamStore& params, int view,
                         bool specific_to_common);

}  // namespace mvsc
