#include <doctest.h>

#include "core/nets.hpp"
#include "core/rng.hpp"

using namespace mvsc;

namespace {

NetShapes tiny_shapes() {
  NetShapes s;
  s.view_dims = {7, 5};
  s.trunk_hidden = {10};
  s.feature_dim = 8;
  s.code_dim = 4;
  s.decoder_hidden = {10};
  s.disc_hidden = 6;
  s.pred_hidden = 6;
  return s;
}

ParamStore make_params(const NetShapes& s, std::uint64_t seed = 1) {
  ParamStore p;
  init_encoder_decoder_params(p, s, seed);
  init_critic_params(p, s, seed);
  return p;
}

}  // namespace

TEST_CASE("zero noise collapses the sampled code onto the posterior mean") {
  const NetShapes s = tiny_shapes();
  const ParamStore p = make_params(s);
  Rng rng(3);
  const Matrix x = rng.normal_matrix(6, 7);
  const LatentBundle b = encode(x, p, 0, Matrix::Zero(6, 4), s);
  CHECK((b.zc - b.code.mean).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identical input rows produce identical encoder rows") {
  const NetShapes s = tiny_shapes();
  const ParamStore p = make_params(s);
  Rng rng(4);
  Matrix x = rng.normal_matrix(4, 7);
  x.row(2) = x.row(0);
  const LatentBundle b = encode(x, p, 0, Matrix::Zero(4, 4), s);
  CHECK((b.h.row(2) - b.h.row(0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((b.code.mean.row(2) - b.code.mean.row(0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((b.code.log_var.row(2) - b.code.log_var.row(0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((b.zs.row(2) - b.zs.row(0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("shape contracts") {
  const NetShapes s = tiny_shapes();
  const ParamStore p = make_params(s);
  Rng rng(5);
  const int batch = 9;
  const Matrix x = rng.normal_matrix(batch, 7);
  const LatentBundle b = encode(x, p, 0, rng.normal_matrix(batch, 4), s);
  CHECK(b.h.rows() == batch);
  CHECK(b.h.cols() == 8);
  CHECK(b.zc.rows() == batch);
  CHECK(b.zc.cols() == 4);
  CHECK(b.zs.cols() == 4);
  const Matrix recon = decode(b.zs, b.zc, p, 0, s);
  CHECK(recon.rows() == batch);
  CHECK(recon.cols() == 7);
  // Wrong input width is rejected.
  CHECK_THROWS_AS(encode(rng.normal_matrix(3, 6), p, 0, Matrix::Zero(3, 4), s), Error);
  CHECK_THROWS_AS(decode(b.zs, rng.normal_matrix(batch, 3), p, 0, s), Error);
}

TEST_CASE("log-variance head output is clamped") {
  const NetShapes s = tiny_shapes();
  ParamStore p = make_params(s);
  // Force huge pre-clamp values through the bias.
  p.at(enc_prefix(0) + ".logvar.b").setConstant(1e4);
  Rng rng(6);
  const LatentBundle b = encode(rng.normal_matrix(3, 7), p, 0, Matrix::Zero(3, 4), s);
  CHECK(b.code.log_var.maxCoeff() == kLogVarClamp);
  CHECK(b.code.log_var.minCoeff() >= -kLogVarClamp);
}

TEST_CASE("single-layer decoder with zero weights broadcasts its bias") {
  NetShapes s = tiny_shapes();
  s.decoder_hidden = {};  // one dense layer: 2d -> view_dim
  ParamStore p;
  init_encoder_decoder_params(p, s, 1);
  p.at(dec_prefix(0) + ".0.W").setZero();
  Matrix bias(1, 7);
  bias << 1, 2, 3, 4, 5, 6, 7;
  p.at(dec_prefix(0) + ".0.b") = bias;
  Rng rng(7);
  const Matrix out = decode(rng.normal_matrix(5, 4), rng.normal_matrix(5, 4), p, 0, s);
  for (int r = 0; r < 5; ++r) CHECK((out.row(r) - bias.row(0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reparameterized code matches moments under many noise draws") {
  const NetShapes s = tiny_shapes();
  const ParamStore p = make_params(s);
  Rng rng(8);
  const Matrix one_row = rng.normal_matrix(1, 7);
  const int draws = 20000;
  Matrix x(draws, 7);
  for (int i = 0; i < draws; ++i) x.row(i) = one_row.row(0);
  Rng noise_rng(9);
  const LatentBundle b = encode(x, p, 0, noise_rng.normal_matrix(draws, 4), s);
  const Matrix mean_hat = b.zc.colwise().mean();
  const Matrix centered = b.zc.rowwise() - mean_hat.row(0);
  for (int j = 0; j < 4; ++j) {
    const double mu = b.code.mean(0, j);
    const double var = std::exp(b.code.log_var(0, j));
    const double sd = std::sqrt(var);
    CHECK(std::abs(mean_hat(0, j) - mu) < 5.0 * sd / std::sqrt(double(draws)));
    const double var_hat = centered.col(j).squaredNorm() / draws;
    CHECK(var_hat == doctest::Approx(var).epsilon(0.05));
  }
}

TEST_CASE("discriminator with zero weights scores probability one half") {
  const NetShapes s = tiny_shapes();
  ParamStore p = make_params(s);
  const std::string head = dis_head_id(0, 1);
  p.at(disc_prefix(head) + ".0.W").setZero();
  p.at(disc_prefix(head) + ".1.W").setZero();
  Rng rng(10);
  const Matrix logits =
      discriminator_score(rng.normal_matrix(6, 4), rng.normal_matrix(6, 4), p, head);
  CHECK(logits.cwiseAbs().maxCoeff() == 0.0);  // sigmoid(0) = 0.5
}

TEST_CASE("row permutation equivariance of the forward maps") {
  const NetShapes s = tiny_shapes();
  const ParamStore p = make_params(s);
  Rng rng(11);
  const int batch = 8;
  const Matrix a = rng.normal_matrix(batch, 4);
  const Matrix b = rng.normal_matrix(batch, 4);
  const std::vector<int> perm = Rng(12).permutation(batch);
  auto permuted = [&perm](const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    for (int r = 0; r < m.rows(); ++r) out.row(r) = m.row(perm[static_cast<size_t>(r)]);
    return out;
  };
  const Matrix direct = discriminator_score(permuted(a), permuted(b), p, dis_head_id(0, 1));
  const Matrix after = permuted(discriminator_score(a, b, p, dis_head_id(0, 1)));
  CHECK((direct - after).cwiseAbs().maxCoeff() < 1e-14);

  const Matrix pred = predictor_forward(a, p, 0, true);
  const Matrix pred_perm = predictor_forward(permuted(a), p, 0, true);
  CHECK((permuted(pred) - pred_perm).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("distinct discriminator heads hold independent parameters") {
  const NetShapes s = tiny_shapes();
  ParamStore p = make_params(s);
  Rng rng(13);
  const Matrix a = rng.normal_matrix(5, 4), b = rng.normal_matrix(5, 4);
  const Matrix before = discriminator_score(a, b, p, dis_head_id(0, 1));
  p.at(disc_prefix(dis_head_id(1, 0)) + ".0.W").setConstant(0.7);
  const Matrix after = discriminator_score(a, b, p, dis_head_id(0, 1));
  CHECK(before == after);
}

TEST_CASE("unknown heads and directions are rejected") {
  const NetShapes s = tiny_shapes();
  const ParamStore p = make_params(s);
  Rng rng(14);
  const Matrix a = rng.normal_matrix(3, 4);
  CHECK_THROWS_AS(discriminator_score(a, a, p, "dis.5a9"), Error);
  CHECK_THROWS_AS(predictor_forward(a, p, 9, true), Error);
}

TEST_CASE("predictor with zero weights returns its bias row") {
  const NetShapes s = tiny_shapes();
  ParamStore p = make_params(s);
  const std::string prefix = pred_prefix(0, true);
  p.at(prefix + ".0.W").setZero();
  p.at(prefix + ".1.W").setZero();
  Matrix bias(1, 4);
  bias << 0.1, -0.2, 0.3, -0.4;
  p.at(prefix + ".1.b") = bias;
  Rng rng(15);
  const Matrix out = predictor_forward(rng.normal_matrix(6, 4), p, 0, true);
  for (int r = 0; r < 6; ++r) CHECK((out.row(r) - bias.row(0)).cwiseAbs().maxCoeff() == 0.0);
}
