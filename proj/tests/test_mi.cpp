#include <doctest.h>

#include <cmath>

#include "core/discrete.hpp"
#include "core/mi.hpp"
#include "core/rng.hpp"
#include "core/verify.hpp"

using namespace mvsc;

TEST_CASE("negative sampling") {
  SUBCASE("two rows are swapped") {
    Matrix batch(2, 3);
    batch << 1, 2, 3, 4, 5, 6;
    const Matrix neg = negative_sampling(batch, 77);
    CHECK(neg.row(0) == batch.row(1));
    CHECK(neg.row(1) == batch.row(0));
  }
  SUBCASE("deterministic given the seed") {
    Rng rng(1);
    const Matrix batch = rng.normal_matrix(30, 4);
    CHECK(negative_sampling(batch, 123) == negative_sampling(batch, 123));
  }
  SUBCASE("large batches get a derangement") {
    const std::vector<int> perm = negative_permutation(100, 9);
    int fixed = 0;
    for (int i = 0; i < 100; ++i)
      if (perm[static_cast<size_t>(i)] == i) ++fixed;
    CHECK(fixed == 0);
  }
  SUBCASE("a single row has no valid negative") {
    CHECK_THROWS_AS(negative_permutation(1, 5), Error);
  }
}

TEST_CASE("dependence objective of an untrained (zero-weight) discriminator") {
  NetShapes s;
  s.view_dims = {6, 6};
  s.trunk_hidden = {8};
  s.feature_dim = 6;
  s.code_dim = 4;
  s.decoder_hidden = {8};
  s.disc_hidden = 5;
  s.pred_hidden = 5;
  ParamStore p;
  init_critic_params(p, s, 2);
  const std::string head = dis_head_id(0, 1);
  p.at(disc_prefix(head) + ".0.W").setZero();
  p.at(disc_prefix(head) + ".0.b").setZero();
  p.at(disc_prefix(head) + ".1.W").setZero();
  p.at(disc_prefix(head) + ".1.b").setZero();
  Rng rng(3);
  const Matrix anchor = rng.normal_matrix(10, 4);
  const Matrix pos = rng.normal_matrix(10, 4);
  const Matrix neg = negative_sampling(pos, 4);
  const double obj = jsd_mi_objective(anchor, pos, neg, p, head);
  CHECK(obj == doctest::Approx(2.0 * std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("tabular optimal discriminator: independent variables") {
  const Matrix joint = discretized_bivariate_gaussian(0.0, 64, 4.0);
  const double obj = tabular_disc_objective(joint);
  CHECK(std::abs(obj - 2.0 * std::log(0.5)) < 1e-9);
  // Implied dependence estimate: objective + log 4 vanishes at independence.
  CHECK(std::abs(obj + std::log(4.0)) < 1e-9);
}

TEST_CASE("tabular optimal discriminator: perfectly correlated bits") {
  Matrix joint(2, 2);
  joint << 0.5, 0.0, 0.0, 0.5;

  SUBCASE("against product-of-marginals negatives (half the pairs collide)") {
    // Exact value from the oracle: log(2/3) + 0.5 log(1/3).
    const double expected = std::log(2.0 / 3.0) + 0.5 * std::log(1.0 / 3.0);
    CHECK(tabular_disc_objective(joint) == doctest::Approx(expected).epsilon(1e-12));
    // Far above the independent baseline.
    CHECK(tabular_disc_objective(joint) > 2.0 * std::log(0.5) + 0.4);
  }

  SUBCASE("against disjoint (mismatched-pair) negatives the objective is 0") {
    Matrix neg(2, 2);
    neg << 0.0, 0.5, 0.5, 0.0;
    CHECK(tabular_disc_objective(joint, neg) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("tabular objective is monotone in |rho|") {
  const double rhos[] = {0.0, 0.3, 0.6, 0.9};
  double prev = -1e9;
  for (double rho : rhos) {
    const double obj = tabular_disc_objective(discretized_bivariate_gaussian(rho, 64, 4.0));
    CHECK(obj > prev);
    prev = obj;
  }
}

TEST_CASE("KL to the standard normal") {
  SUBCASE("prior equals posterior") {
    GaussianCode code;
    code.mean = Matrix::Zero(3, 4);
    code.log_var = Matrix::Zero(3, 4);
    CHECK(kl_to_standard_normal(code) == 0.0);
  }
  SUBCASE("unit mean shift in one coordinate") {
    GaussianCode code;
    code.mean = Matrix::Zero(1, 4);
    code.mean(0, 0) = 1.0;
    code.log_var = Matrix::Zero(1, 4);
    CHECK(kl_to_standard_normal(code) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("nonnegative on random codes") {
    Rng rng(6);
    for (int i = 0; i < 1000; ++i) {
      GaussianCode code;
      code.mean = rng.normal_matrix(2, 5) * 2.0;
      code.log_var = rng.normal_matrix(2, 5);
      CHECK(kl_to_standard_normal(code) >= 0.0);
    }
  }
  SUBCASE("closed form matches Monte Carlo within 1%") {
    const CheckResult r = kl_monte_carlo_check(kl_to_standard_normal, 3, 1000000, 88);
    CHECK(r.pass);
    CHECK(r.value < 0.01);
  }
  SUBCASE("a sign-flipped implementation is caught and named") {
    const auto broken = [](const GaussianCode& c) { return -kl_to_standard_normal(c); };
    const CheckResult r = kl_monte_carlo_check(broken, 3, 200000, 88);
    CHECK_FALSE(r.pass);
    CHECK(r.name == "kl_monte_carlo_rel_err");
  }
  SUBCASE("non-finite inputs are rejected") {
    GaussianCode code;
    code.mean = Matrix::Zero(1, 2);
    code.mean(0, 0) = std::numeric_limits<double>::quiet_NaN();
    code.log_var = Matrix::Zero(1, 2);
    CHECK_THROWS_AS(kl_to_standard_normal(code), Error);
  }
}

TEST_CASE("exact discrete mutual information") {
  SUBCASE("independent fair bits") {
    DiscreteJoint j = DiscreteJoint::zeros({2, 2});
    j.p = {0.25, 0.25, 0.25, 0.25};
    CHECK(discrete_mi(j, 0, 1) == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("identical fair bits carry ln 2") {
    DiscreteJoint j = DiscreteJoint::zeros({2, 2});
    j.at({0, 0}) = 0.5;
    j.at({1, 1}) = 0.5;
    CHECK(discrete_mi(j, 0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("xor: pairwise independent, conditionally fully dependent") {
    // axes: (x, y, z) with z = x xor y
    DiscreteJoint j = DiscreteJoint::zeros({2, 2, 2});
    j.at({0, 0, 0}) = 0.25;
    j.at({0, 1, 1}) = 0.25;
    j.at({1, 0, 1}) = 0.25;
    j.at({1, 1, 0}) = 0.25;
    CHECK(discrete_mi(j, 0, 2) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(discrete_cmi(j, 0, 2, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("symmetry and nonnegativity on random joints") {
    for (int i = 0; i < 10; ++i) {
      const DiscreteJoint j = random_joint3(1000 + i);
      CHECK(discrete_mi(j, 0, 1) == doctest::Approx(discrete_mi(j, 1, 0)).epsilon(1e-12));
      CHECK(discrete_mi(j, 0, 1) >= -1e-15);
      CHECK(discrete_mi(j, 0, 2) >= -1e-15);
    }
  }
  SUBCASE("unnormalized tables are rejected") {
    DiscreteJoint j = DiscreteJoint::zeros({2, 2});
    j.p = {0.5, 0.5, 0.5, 0.5};
    CHECK_THROWS_AS(discrete_mi(j, 0, 1), Error);
  }
}

TEST_CASE("information identity residuals vanish under their constructions") {
  for (int i = 0; i < 20; ++i) {
    const auto det = verify_decomposition(random_deterministic_encoder_joint(500 + i));
    CHECK(std::abs(det.split) < 1e-9);
    const auto any = verify_decomposition(random_joint3(600 + i));
    CHECK(std::abs(any.chain) < 1e-9);
    const auto coarse = verify_decomposition(random_coarsening_joint(700 + i));
    CHECK(std::abs(coarse.reduce) < 1e-9);
  }
}

TEST_CASE("the split residual detects codes that stay coupled given the input") {
  // zi = zj = a shared random bit drawn independently of v: the residual
  // equals -I(zi;zj|v) = -ln 2, so the oracle is sensitive, not tautological.
  DiscreteJoint j = DiscreteJoint::zeros({2, 2, 2});
  j.at({0, 0, 0}) = 0.25;
  j.at({0, 1, 1}) = 0.25;
  j.at({1, 0, 0}) = 0.25;
  j.at({1, 1, 1}) = 0.25;
  const auto r = verify_decomposition(j);
  CHECK(r.split == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
  CHECK(std::abs(r.chain) < 1e-12);  // the chain rule always holds
}
