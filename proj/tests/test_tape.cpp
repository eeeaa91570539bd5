#include <doctest.h>

#include "core/gradcheck.hpp"
#include "core/rng.hpp"
#include "core/tape.hpp"

using namespace mvsc;

namespace {

// Finite-difference check of a scalar graph built from a single parameter.
double fd_check(const std::function<ad::Var(ad::Tape&, ad::Var)>& graph, int rows, int cols,
                std::uint64_t seed) {
  Rng rng(seed);
  ParamStore params;
  params.add("x", rows, cols);
  params.at("x") = rng.normal_matrix(rows, cols);
  const LossFn fn = [&](const ParamStore& ps, ParamStore* grads) {
    ad::Tape t;
    TapeParams tp(t, ps, [](const std::string&) { return true; });
    const double v = t.backward(graph(t, tp.at("x")));
    if (grads) *grads = tp.grads(t);
    return v;
  };
  return grad_check(fn, params, 1e-6, 64, seed + 1);
}

}  // namespace

TEST_CASE("tape ops propagate gradients (finite differences)") {
  auto sq = [](ad::Tape& t, ad::Var x) { return ad::sum_sq(x); };
  CHECK(fd_check(sq, 4, 3, 11) < 1e-7);

  auto chain = [](ad::Tape& t, ad::Var x) {
    return ad::mean_all(ad::vtanh(ad::scale(ad::square(x), 0.3)));
  };
  CHECK(fd_check(chain, 5, 4, 12) < 1e-7);

  auto smooth = [](ad::Tape& t, ad::Var x) {
    return ad::sum_all(ad::elu(ad::add_scalar(ad::cmul(x, ad::sigmoid(x)), 0.1)));
  };
  CHECK(fd_check(smooth, 6, 2, 13) < 1e-6);

  auto logsig = [](ad::Tape& t, ad::Var x) {
    return ad::mean_all(ad::log_sigmoid(ad::scale(x, 2.0)));
  };
  CHECK(fd_check(logsig, 8, 2, 14) < 1e-6);

  auto matprod = [](ad::Tape& t, ad::Var x) {
    return ad::sum_sq(ad::matmul(ad::transpose(x), x));
  };
  CHECK(fd_check(matprod, 5, 3, 15) < 1e-7);

  auto mixed = [](ad::Tape& t, ad::Var x) {
    ad::Var e = ad::vexp(ad::scale(x, 0.5));
    ad::Var c = ad::concat_cols(e, ad::neg(x));
    return ad::mean_all(ad::square(c));
  };
  CHECK(fd_check(mixed, 4, 4, 16) < 1e-7);

  auto permuted = [](ad::Tape& t, ad::Var x) {
    std::vector<int> perm = {2, 0, 3, 1};
    return ad::sum_sq(ad::sub(x, ad::permute_rows(x, perm)));
  };
  CHECK(fd_check(permuted, 4, 3, 17) < 1e-7);

  auto nodiag = [](ad::Tape& t, ad::Var x) {
    return ad::sum_sq(ad::zero_diag(x));
  };
  CHECK(fd_check(nodiag, 5, 5, 18) < 1e-7);
}

TEST_CASE("clamp blocks gradient outside the interval") {
  ParamStore params;
  params.add("x", 1, 3);
  params.at("x") << -20.0, 0.5, 20.0;
  ad::Tape t;
  TapeParams tp(t, params, [](const std::string&) { return true; });
  ad::Var y = ad::sum_all(ad::clamp(tp.at("x"), -10.0, 10.0));
  t.backward(y);
  const Matrix g = t.grad(tp.at("x"));
  CHECK(g(0, 0) == 0.0);
  CHECK(g(0, 1) == 1.0);
  CHECK(g(0, 2) == 0.0);
}

TEST_CASE("stop_gradient cuts the path") {
  ParamStore params;
  params.add("x", 2, 2);
  params.at("x") << 1, 2, 3, 4;
  ad::Tape t;
  TapeParams tp(t, params, [](const std::string&) { return true; });
  ad::Var y = ad::sum_all(ad::cmul(ad::stop_gradient(tp.at("x")), tp.at("x")));
  t.backward(y);
  const Matrix g = t.grad(tp.at("x"));
  // d/dx sum(const * x) = const, not 2x.
  CHECK(g(0, 0) == doctest::Approx(1.0));
  CHECK(g(1, 1) == doctest::Approx(4.0));
}

TEST_CASE("gradients accumulate across reused nodes") {
  ParamStore params;
  params.add("x", 1, 1);
  params.at("x")(0, 0) = 3.0;
  ad::Tape t;
  TapeParams tp(t, params, [](const std::string&) { return true; });
  ad::Var x = tp.at("x");
  ad::Var y = ad::add(ad::square(x), ad::scale(x, 2.0));  // x^2 + 2x
  t.backward(y);
  CHECK(t.grad(x)(0, 0) == doctest::Approx(8.0));  // 2*3 + 2
}

TEST_CASE("untouched leaves report zero gradient") {
  ParamStore params;
  params.add("x", 2, 2);
  params.add("unused", 3, 3);
  params.at("x").setOnes();
  params.at("unused").setOnes();
  ad::Tape t;
  TapeParams tp(t, params, [](const std::string&) { return true; });
  t.backward(ad::sum_sq(tp.at("x")));
  CHECK(t.grad(tp.at("unused")).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grad_check validates a quadratic exactly") {
  Rng rng(99);
  ParamStore params;
  params.add("a", 3, 4);
  params.add("b", 2, 2);
  params.at("a") = rng.normal_matrix(3, 4);
  params.at("b") = rng.normal_matrix(2, 2);
  const LossFn fn = [](const ParamStore& ps, ParamStore* grads) {
    double v = 0.0;
    for (int i = 0; i < ps.count(); ++i) v += 0.5 * ps.value(i).squaredNorm();
    if (grads) {
      for (int i = 0; i < grads->count(); ++i) grads->value(i) = ps.value(i);
    }
    return v;
  };
  CHECK(grad_check(fn, params, 1e-5) < 1e-7);
}

TEST_CASE("grad_check rejects epsilon of zero") {
  ParamStore params;
  params.add("a", 1, 1);
  const LossFn fn = [](const ParamStore&, ParamStore*) { return 0.0; };
  CHECK_THROWS_AS(grad_check(fn, params, 0.0), Error);
}

TEST_CASE("grad_check reports non-finite losses as failures") {
  ParamStore params;
  params.add("a", 1, 1);
  const LossFn fn = [](const ParamStore&, ParamStore*) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(grad_check(fn, params, 1e-5), Error);
}
