#include "core/verify.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "core/gradcheck.hpp"
#include "core/metrics.hpp"
#include "core/mi.hpp"
#include "core/rng.hpp"
#include "core/selfexpr.hpp"

namespace mvsc {

namespace {

std::vector<double> random_simplex(Rng& rng, int size) {
  std::vector<double> w(static_cast<size_t>(size));
  double sum = 0.0;
  for (double& x : w) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    x = -std::log(u);
    sum += x;
  }
  for (double& x : w) x /= sum;
  return w;
}

}  // namespace

DiscreteJoint random_deterministic_encoder_joint(std::uint64_t seed) {
  Rng rng(seed);
  const int nv = 2 + rng.uniform_int(3);   // |v| in 2..4
  const int ni = 2 + rng.uniform_int(3);   // |zi| in 2..4
  const int nj = 2 + rng.uniform_int(3);   // |zj| in 2..4
  std::vector<int> f(static_cast<size_t>(nv)), g(static_cast<size_t>(nv));
  for (int v = 0; v < nv; ++v) {
    f[static_cast<size_t>(v)] = rng.uniform_int(ni);
    g[static_cast<size_t>(v)] = rng.uniform_int(nj);
  }
  const std::vector<double> pv = random_simplex(rng, nv);
  DiscreteJoint j = DiscreteJoint::zeros({nv, ni, nj});
  for (int v = 0; v < nv; ++v)
    j.at({v, f[static_cast<size_t>(v)], g[static_cast<size_t>(v)]}) +=
        pv[static_cast<size_t>(v)];
  return j;
}

DiscreteJoint random_joint3(std::uint64_t seed) {
  Rng rng(seed);
  const int nv = 2 + rng.uniform_int(3);
  const int ni = 2 + rng.uniform_int(3);
  const int nj = 2 + rng.uniform_int(3);
  DiscreteJoint j = DiscreteJoint::zeros({nv, ni, nj});
  const std::vector<double> p = random_simplex(rng, nv * ni * nj);
  j.p = p;
  return j;
}

DiscreteJoint random_coarsening_joint(std::uint64_t seed) {
  Rng rng(seed);
  const int nv = 2 + rng.uniform_int(3);
  const int ni = 2 + rng.uniform_int(3);
  const int nj = 2 + rng.uniform_int(2);  // zj = g(zi), possibly coarser
  std::vector<int> g(static_cast<size_t>(ni));
  for (int z = 0; z < ni; ++z) g[static_cast<size_t>(z)] = rng.uniform_int(nj);
  const std::vector<double> pvi = random_simplex(rng, nv * ni);
  DiscreteJoint j = DiscreteJoint::zeros({nv, ni, nj});
  int cell = 0;
  for (int v = 0; v < nv; ++v)
    for (int z = 0; z < ni; ++z)
      j.at({v, z, g[static_cast<size_t>(z)]}) += pvi[static_cast<size_t>(cell++)];
  return j;
}

CheckResult kl_monte_carlo_check(const std::function<double(const GaussianCode&)>& kl_fn,
                                 int num_codes, long long samples_per_code,
                                 std::uint64_t seed) {
  double max_rel = 0.0;
  for (int c = 0; c < num_codes; ++c) {
    Rng rng(derive_seed(seed, "klmc", static_cast<std::uint64_t>(c)));
    const int batch = 4, d = 4;
    GaussianCode code;
    code.mean = Matrix::Zero(batch, d);
    code.log_var = Matrix::Zero(batch, d);
    for (int r = 0; r < batch; ++r)
      for (int j = 0; j < d; ++j) {
        code.mean(r, j) = 4.0 * rng.uniform() - 2.0;
        code.log_var(r, j) = 2.0 * rng.uniform() - 1.0;
      }
    const double closed = kl_fn(code);

    // z = mu + sigma * eps; log p(z) - log q(z) sums
    // 0.5 * (z^2 - eps^2 - log_var) per coordinate.
    const long long per_row = samples_per_code / batch;
    double acc = 0.0;
    for (int r = 0; r < batch; ++r) {
      double row_acc = 0.0;
      for (long long s = 0; s < per_row; ++s) {
        double ratio = 0.0;
        for (int j = 0; j < d; ++j) {
          const double sigma = std::exp(0.5 * code.log_var(r, j));
          const double eps = rng.normal();
          const double z = code.mean(r, j) + sigma * eps;
          ratio += 0.5 * (z * z - eps * eps - code.log_var(r, j));
        }
        row_acc += ratio;
      }
      acc += row_acc / static_cast<double>(per_row);
    }
    const double mc = acc / batch;
    const double rel = std::abs(closed - mc) / std::max(std::abs(closed), 1e-12);
    max_rel = std::max(max_rel, rel);
  }
  CheckResult r;
  r.name = "kl_monte_carlo_rel_err";
  r.value = max_rel;
  r.threshold = 0.01;
  r.pass = max_rel <= r.threshold;
  r.note = "closed form vs " + std::to_string(samples_per_code) + "-sample estimate, " +
           std::to_string(num_codes) + " random codes";
  return r;
}

Matrix gradient_selfexpr(const Matrix& codes, double lambda_se, int max_iters, double tol) {
  require(lambda_se > 0.0, errc::invalid_argument, "gradient_selfexpr needs lambda_se > 0");
  const int n = static_cast<int>(codes.rows());
  // Exact Lipschitz constant of the gradient: 2 (sigma_max(Z)^2 + lambda).
  Eigen::JacobiSVD<Matrix> svd(codes);
  const double smax = svd.singularValues()(0);
  const double step = 1.0 / (2.0 * (smax * smax + lambda_se));

  ParamStore params;
  params.add("C", n, n);
  for (int it = 0; it < max_iters; ++it) {
    ad::Tape t;
    TapeParams p(t, params, [](const std::string&) { return true; });
    ad::Var loss =
        selfexpr_loss_graph(t, t.constant(codes), ad::zero_diag(p.at("C")), lambda_se);
    t.backward(loss);
    const Matrix g = t.grad(p.at("C"));
    params.at("C") -= step * g;
    params.at("C").diagonal().setZero();
    if (g.cwiseAbs().maxCoeff() * step < tol) break;
  }
  return params.at("C");
}

std::vector<CheckResult> run_verification(std::uint64_t seed) {
  std::vector<CheckResult> out;

  {  // Information identities on random discrete constructions.
    double max_split = 0.0, max_chain = 0.0, max_reduce = 0.0;
    for (int i = 0; i < 20; ++i) {
      const auto det = verify_decomposition(
          random_deterministic_encoder_joint(derive_seed(seed, "det", i)));
      max_split = std::max(max_split, std::abs(det.split));
      const auto any = verify_decomposition(random_joint3(derive_seed(seed, "any", i)));
      max_chain = std::max(max_chain, std::abs(any.chain));
      const auto coarse =
          verify_decomposition(random_coarsening_joint(derive_seed(seed, "coarse", i)));
      max_reduce = std::max(max_reduce, std::abs(coarse.reduce));
    }
    out.push_back({"mi_split_residual", max_split, 1e-9, max_split <= 1e-9,
                   "I(v;zi) = I(v;zi|zj) + I(zi;zj) under deterministic encoders, 20 joints"});
    out.push_back({"mi_chain_residual", max_chain, 1e-9, max_chain <= 1e-9,
                   "I(v;zi,zj) = I(v;zj) + I(v;zi|zj) on arbitrary joints, 20 joints"});
    out.push_back({"mi_reduce_residual", max_reduce, 1e-9, max_reduce <= 1e-9,
                   "I(v;zi|zj) = I(v;zi) - I(v;zj) when zj coarsens zi, 20 joints"});
  }

  out.push_back(kl_monte_carlo_check(kl_to_standard_normal, 10, 1000000,
                                     derive_seed(seed, "klmc")));

  {  // KL nonnegativity on random codes.
    double min_kl = std::numeric_limits<double>::infinity();
    Rng rng(derive_seed(seed, "klpos"));
    for (int i = 0; i < 1000; ++i) {
      GaussianCode code;
      code.mean = rng.normal_matrix(3, 5) * 2.0;
      code.log_var = rng.normal_matrix(3, 5);
      min_kl = std::min(min_kl, kl_to_standard_normal(code));
    }
    const double violation = std::max(0.0, -min_kl);
    out.push_back({"kl_nonnegative_violation", violation, 0.0, violation <= 0.0,
                   "min KL over 1000 random codes must be >= 0"});
  }

  {  // Tabular optimal-discriminator objective on discretized Gaussians.
    const double indep = tabular_disc_objective(discretized_bivariate_gaussian(0.0, 64, 4.0));
    const double err = std::abs(indep - 2.0 * std::log(0.5));
    out.push_back({"jsd_independent_abs_err", err, 1e-3, err <= 1e-3,
                   "objective at rho=0 equals 2 log(1/2)"});

    const double rhos[] = {0.0, 0.3, 0.6, 0.9};
    double worst_gap = -std::numeric_limits<double>::infinity();
    double prev = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double obj = tabular_disc_objective(discretized_bivariate_gaussian(rhos[i], 64, 4.0));
      if (i > 0) worst_gap = std::max(worst_gap, prev - obj);
      prev = obj;
    }
    out.push_back({"jsd_monotonicity_violation", worst_gap, -1e-12, worst_gap <= -1e-12,
                   "objective strictly increases over |rho| in {0, 0.3, 0.6, 0.9}"});
  }

  {  // Gradient-descent self-expression against the ridge closed form.
    double max_abs = 0.0;
    for (int i = 0; i < 3; ++i) {
      Rng rng(derive_seed(seed, "se", i));
      const Matrix codes = rng.normal_matrix(30, 6);
      const Matrix trained = gradient_selfexpr(codes, 1.0);
      const Matrix oracle = closed_form_selfexpr(codes, 1.0);
      max_abs = std::max(max_abs, (trained - oracle).cwiseAbs().maxCoeff());
    }
    out.push_back({"selfexpr_oracle_max_abs", max_abs, 1e-4, max_abs <= 1e-4,
                   "gradient-trained C vs ridge closed form, 3 random instances"});
  }

  {  // Assignment-based accuracy against the exhaustive oracle.
    double max_diff = 0.0;
    Rng rng(derive_seed(seed, "acc"));
    for (int i = 0; i < 100; ++i) {
      const int k = 2 + rng.uniform_int(5);
      const int n = 20 + rng.uniform_int(181);
      std::vector<int> truth(static_cast<size_t>(n)), pred(static_cast<size_t>(n));
      for (int s = 0; s < n; ++s) {
        truth[static_cast<size_t>(s)] = rng.uniform_int(k);
        pred[static_cast<size_t>(s)] = rng.uniform_int(k);
      }
      max_diff = std::max(max_diff, std::abs(accuracy(truth, pred) -
                                             brute_force_accuracy(truth, pred)));
    }
    out.push_back({"accuracy_vs_bruteforce_max_abs", max_diff, 1e-12, max_diff <= 1e-12,
                   "assignment accuracy equals the exhaustive oracle, 100 instances"});
  }

  return out;
}

bool all_passed(const std::vector<CheckResult>& checks) {
  for (const CheckResult& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string format_verification_report(const std::vector<CheckResult>& checks) {
  std::string out;
  char buf[64];
  for (const CheckResult& c : checks) {
    std::snprintf(buf, sizeof(buf), "%.6e", c.value);
    out += c.name + " = " + buf;
    std::snprintf(buf, sizeof(buf), "%.6e", c.threshold);
    out += std::string(" (threshold ") + buf + ", " + (c.pass ? "pass" : "FAIL") + ")\n";
  }
  out += std::string("overall = ") + (all_passed(checks) ? "pass" : "FAIL") + "\n";
  return out;
}

}  // namespace mvsc
