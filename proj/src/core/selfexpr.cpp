#include "core/selfexpr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/rng.hpp"

namespace mvsc {

namespace {

void check_selfexpr_inputs(const Matrix& codes, const Matrix& coeffs) {
  require(coeffs.rows() == coeffs.cols(), errc::invalid_argument,
          "self-expression: C must be square");
  require(coeffs.rows() == codes.rows(), errc::invalid_argument,
          "self-expression: C size must match sample count");
  require(coeffs.diagonal().cwiseAbs().maxCoeff() == 0.0, errc::invalid_argument,
          "self-expression: diag(C) must be exactly zero");
  require(all_finite(coeffs) && all_finite(codes), errc::nonfinite,
          "self-expression: non-finite inputs");
}

}  // namespace

Matrix self_express(const Matrix& codes, const Matrix& coeffs) {
  check_selfexpr_inputs(codes, coeffs);
  return coeffs.transpose() * codes;
}

double selfexpr_loss(const Matrix& codes, const Matrix& coeffs, double lambda_se) {
  require(lambda_se >= 0.0, errc::invalid_argument, "lambda_se must be >= 0");
  check_selfexpr_inputs(codes, coeffs);
  return (codes - coeffs.transpose() * codes).squaredNorm() +
         lambda_se * coeffs.squaredNorm();
}

ad::Var selfexpr_loss_graph(ad::Tape& t, ad::Var codes, ad::Var coeffs_nodiag,
                            double lambda_se) {
  require(lambda_se >= 0.0, errc::invalid_argument, "lambda_se must be >= 0");
  ad::Var recon = ad::matmul(ad::transpose(coeffs_nodiag), codes);
  ad::Var fit = ad::sum_sq(ad::sub(codes, recon));
  return ad::add(fit, ad::scale(ad::sum_sq(coeffs_nodiag), lambda_se));
}

Matrix closed_form_selfexpr(const Matrix& codes, double lambda_se) {
  require(lambda_se > 0.0, errc::invalid_argument,
          "closed-form self-expression requires lambda_se > 0");
  require(all_finite(codes), errc::nonfinite, "closed-form self-expression: non-finite codes");
  const int n = static_cast<int>(codes.rows());
  require(n >= 2, errc::invalid_argument, "closed-form self-expression needs >= 2 samples");
  Matrix c = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    // Columns of a are the codes of every sample except j.
    Matrix a(codes.cols(), n - 1);
    int col = 0;
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      a.col(col++) = codes.row(i).transpose();
    }
    const Vector target = codes.row(j).transpose();
    Matrix gram = a.transpose() * a;
    gram.diagonal().array() += lambda_se;
    const Vector sol = gram.ldlt().solve(a.transpose() * target);
    col = 0;
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      c(i, j) = sol(col++);
    }
  }
  return c;
}

Matrix fuse_affinities(const std::vector<Matrix>& coeff_list) {
  require(!coeff_list.empty(), errc::invalid_argument, "affinity fusion: empty list");
  const Eigen::Index n = coeff_list.front().rows();
  for (const Matrix& c : coeff_list)
    require(c.rows() == n && c.cols() == n, errc::invalid_argument,
            "affinity fusion: size mismatch");
  Matrix mean = Matrix::Zero(n, n);
  for (const Matrix& c : coeff_list) mean += c;
  mean /= static_cast<double>(coeff_list.size());
  Matrix w = 0.5 * (mean.cwiseAbs() + mean.cwiseAbs().transpose());
  w.diagonal().setZero();
  return w;
}

void validate_affinity(const Matrix& w) {
  require(w.rows() == w.cols(), errc::invalid_argument, "affinity must be square");
  require(all_finite(w), errc::nonfinite, "affinity has non-finite entries");
  require(w.minCoeff() >= 0.0, errc::invalid_argument, "affinity must be nonnegative");
  require((w - w.transpose()).cwiseAbs().maxCoeff() <= 1e-12, errc::invalid_argument,
          "affinity must be symmetric");
  require(w.diagonal().cwiseAbs().maxCoeff() == 0.0, errc::invalid_argument,
          "affinity diagonal must be zero");
}

std::vector<int> kmeans(const Matrix& x, int k, std::uint64_t seed, int restarts,
                        int max_iters, double tol, double* best_inertia_out) {
  const int n = static_cast<int>(x.rows());
  require(k >= 1 && k <= n, errc::invalid_argument, "kmeans: need 1 <= k <= n");
  std::vector<int> best_labels(static_cast<size_t>(n), 0);
  double best_inertia = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < restarts; ++restart) {
    Rng rng(derive_seed(seed, "kmeans", static_cast<std::uint64_t>(restart)));
    // k-means++ seeding.
    Matrix centers(k, x.cols());
    std::vector<double> dist2(static_cast<size_t>(n),
                              std::numeric_limits<double>::infinity());
    centers.row(0) = x.row(rng.uniform_int(n));
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = (x.row(i) - centers.row(c - 1)).squaredNorm();
        dist2[static_cast<size_t>(i)] = std::min(dist2[static_cast<size_t>(i)], d);
        total += dist2[static_cast<size_t>(i)];
      }
      int pick = 0;
      if (total <= 0.0) {
        pick = rng.uniform_int(n);
      } else {
        double target = rng.uniform() * total;
        for (int i = 0; i < n; ++i) {
          target -= dist2[static_cast<size_t>(i)];
          if (target <= 0.0) {
            pick = i;
            break;
          }
          pick = i;
        }
      }
      centers.row(c) = x.row(pick);
    }

    std::vector<int> labels(static_cast<size_t>(n), 0);
    double inertia = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iters; ++iter) {
      double new_inertia = 0.0;
      for (int i = 0; i < n; ++i) {
        int arg = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          const double d = (x.row(i) - centers.row(c)).squaredNorm();
          if (d < best) {
            best = d;
            arg = c;
          }
        }
        labels[static_cast<size_t>(i)] = arg;
        new_inertia += best;
      }
      Matrix sums = Matrix::Zero(k, x.cols());
      std::vector<int> counts(static_cast<size_t>(k), 0);
      for (int i = 0; i < n; ++i) {
        sums.row(labels[static_cast<size_t>(i)]) += x.row(i);
        ++counts[static_cast<size_t>(labels[static_cast<size_t>(i)])];
      }
      for (int c = 0; c < k; ++c) {
        if (counts[static_cast<size_t>(c)] > 0) {
          centers.row(c) = sums.row(c) / counts[static_cast<size_t>(c)];
        } else {
          // Re-seed an empty cluster at the point farthest from its center.
          int far = 0;
          double far_d = -1.0;
          for (int i = 0; i < n; ++i) {
            const double d =
                (x.row(i) - centers.row(labels[static_cast<size_t>(i)])).squaredNorm();
            if (d > far_d) {
              far_d = d;
              far = i;
            }
          }
          centers.row(c) = x.row(far);
        }
      }
      if (std::isfinite(inertia) &&
          std::abs(inertia - new_inertia) <= tol * std::max(1e-12, inertia)) {
        inertia = new_inertia;
        break;
      }
      inertia = new_inertia;
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = labels;
    }
  }
  if (best_inertia_out) *best_inertia_out = best_inertia;
  return best_labels;
}

std::vector<int> spectral_cluster(const Matrix& affinity, int k, std::uint64_t seed,
                                  int kmeans_restarts, int kmeans_iters, double kmeans_tol) {
  validate_affinity(affinity);
  const int n = static_cast<int>(affinity.rows());
  require(k >= 2, errc::invalid_argument, "spectral clustering: k must be >= 2");
  require(k <= n, errc::invalid_argument, "spectral clustering: k must be <= n");

  Vector degree = affinity.rowwise().sum();
  for (int i = 0; i < n; ++i) degree(i) = std::max(degree(i), 1e-12);
  const Vector dinv_sqrt = degree.array().rsqrt();
  Matrix lap = Matrix::Identity(n, n) -
               dinv_sqrt.asDiagonal() * affinity * dinv_sqrt.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Matrix> es(lap);
  require(es.info() == Eigen::Success, errc::numeric, "eigendecomposition failed");
  Matrix embedding = es.eigenvectors().leftCols(k);  // ascending eigenvalues

  for (int i = 0; i < n; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 1e-12) embedding.row(i) /= norm;  // zero rows stay zero
  }
  return kmeans(embedding, k, seed, kmeans_restarts, kmeans_iters, kmeans_tol);
}

}  // namespace mvsc
