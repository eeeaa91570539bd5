#include "core/viz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "core/rng.hpp"

namespace mvsc {

Matrix pca2(const Matrix& x) {
  require(x.cols() >= 2, errc::invalid_argument, "pca2 needs at least 2 feature columns");
  const Matrix centered = x.rowwise() - x.colwise().mean();
  const Matrix cov = centered.transpose() * centered / std::max(1.0, double(x.rows() - 1));
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  require(es.info() == Eigen::Success, errc::numeric, "pca2: eigendecomposition failed");
  Matrix dirs = es.eigenvectors().rightCols(2).rowwise().reverse();  // top-2, descending
  // Sign convention: largest-magnitude component positive.
  for (int c = 0; c < 2; ++c) {
    Eigen::Index arg = 0;
    dirs.col(c).cwiseAbs().maxCoeff(&arg);
    if (dirs(arg, c) < 0) dirs.col(c) = -dirs.col(c);
  }
  return centered * dirs;
}

double mean_abs_cosine(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), errc::invalid_argument, "cosine: row mismatch");
  double acc = 0.0;
  for (int r = 0; r < a.rows(); ++r) {
    const double na = a.row(r).norm(), nb = b.row(r).norm();
    if (na > 0 && nb > 0) acc += std::abs(a.row(r).dot(b.row(r)) / (na * nb));
  }
  return acc / static_cast<double>(a.rows());
}

CosineStats cosine_stats(const LatentBundle& view_i, const LatentBundle& view_j) {
  CosineStats s;
  s.common_common = mean_abs_cosine(view_i.zc, view_j.zc);
  s.common_specific = mean_abs_cosine(view_i.zc, view_i.zs);
  return s;
}

CosineBlockMatrix cosine_block_matrix(const LatentBundle& view_i, const LatentBundle& view_j,
                                      int subset, std::uint64_t seed) {
  const int n = static_cast<int>(view_i.zc.rows());
  require(subset >= 1 && subset <= n, errc::invalid_argument,
          "cosine block matrix: bad subset size");
  Rng rng(seed);
  std::vector<int> perm = rng.permutation(n);
  perm.resize(static_cast<size_t>(subset));
  std::sort(perm.begin(), perm.end());

  const Matrix* blocks[4] = {&view_i.zc, &view_i.zs, &view_j.zc, &view_j.zs};
  const char* names[4] = {"zc_i", "zs_i", "zc_j", "zs_j"};
  const int d = static_cast<int>(view_i.zc.cols());
  Matrix feats(4 * subset, d);
  CosineBlockMatrix out;
  for (int b = 0; b < 4; ++b) {
    out.block_names.push_back(names[b]);
    for (int s = 0; s < subset; ++s)
      feats.row(b * subset + s) = blocks[b]->row(perm[static_cast<size_t>(s)]);
  }
  out.sample_ids = perm;
  const int rows = 4 * subset;
  out.values = Matrix::Zero(rows, rows);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < rows; ++c) {
      const double nr = feats.row(r).norm(), nc = feats.row(c).norm();
      out.values(r, c) = (nr > 0 && nc > 0) ? feats.row(r).dot(feats.row(c)) / (nr * nc)
                                            : (r == c ? 1.0 : 0.0);
    }
  }
  return out;
}

std::vector<int> order_by_label(const std::vector<int>& labels) {
  std::vector<int> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&labels](int a, int b) {
    return labels[static_cast<size_t>(a)] < labels[static_cast<size_t>(b)];
  });
  return order;
}

Matrix reorder_symmetric(const Matrix& m, const std::vector<int>& order) {
  require(m.rows() == m.cols() && static_cast<size_t>(m.rows()) == order.size(),
          errc::invalid_argument, "reorder: size mismatch");
  const int n = static_cast<int>(order.size());
  Matrix out(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      out(r, c) = m(order[static_cast<size_t>(r)], order[static_cast<size_t>(c)]);
  return out;
}

namespace {

struct Rgb {
  unsigned char r, g, b;
};

void write_ppm(const std::string& path, int w, int h, const std::vector<Rgb>& pixels) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io, "cannot open for writing: " + path);
  out << "P6\n" << w << " " << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size() * 3));
  require(out.good(), errc::io, "write failed: " + path);
}

Rgb magnitude_color(double t) {  // 0 -> white, 1 -> dark blue
  t = std::clamp(t, 0.0, 1.0);
  const double r = 255.0 * (1.0 - t);
  const double g = 255.0 * (1.0 - 0.85 * t);
  const double b = 255.0 * (1.0 - 0.45 * t);
  return {static_cast<unsigned char>(r), static_cast<unsigned char>(g),
          static_cast<unsigned char>(b)};
}

Rgb signed_color(double t) {  // -1 -> blue, 0 -> white, +1 -> red
  t = std::clamp(t, -1.0, 1.0);
  if (t >= 0)
    return {255, static_cast<unsigned char>(255 * (1 - t)),
            static_cast<unsigned char>(255 * (1 - t))};
  return {static_cast<unsigned char>(255 * (1 + t)),
          static_cast<unsigned char>(255 * (1 + t)), 255};
}

const Rgb kPalette[10] = {{31, 119, 180}, {255, 127, 14},  {44, 160, 44},
                          {214, 39, 40},  {148, 103, 189}, {140, 86, 75},
                          {227, 119, 194}, {127, 127, 127}, {188, 189, 34},
                          {23, 190, 207}};

}  // namespace

void write_heatmap_ppm(const std::string& path, const Matrix& m) {
  const double peak = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  const int h = static_cast<int>(m.rows()), w = static_cast<int>(m.cols());
  std::vector<Rgb> px(static_cast<size_t>(w) * h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      px[static_cast<size_t>(r) * w + c] = magnitude_color(std::abs(m(r, c)) / peak);
  write_ppm(path, w, h, px);
}

void write_signed_heatmap_ppm(const std::string& path, const Matrix& m) {
  const int h = static_cast<int>(m.rows()), w = static_cast<int>(m.cols());
  std::vector<Rgb> px(static_cast<size_t>(w) * h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) px[static_cast<size_t>(r) * w + c] = signed_color(m(r, c));
  write_ppm(path, w, h, px);
}

void write_scatter_ppm(const std::string& path, const Matrix& xy,
                       const std::vector<int>& labels, int canvas) {
  require(xy.cols() == 2, errc::invalid_argument, "scatter expects n x 2 input");
  require(labels.empty() || labels.size() == static_cast<size_t>(xy.rows()),
          errc::invalid_argument, "scatter: label count mismatch");
  std::vector<Rgb> px(static_cast<size_t>(canvas) * canvas, Rgb{255, 255, 255});
  const double x0 = xy.col(0).minCoeff(), x1 = xy.col(0).maxCoeff();
  const double y0 = xy.col(1).minCoeff(), y1 = xy.col(1).maxCoeff();
  const double sx = x1 > x0 ? (canvas - 9.0) / (x1 - x0) : 0.0;
  const double sy = y1 > y0 ? (canvas - 9.0) / (y1 - y0) : 0.0;
  for (int i = 0; i < xy.rows(); ++i) {
    const int cx = 4 + static_cast<int>((xy(i, 0) - x0) * sx);
    const int cy = canvas - 5 - static_cast<int>((xy(i, 1) - y0) * sy);
    const Rgb color =
        labels.empty() ? Rgb{40, 40, 40} : kPalette[labels[static_cast<size_t>(i)] % 10];
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int x = cx + dx, y = cy + dy;
        if (x >= 0 && x < canvas && y >= 0 && y < canvas)
          px[static_cast<size_t>(y) * canvas + x] = color;
      }
  }
  write_ppm(path, canvas, canvas, px);
}

}  // namespace mvsc
