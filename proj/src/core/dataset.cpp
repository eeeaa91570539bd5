#include "core/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "core/csv.hpp"
#include "core/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mvsc {

void SynthSpec::validate() const {
  require(k >= 2, errc::invalid_argument, "synth spec: k must be >= 2");
  require(n >= k, errc::invalid_argument, "synth spec: n must be >= k");
  require(static_cast<int>(view_dims.size()) >= 2, errc::invalid_argument,
          "synth spec: need at least 2 views");
  require(subspace_dim >= 1, errc::invalid_argument, "synth spec: subspace_dim must be >= 1");
  require(subspace_dim <= latent_dim, errc::invalid_argument,
          "synth spec: subspace_dim must be <= latent_dim");
  const int min_view = *std::min_element(view_dims.begin(), view_dims.end());
  require(latent_dim <= min_view, errc::invalid_argument,
          "synth spec: latent_dim must be <= every view dimension");
  require(noise_sigma >= 0.0, errc::invalid_argument, "synth spec: noise_sigma must be >= 0");
}

SynthSpec::Nonlinearity SynthSpec::parse_nonlinearity(const std::string& s) {
  if (s == "none") return Nonlinearity::none;
  if (s == "tanh-affine" || s == "tanh_affine") return Nonlinearity::tanh_affine;
  fail(errc::invalid_argument, "unknown nonlinearity: " + s);
}

std::string SynthSpec::nonlinearity_name() const {
  return nonlinearity == Nonlinearity::none ? "none" : "tanh-affine";
}

int MultiViewDataset::num_classes() const {
  if (!labels) return 0;
  int k = 0;
  for (int v : labels.value()) k = std::max(k, v + 1);
  return k;
}

void MultiViewDataset::validate() const {
  require(num_views() >= 2, errc::invalid_argument, "dataset: need at least 2 views");
  require(names.size() == views.size(), errc::invalid_argument,
          "dataset: names/views size mismatch");
  const int n = num_samples();
  require(n >= 1, errc::invalid_argument, "dataset: need at least 1 sample");
  for (int i = 0; i < num_views(); ++i) {
    require(static_cast<int>(views[i].rows()) == n, errc::format,
            "dataset: row-count mismatch across views (view " + names[i] + ")");
    require(all_finite(views[i]), errc::nonfinite,
            "dataset: non-finite values in view " + names[i]);
  }
  if (labels) {
    require(static_cast<int>(labels->size()) == n, errc::format,
            "dataset: label count does not match sample count");
    const int k = num_classes();
    std::vector<int> count(static_cast<size_t>(k), 0);
    for (int v : labels.value()) {
      require(v >= 0, errc::invalid_argument, "dataset: negative label");
      ++count[static_cast<size_t>(v)];
    }
    for (int c = 0; c < k; ++c)
      require(count[static_cast<size_t>(c)] > 0, errc::invalid_argument,
              "dataset: class " + std::to_string(c) + " has no samples");
  }
}

MultiViewDataset generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  const int m = static_cast<int>(spec.view_dims.size());

  // Cluster sizes: floor(n/k) with the first n mod k clusters one larger.
  std::vector<int> sizes(static_cast<size_t>(spec.k), spec.n / spec.k);
  for (int c = 0; c < spec.n % spec.k; ++c) ++sizes[static_cast<size_t>(c)];

  // Orthonormal basis per cluster.
  std::vector<Matrix> bases;
  {
    Rng rng(derive_seed(spec.seed, "bases"));
    for (int c = 0; c < spec.k; ++c) {
      Matrix g = rng.normal_matrix(spec.latent_dim, spec.subspace_dim);
      Eigen::HouseholderQR<Matrix> qr(g);
      Matrix q = qr.householderQ() * Matrix::Identity(spec.latent_dim, spec.subspace_dim);
      bases.push_back(std::move(q));
    }
  }

  // Shared latent points, grouped by cluster.
  Matrix latent(spec.n, spec.latent_dim);
  std::vector<int> labels(static_cast<size_t>(spec.n));
  {
    Rng rng(derive_seed(spec.seed, "coords"));
    int row = 0;
    for (int c = 0; c < spec.k; ++c) {
      for (int s = 0; s < sizes[static_cast<size_t>(c)]; ++s, ++row) {
        Matrix a = rng.normal_matrix(spec.subspace_dim, 1);
        latent.row(row) = (bases[static_cast<size_t>(c)] * a).transpose();
        labels[static_cast<size_t>(row)] = c;
      }
    }
  }

  MultiViewDataset ds;
  for (int i = 0; i < m; ++i) {
    const int d = spec.view_dims[static_cast<size_t>(i)];
    Rng rng(derive_seed(spec.seed, "viewmap", static_cast<std::uint64_t>(i)));
    Matrix x;
    if (spec.nonlinearity == SynthSpec::Nonlinearity::none) {
      // Pure linear map keeps each cluster inside a subspace_dim-dimensional
      // linear subspace of the view.
      Matrix w = rng.normal_matrix(spec.latent_dim, d) / std::sqrt(double(spec.latent_dim));
      x = latent * w;
    } else {
      // affine -> tanh -> affine; gain picked so tanh bends without saturating
      // everything.
      Matrix w1 = rng.normal_matrix(spec.latent_dim, d) * (1.5 / std::sqrt(double(spec.latent_dim)));
      Matrix b1 = rng.normal_matrix(1, d) * 0.3;
      Matrix w2 = rng.normal_matrix(d, d) / std::sqrt(double(d));
      Matrix b2 = rng.normal_matrix(1, d) * 0.1;
      Matrix pre = (latent * w1).rowwise() + b1.row(0);
      x = (pre.array().tanh().matrix() * w2).rowwise() + b2.row(0);
    }
    if (spec.noise_sigma > 0.0) {
      Rng nrng(derive_seed(spec.seed, "noise", static_cast<std::uint64_t>(i)));
      x += spec.noise_sigma * nrng.normal_matrix(spec.n, d);
    }
    ds.views.push_back(std::move(x));
    ds.names.push_back("view" + std::to_string(i));
  }
  ds.labels = labels;

  json gen;
  gen["n"] = spec.n;
  gen["k"] = spec.k;
  gen["subspace_dim"] = spec.subspace_dim;
  gen["latent_dim"] = spec.latent_dim;
  gen["view_dims"] = spec.view_dims;
  gen["noise_sigma"] = spec.noise_sigma;
  gen["nonlinearity"] = spec.nonlinearity_name();
  gen["seed"] = spec.seed;
  ds.manifest_extra = gen.dump();
  ds.validate();
  return ds;
}

void save_dataset(const MultiViewDataset& ds, const std::string& dir) {
  ds.validate();
  fs::create_directories(dir);
  json man;
  man["n"] = ds.num_samples();
  json views = json::array();
  for (int i = 0; i < ds.num_views(); ++i) {
    const std::string file = ds.names[static_cast<size_t>(i)] + ".csv";
    write_matrix_csv((fs::path(dir) / file).string(), ds.views[static_cast<size_t>(i)]);
    views.push_back({{"name", ds.names[static_cast<size_t>(i)]},
                     {"file", file},
                     {"dim", static_cast<int>(ds.views[static_cast<size_t>(i)].cols())}});
  }
  man["views"] = views;
  if (ds.labels) {
    write_labels((fs::path(dir) / "labels.txt").string(), ds.labels.value());
    man["labels_file"] = "labels.txt";
  }
  if (!ds.manifest_extra.empty()) {
    json extra = json::parse(ds.manifest_extra, nullptr, false);
    if (!extra.is_discarded()) man["generator"] = extra;
  }
  write_text_file((fs::path(dir) / "manifest.json").string(), man.dump(2) + "\n");
}

MultiViewDataset load_dataset(const std::string& dir) {
  const fs::path man_path = fs::path(dir) / "manifest.json";
  require(fs::exists(man_path), errc::io, "missing manifest: " + man_path.string());
  json man = json::parse(read_text_file(man_path.string()), nullptr, false);
  require(!man.is_discarded(), errc::format, "manifest is not valid JSON: " + man_path.string());
  require(man.contains("n") && man.contains("views"), errc::format,
          "manifest missing required keys (n, views)");

  MultiViewDataset ds;
  const int n = man["n"].get<int>();
  for (const auto& v : man["views"]) {
    const std::string name = v.at("name").get<std::string>();
    const std::string file = v.at("file").get<std::string>();
    const fs::path p = fs::path(dir) / file;
    require(fs::exists(p), errc::io, "missing view file: " + p.string());
    Matrix x = read_matrix_csv(p.string());
    require(static_cast<int>(x.rows()) == n, errc::format,
            "row-count mismatch: view " + name + " has " + std::to_string(x.rows()) +
                " rows, manifest says " + std::to_string(n));
    if (v.contains("dim"))
      require(static_cast<int>(x.cols()) == v["dim"].get<int>(), errc::format,
              "column-count mismatch in view " + name);
    require(all_finite(x), errc::nonfinite, "non-finite values in view " + name);
    ds.views.push_back(std::move(x));
    ds.names.push_back(name);
  }
  if (man.contains("labels_file")) {
    const fs::path p = fs::path(dir) / man["labels_file"].get<std::string>();
    require(fs::exists(p), errc::io, "missing labels file: " + p.string());
    ds.labels = read_labels(p.string());
  }
  if (man.contains("generator")) ds.manifest_extra = man["generator"].dump();
  ds.validate();
  return ds;
}

NormalizeMode parse_normalize_mode(const std::string& s) {
  if (s == "zscore") return NormalizeMode::zscore;
  if (s == "minmax") return NormalizeMode::minmax;
  if (s == "none") return NormalizeMode::none;
  fail(errc::invalid_argument, "unknown normalize mode: " + s);
}

const char* normalize_mode_name(NormalizeMode m) {
  switch (m) {
    case NormalizeMode::zscore: return "zscore";
    case NormalizeMode::minmax: return "minmax";
    case NormalizeMode::none: return "none";
  }
  return "?";
}

MultiViewDataset normalize_views(const MultiViewDataset& ds, NormalizeMode mode) {
  ds.validate();
  if (mode == NormalizeMode::none) return ds;
  MultiViewDataset out = ds;
  const double n = static_cast<double>(ds.num_samples());
  for (Matrix& x : out.views) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      auto col = x.col(c);
      if (mode == NormalizeMode::zscore) {
        const double mean = col.mean();
        const double var = (col.array() - mean).square().sum() / n;
        const double sd = std::sqrt(var);
        if (sd < 1e-12) {
          col.setZero();  // constant columns map to zero
        } else {
          col = (col.array() - mean) / sd;
        }
      } else {
        const double lo = col.minCoeff();
        const double hi = col.maxCoeff();
        if (hi - lo < 1e-12) {
          col.setZero();
        } else {
          col = (col.array() - lo) / (hi - lo);
        }
      }
    }
  }
  return out;
}

}  // namespace mvsc
