#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "core/csv.hpp"
#include "core/dataset.hpp"
#include "core/rng.hpp"

using namespace mvsc;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("mvsc_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

SynthSpec small_spec() {
  SynthSpec s;
  s.n = 60;
  s.k = 3;
  s.subspace_dim = 2;
  s.latent_dim = 5;
  s.view_dims = {9, 7};
  s.noise_sigma = 0.05;
  s.seed = 42;
  return s;
}

}  // namespace

TEST_CASE("equal split of cluster sizes") {
  SynthSpec s = small_spec();
  s.n = 500;
  s.k = 5;
  const MultiViewDataset ds = generate_synthetic(s);
  std::vector<int> count(5, 0);
  for (int v : ds.labels.value()) ++count[static_cast<size_t>(v)];
  for (int c = 0; c < 5; ++c) CHECK(count[static_cast<size_t>(c)] == 100);

  s.n = 502;  // two clusters get one extra
  const MultiViewDataset ds2 = generate_synthetic(s);
  std::vector<int> count2(5, 0);
  for (int v : ds2.labels.value()) ++count2[static_cast<size_t>(v)];
  CHECK(count2[0] == 101);
  CHECK(count2[1] == 101);
  CHECK(count2[2] == 100);
}

TEST_CASE("generation is a pure function of the spec") {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    SynthSpec s = small_spec();
    s.n = 20 + rng.uniform_int(40);
    s.k = 2 + rng.uniform_int(3);
    s.seed = rng.raw();
    s.nonlinearity = trial % 2 == 0 ? SynthSpec::Nonlinearity::none
                                    : SynthSpec::Nonlinearity::tanh_affine;
    const MultiViewDataset a = generate_synthetic(s);
    const MultiViewDataset b = generate_synthetic(s);
    REQUIRE(a.num_views() == b.num_views());
    for (int v = 0; v < a.num_views(); ++v) CHECK(a.views[v] == b.views[v]);
    CHECK(a.labels.value() == b.labels.value());
  }
}

TEST_CASE("linear views of one-dimensional subspaces have rank at most k") {
  SynthSpec s = small_spec();
  s.n = 80;
  s.k = 2;
  s.subspace_dim = 1;
  s.noise_sigma = 0.0;
  s.nonlinearity = SynthSpec::Nonlinearity::none;
  const MultiViewDataset ds = generate_synthetic(s);
  for (const Matrix& x : ds.views) {
    Eigen::JacobiSVD<Matrix> svd(x);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > 1e-9 * svd.singularValues()(0)) ++rank;
    CHECK(rank <= 2);
  }
}

TEST_CASE("noise-free linear clusters stay inside their subspace") {
  SynthSpec s = small_spec();
  s.n = 90;
  s.k = 3;
  s.subspace_dim = 2;
  s.noise_sigma = 0.0;
  s.nonlinearity = SynthSpec::Nonlinearity::none;
  const MultiViewDataset ds = generate_synthetic(s);
  const std::vector<int>& labels = ds.labels.value();
  for (const Matrix& x : ds.views) {
    for (int c = 0; c < s.k; ++c) {
      std::vector<int> rows;
      for (int i = 0; i < s.n; ++i)
        if (labels[static_cast<size_t>(i)] == c) rows.push_back(i);
      Matrix sub(static_cast<Eigen::Index>(rows.size()), x.cols());
      for (size_t r = 0; r < rows.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
      Eigen::JacobiSVD<Matrix> svd(sub);
      for (int i = s.subspace_dim; i < svd.singularValues().size(); ++i)
        CHECK(svd.singularValues()(i) < 1e-6);
    }
  }
}

TEST_CASE("save/load round-trips exactly") {
  Rng rng(5150);
  for (int trial = 0; trial < 3; ++trial) {
    SynthSpec s = small_spec();
    s.seed = rng.raw();
    s.noise_sigma = 0.3;
    const MultiViewDataset ds = generate_synthetic(s);
    const fs::path dir = temp_dir("roundtrip" + std::to_string(trial));
    save_dataset(ds, dir.string());
    const MultiViewDataset back = load_dataset(dir.string());
    REQUIRE(back.num_views() == ds.num_views());
    for (int v = 0; v < ds.num_views(); ++v) CHECK(back.views[v] == ds.views[v]);
    CHECK(back.labels.value() == ds.labels.value());
    fs::remove_all(dir);
  }
}

TEST_CASE("loader reports distinct error categories") {
  const fs::path dir = temp_dir("loader");

  SUBCASE("missing manifest") {
    try {
      load_dataset((dir / "nope").string());
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::io);
      CHECK(std::string(e.what()).find("manifest") != std::string::npos);
    }
  }

  SUBCASE("row-count mismatch across views") {
    write_text_file((dir / "manifest.json").string(),
                    R"({"n": 3, "views": [{"name":"a","file":"a.csv","dim":2},
                                          {"name":"b","file":"b.csv","dim":2}]})");
    write_text_file((dir / "a.csv").string(), "1,2\n3,4\n5,6\n");
    write_text_file((dir / "b.csv").string(), "1,2\n3,4\n");
    try {
      load_dataset(dir.string());
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::format);
    }
  }

  SUBCASE("manifest referencing a missing view file") {
    write_text_file((dir / "manifest.json").string(),
                    R"({"n": 2, "views": [{"name":"a","file":"a.csv","dim":2},
                                          {"name":"gone","file":"gone.csv","dim":2}]})");
    write_text_file((dir / "a.csv").string(), "1,2\n3,4\n");
    try {
      load_dataset(dir.string());
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::io);
      CHECK(std::string(e.what()).find("gone.csv") != std::string::npos);
    }
  }

  SUBCASE("non-finite values") {
    write_text_file((dir / "manifest.json").string(),
                    R"({"n": 2, "views": [{"name":"a","file":"a.csv","dim":2},
                                          {"name":"b","file":"b.csv","dim":2}]})");
    write_text_file((dir / "a.csv").string(), "1,2\n3,nan\n");
    write_text_file((dir / "b.csv").string(), "1,2\n3,4\n");
    try {
      load_dataset(dir.string());
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::nonfinite);
    }
  }

  fs::remove_all(dir);
}

TEST_CASE("normalization modes") {
  SynthSpec s = small_spec();
  MultiViewDataset ds = generate_synthetic(s);
  // Plant a constant column.
  ds.views[0].col(2).setConstant(3.25);

  SUBCASE("zscore sets column means to 0 and std to 1") {
    const MultiViewDataset z = normalize_views(ds, NormalizeMode::zscore);
    for (const Matrix& x : z.views) {
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        CHECK(std::abs(x.col(c).mean()) < 1e-9);
        const double var = (x.col(c).array() - x.col(c).mean()).square().sum() / x.rows();
        if (x.col(c).cwiseAbs().maxCoeff() > 0)
          CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
    CHECK(z.views[0].col(2).cwiseAbs().maxCoeff() == 0.0);  // constant column -> zeros
    CHECK(z.labels.value() == ds.labels.value());
  }

  SUBCASE("minmax maps to [0,1]") {
    const MultiViewDataset m = normalize_views(ds, NormalizeMode::minmax);
    for (const Matrix& x : m.views) {
      CHECK(x.minCoeff() >= 0.0);
      CHECK(x.maxCoeff() <= 1.0 + 1e-12);
    }
    CHECK(m.views[0].col(2).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("none returns the input unchanged") {
    const MultiViewDataset same = normalize_views(ds, NormalizeMode::none);
    for (int v = 0; v < ds.num_views(); ++v) CHECK(same.views[v] == ds.views[v]);
  }
}

TEST_CASE("spec invariants are enforced") {
  SynthSpec s = small_spec();
  s.k = 1;
  CHECK_THROWS_AS(generate_synthetic(s), Error);
  s = small_spec();
  s.subspace_dim = 9;  // > latent_dim
  CHECK_THROWS_AS(generate_synthetic(s), Error);
  s = small_spec();
  s.latent_dim = 8;  // > min view dim
  CHECK_THROWS_AS(generate_synthetic(s), Error);
  s = small_spec();
  s.n = 2;  // < k
  CHECK_THROWS_AS(generate_synthetic(s), Error);
}
