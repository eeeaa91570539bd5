// Command-line front end. Everything numerical goes through the C API in
// mvsc/mvsc.h; this file only handles flags, files and process exit codes.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvsc/mvsc.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit discipline: 0 success, 1 validation failure, 2 numeric failure,
// 3 oracle/verification failure.
int exit_code_for(mvsc_status s) {
  switch (s) {
    case MVSC_OK: return 0;
    case MVSC_ERR_INVALID_ARGUMENT:
    case MVSC_ERR_IO:
    case MVSC_ERR_FORMAT:
    case MVSC_ERR_NONFINITE: return 1;
    case MVSC_ERR_NUMERIC: return 2;
    case MVSC_ERR_VERIFY: return 3;
    case MVSC_ERR_INTERNAL: return 2;
  }
  return 2;
}

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void die(mvsc_status s, const std::string& context) {
  throw CliError{exit_code_for(s),
                 context + ": " + mvsc_status_name(s) + " (" + mvsc_last_error() + ")"};
}

[[noreturn]] void die_validation(const std::string& message) { throw CliError{1, message}; }

void check(mvsc_status s, const std::string& context) {
  if (s != MVSC_OK) die(s, context);
}

// RAII for the opaque handles.
using DatasetPtr = std::unique_ptr<mvsc_dataset, decltype(&mvsc_dataset_free)>;
using ConfigPtr = std::unique_ptr<mvsc_config, decltype(&mvsc_config_free)>;
using ModelPtr = std::unique_ptr<mvsc_model, decltype(&mvsc_model_free)>;
using ResultPtr = std::unique_ptr<mvsc_result, decltype(&mvsc_result_free)>;

DatasetPtr load_dataset(const std::string& dir) {
  mvsc_dataset* ds = nullptr;
  check(mvsc_dataset_load(dir.c_str(), &ds), "loading dataset " + dir);
  return DatasetPtr(ds, &mvsc_dataset_free);
}

std::string config_echo(const mvsc_config* cfg, bool documented) {
  const size_t need = mvsc_config_echo(cfg, documented ? 1 : 0, nullptr, 0);
  std::string buf(need, '\0');
  mvsc_config_echo(cfg, documented ? 1 : 0, buf.data(), buf.size());
  buf.resize(need - 1);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out.good()) die_validation("cannot write " + path);
  out << content;
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) die_validation("cannot read " + path + " for checksumming");
  std::uint64_t h = 1469598103934665603ULL;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (!in) break;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_matrix_csv(const std::string& path, const std::vector<double>& values, int rows,
                      int cols) {
  std::ofstream out(path);
  if (!out.good()) die_validation("cannot write " + path);
  char buf[40];
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", values[static_cast<size_t>(r) * cols + c]);
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

std::vector<int> read_label_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) die_validation("cannot read labels file " + path);
  std::vector<int> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    labels.push_back(std::atoi(line.c_str()));
  }
  if (labels.empty()) die_validation("labels file is empty: " + path);
  return labels;
}

std::string default_out_root() {
  const char* env = std::getenv("MVSC_OUT_ROOT");
  return env && *env ? env : "mvsc_runs";
}

std::string resolve_out_dir(const std::string& flag, const std::string& fallback_name) {
  if (!flag.empty()) return flag;
  return (fs::path(default_out_root()) / fallback_name).string();
}

json metrics_json(double acc, double nmi, double ari, int n, int k) {
  json m;
  m["acc"] = acc;
  m["nmi"] = nmi;
  m["ari"] = ari;
  m["n"] = n;
  m["k"] = k;
  m["nmi_normalization"] = "sqrt";
  return m;
}

// ---------------------------------------------------------------------------
// train plumbing shared by `train` and `ablate`

struct LogWriter {
  std::ofstream pretrain, train;
  bool pretrain_header = false, train_header = false;
};

void step_logger(void* user, const char* phase, int step, int num_values,
                 const char* const* names, const double* values) {
  auto* w = static_cast<LogWriter*>(user);
  const bool is_pretrain = std::string(phase) == "pretrain";
  std::ofstream& out = is_pretrain ? w->pretrain : w->train;
  bool& wrote = is_pretrain ? w->pretrain_header : w->train_header;
  if (!out.is_open()) return;
  if (!wrote) {
    out << "step";
    for (int i = 0; i < num_values; ++i) out << ',' << names[i];
    out << '\n';
    wrote = true;
  }
  char buf[40];
  out << step;
  for (int i = 0; i < num_values; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
    out << ',' << buf;
  }
  out << '\n';
}

struct TrainArtifacts {
  double acc = -1, nmi = -1, ari = -1;
  bool has_metrics = false;
  int n = 0, k = 0;
};

// Runs train + cluster and writes the run directory.
TrainArtifacts run_train_to_dir(const mvsc_dataset* ds, const mvsc_config* cfg, int k,
                                const std::string& out_dir, const std::string& data_dir) {
  fs::create_directories(out_dir);
  const std::string echo = config_echo(cfg, false);
  write_file((fs::path(out_dir) / "config.txt").string(), echo);

  LogWriter logs;
  logs.pretrain.open((fs::path(out_dir) / "pretrain_log.csv").string());
  logs.train.open((fs::path(out_dir) / "train_log.csv").string());

  mvsc_model* model_raw = nullptr;
  check(mvsc_train(ds, cfg, &step_logger, &logs, &model_raw), "training");
  ModelPtr model(model_raw, &mvsc_model_free);
  logs.pretrain.close();
  logs.train.close();

  const std::string ckpt = (fs::path(out_dir) / "model.mvsc").string();
  check(mvsc_model_save(model.get(), ckpt.c_str()), "saving checkpoint");

  mvsc_result* res_raw = nullptr;
  check(mvsc_model_cluster(model.get(), ds, k, &res_raw), "clustering");
  ResultPtr res(res_raw, &mvsc_result_free);

  const int n = mvsc_result_num_samples(res.get());
  TrainArtifacts art;
  art.n = n;
  art.k = k > 0 ? k : mvsc_dataset_num_classes(ds);

  std::vector<int> labels(static_cast<size_t>(n));
  check(mvsc_result_labels(res.get(), labels.data()), "reading labels");
  {
    std::ofstream out((fs::path(out_dir) / "labels.csv").string());
    for (int v : labels) out << v << '\n';
  }
  std::vector<double> mat(static_cast<size_t>(n) * n);
  check(mvsc_result_affinity(res.get(), mat.data()), "reading affinity");
  write_matrix_csv((fs::path(out_dir) / "affinity.csv").string(), mat, n, n);
  for (int v = 0; v < mvsc_dataset_num_views(ds); ++v) {
    check(mvsc_result_coeffs(res.get(), v, mat.data()), "reading coefficients");
    write_matrix_csv(
        (fs::path(out_dir) / ("coeffs_view" + std::to_string(v) + ".csv")).string(), mat, n,
        n);
  }

  if (mvsc_result_metrics(res.get(), &art.acc, &art.nmi, &art.ari) == MVSC_OK) {
    art.has_metrics = true;
    write_file((fs::path(out_dir) / "metrics.json").string(),
               metrics_json(art.acc, art.nmi, art.ari, n, art.k).dump(2) + "\n");
  }

  // Run manifest with checksums of every artifact.
  json man;
  man["command"] = "train";
  man["dataset_dir"] = data_dir;
  man["k"] = art.k;
  char seed_buf[64];
  mvsc_config_get(cfg, "seed", seed_buf, sizeof(seed_buf));
  man["seed"] = std::string(seed_buf);
  man["config"] = echo;
  json outputs = json::object();
  for (const char* name : {"config.txt", "pretrain_log.csv", "train_log.csv", "model.mvsc",
                           "labels.csv", "affinity.csv"}) {
    const std::string p = (fs::path(out_dir) / name).string();
    if (fs::exists(p)) outputs[name] = hex64(fnv1a_file(p));
  }
  for (int v = 0; v < mvsc_dataset_num_views(ds); ++v) {
    const std::string name = "coeffs_view" + std::to_string(v) + ".csv";
    outputs[name] = hex64(fnv1a_file((fs::path(out_dir) / name).string()));
  }
  if (art.has_metrics)
    outputs["metrics.json"] = hex64(fnv1a_file((fs::path(out_dir) / "metrics.json").string()));
  man["outputs"] = outputs;
  write_file((fs::path(out_dir) / "manifest.json").string(), man.dump(2) + "\n");
  return art;
}

ConfigPtr make_config(const std::string& config_path,
                      const std::vector<std::string>& overrides, long long seed,
                      const std::string& ablate, bool ablate_given) {
  mvsc_config* raw = nullptr;
  if (config_path.empty()) {
    check(mvsc_config_create(&raw), "creating config");
  } else {
    check(mvsc_config_load(config_path.c_str(), &raw), "loading config " + config_path);
  }
  ConfigPtr cfg(raw, &mvsc_config_free);
  for (const std::string& kv : overrides) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) die_validation("--set expects key=value, got: " + kv);
    check(mvsc_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()),
          "setting " + kv);
  }
  if (seed >= 0)
    check(mvsc_config_set(cfg.get(), "seed", std::to_string(seed).c_str()), "setting seed");
  if (ablate_given)
    check(mvsc_config_set(cfg.get(), "ablate", ablate.c_str()), "setting ablation flags");
  return cfg;
}

// ---------------------------------------------------------------------------

int cmd_synth(int n, int k, const std::string& views, int subspace_dim, int latent_dim,
              double noise_sigma, const std::string& nonlinearity, std::uint64_t seed,
              const std::string& out_flag) {
  std::vector<int> dims;
  std::stringstream ss(views);
  std::string item;
  while (std::getline(ss, item, ',')) dims.push_back(std::atoi(item.c_str()));
  if (dims.empty()) die_validation("--views expects a comma list of dimensions");

  mvsc_synth_spec spec;
  spec.n = n;
  spec.k = k;
  spec.subspace_dim = subspace_dim;
  spec.latent_dim = latent_dim;
  spec.view_dims = dims.data();
  spec.num_views = static_cast<int>(dims.size());
  spec.noise_sigma = noise_sigma;
  spec.nonlinearity = nonlinearity.c_str();
  spec.seed = seed;

  mvsc_dataset* raw = nullptr;
  check(mvsc_dataset_generate(&spec, &raw), "generating dataset");
  DatasetPtr ds(raw, &mvsc_dataset_free);

  const std::string out_dir =
      resolve_out_dir(out_flag, "synth-n" + std::to_string(n) + "-k" + std::to_string(k) +
                                    "-seed" + std::to_string(seed));
  check(mvsc_dataset_save(ds.get(), out_dir.c_str()), "saving dataset");

  json man;
  man["command"] = "synth";
  man["seed"] = seed;
  json outputs = json::object();
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name == "run.json") continue;
    outputs[name] = hex64(fnv1a_file(entry.path().string()));
  }
  man["outputs"] = outputs;
  write_file((fs::path(out_dir) / "run.json").string(), man.dump(2) + "\n");
  std::cout << "dataset written to " << out_dir << "\n";
  return 0;
}

int cmd_train(const std::string& data_dir, const std::string& config_path,
              const std::vector<std::string>& sets, long long seed,
              const std::string& ablate, bool ablate_given, int k,
              const std::string& out_flag) {
  DatasetPtr ds = load_dataset(data_dir);
  ConfigPtr cfg = make_config(config_path, sets, seed, ablate, ablate_given);
  char seed_buf[64];
  mvsc_config_get(cfg.get(), "seed", seed_buf, sizeof(seed_buf));
  const std::string out_dir =
      resolve_out_dir(out_flag, std::string("train-seed") + seed_buf);
  const TrainArtifacts art = run_train_to_dir(ds.get(), cfg.get(), k, out_dir, data_dir);
  std::cout << "run written to " << out_dir << "\n";
  if (art.has_metrics) {
    std::printf("acc=%.4f nmi=%.4f ari=%.4f (n=%d, k=%d)\n", art.acc, art.nmi, art.ari,
                art.n, art.k);
  }
  return 0;
}

int cmd_ablate(const std::string& data_dir, const std::string& config_path,
               const std::vector<std::string>& sets, const std::string& seeds_flag,
               int jobs, const std::string& out_flag) {
  DatasetPtr ds = load_dataset(data_dir);
  if (mvsc_dataset_num_classes(ds.get()) < 2)
    die_validation("ablation sweeps need a labeled dataset");

  std::vector<long long> seeds;
  {
    std::stringstream ss(seeds_flag);
    std::string item;
    while (std::getline(ss, item, ',')) seeds.push_back(std::atoll(item.c_str()));
  }
  if (seeds.empty()) die_validation("--seeds expects a comma list of seeds");

  const std::vector<std::string> rows = {"", "drop_Ls", "drop_mkl", "drop_cmi", "drop_dis"};
  const std::string out_dir = resolve_out_dir(out_flag, "ablate");
  fs::create_directories(out_dir);

  struct Cell {
    double acc = 0, nmi = 0, ari = 0;
  };
  std::vector<std::vector<Cell>> results(rows.size(), std::vector<Cell>(seeds.size()));
  std::vector<std::pair<size_t, size_t>> tasks;
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t s = 0; s < seeds.size(); ++s) tasks.emplace_back(r, s);

  std::mutex fail_mutex;
  std::string failure;
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t idx = next.fetch_add(1);
      if (idx >= tasks.size()) return;
      const auto [r, s] = tasks[idx];
      try {
        ConfigPtr cfg = make_config(config_path, sets, seeds[s], rows[r], true);
        const std::string run_dir =
            (fs::path(out_dir) / ("run-" + (rows[r].empty() ? "full" : rows[r]) + "-seed" +
                                  std::to_string(seeds[s])))
                .string();
        const TrainArtifacts art =
            run_train_to_dir(ds.get(), cfg.get(), 0, run_dir, data_dir);
        results[r][s] = {art.acc, art.nmi, art.ari};
      } catch (const CliError& e) {
        std::lock_guard<std::mutex> lock(fail_mutex);
        if (failure.empty()) failure = e.message;
      }
    }
  };
  const int nthreads = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads - 1; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (!failure.empty()) throw CliError{2, failure};

  std::ostringstream csv;
  csv << "ablation,acc_mean,acc_std,nmi_mean,nmi_std,ari_mean,ari_std\n";
  for (size_t r = 0; r < rows.size(); ++r) {
    auto stat = [&](auto get) {
      double mean = 0;
      for (const Cell& c : results[r]) mean += get(c);
      mean /= static_cast<double>(seeds.size());
      double var = 0;
      for (const Cell& c : results[r]) var += (get(c) - mean) * (get(c) - mean);
      var /= static_cast<double>(seeds.size());
      return std::make_pair(mean, std::sqrt(var));
    };
    const auto [am, as] = stat([](const Cell& c) { return c.acc; });
    const auto [nm, ns] = stat([](const Cell& c) { return c.nmi; });
    const auto [rm, rs] = stat([](const Cell& c) { return c.ari; });
    char line[256];
    std::snprintf(line, sizeof(line), "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                  rows[r].empty() ? "full" : rows[r].c_str(), am, as, nm, ns, rm, rs);
    csv << line;
  }
  write_file((fs::path(out_dir) / "ablation.csv").string(), csv.str());

  std::ostringstream runs_csv;
  runs_csv << "ablation,seed,acc,nmi,ari\n";
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t s = 0; s < seeds.size(); ++s) {
      char line[256];
      std::snprintf(line, sizeof(line), "%s,%lld,%.6f,%.6f,%.6f\n",
                    rows[r].empty() ? "full" : rows[r].c_str(), seeds[s], results[r][s].acc,
                    results[r][s].nmi, results[r][s].ari);
      runs_csv << line;
    }
  write_file((fs::path(out_dir) / "ablation_runs.csv").string(), runs_csv.str());

  json man;
  man["command"] = "ablate";
  man["dataset_dir"] = data_dir;
  json seed_list = json::array();
  for (long long s : seeds) seed_list.push_back(s);
  man["seeds"] = seed_list;
  man["outputs"] = {
      {"ablation.csv", hex64(fnv1a_file((fs::path(out_dir) / "ablation.csv").string()))},
      {"ablation_runs.csv",
       hex64(fnv1a_file((fs::path(out_dir) / "ablation_runs.csv").string()))}};
  write_file((fs::path(out_dir) / "manifest.json").string(), man.dump(2) + "\n");

  std::cout << csv.str();
  std::cout << "ablation table written to " << out_dir << "\n";
  return 0;
}

struct VerifyPrinter {
  std::ostringstream report;
};

void verify_printer(void* user, const char* name, double value, double threshold, int pass,
                    const char* note) {
  auto* p = static_cast<VerifyPrinter*>(user);
  char line[256];
  std::snprintf(line, sizeof(line), "%s = %.6e (threshold %.6e, %s)\n", name, value,
                threshold, pass ? "pass" : "FAIL");
  p->report << line;
  std::printf("[%s] %s = %.3e (threshold %.3e)  %s\n", pass ? "pass" : "FAIL", name, value,
              threshold, note);
}

int cmd_verify(const std::string& out_path) {
  VerifyPrinter printer;
  const mvsc_status s = mvsc_verify(&verify_printer, &printer);
  printer.report << "overall = " << (s == MVSC_OK ? "pass" : "FAIL") << "\n";
  if (!out_path.empty()) write_file(out_path, printer.report.str());
  if (s != MVSC_OK && s != MVSC_ERR_VERIFY) die(s, "verification");
  return s == MVSC_OK ? 0 : 3;
}

int cmd_viz(const std::string& run_dir, const std::string& data_flag,
            const std::string& out_flag, int subset) {
  const std::string man_path = (fs::path(run_dir) / "manifest.json").string();
  std::ifstream man_in(man_path);
  if (!man_in.good()) die_validation("missing run manifest: " + man_path);
  json man = json::parse(man_in, nullptr, false);
  if (man.is_discarded()) die_validation("run manifest is not valid JSON: " + man_path);

  const std::string data_dir =
      !data_flag.empty() ? data_flag : man.value("dataset_dir", std::string());
  if (data_dir.empty()) die_validation("dataset directory unknown; pass --data");
  DatasetPtr ds = load_dataset(data_dir);

  mvsc_model* model_raw = nullptr;
  check(mvsc_model_load((fs::path(run_dir) / "model.mvsc").string().c_str(), &model_raw),
        "loading checkpoint");
  ModelPtr model(model_raw, &mvsc_model_free);

  const int k = man.value("k", 0);
  mvsc_result* res_raw = nullptr;
  check(mvsc_model_cluster(model.get(), ds.get(), k, &res_raw), "clustering");
  ResultPtr res(res_raw, &mvsc_result_free);

  const int n = mvsc_result_num_samples(res.get());
  const int m = mvsc_dataset_num_views(ds.get());
  const std::string out_dir =
      out_flag.empty() ? (fs::path(run_dir) / "viz").string() : out_flag;
  fs::create_directories(out_dir);

  // Label order: ground truth when present, else the predicted labels.
  std::vector<int> labels(static_cast<size_t>(n));
  bool truth_available = mvsc_dataset_num_classes(ds.get()) >= 2;
  if (truth_available) {
    check(mvsc_dataset_labels(ds.get(), labels.data()), "reading labels");
  } else {
    check(mvsc_result_labels(res.get(), labels.data()), "reading predicted labels");
  }
  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return labels[static_cast<size_t>(a)] < labels[static_cast<size_t>(b)]; });

  auto reorder = [&](const std::vector<double>& mat) {
    std::vector<double> out(static_cast<size_t>(n) * n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        out[static_cast<size_t>(r) * n + c] =
            mat[static_cast<size_t>(order[static_cast<size_t>(r)]) * n +
                order[static_cast<size_t>(c)]];
    return out;
  };

  std::vector<double> mat(static_cast<size_t>(n) * n);
  check(mvsc_result_affinity(res.get(), mat.data()), "reading affinity");
  std::vector<double> ordered = reorder(mat);
  write_matrix_csv((fs::path(out_dir) / "affinity_fused.csv").string(), ordered, n, n);
  check(mvsc_write_heatmap_ppm((fs::path(out_dir) / "affinity_fused.ppm").string().c_str(),
                               ordered.data(), n, n, 0),
        "writing heatmap");

  for (int v = 0; v < m; ++v) {
    check(mvsc_result_coeffs(res.get(), v, mat.data()), "reading coefficients");
    for (double& x : mat) x = std::abs(x);
    ordered = reorder(mat);
    const std::string base = "affinity_view" + std::to_string(v);
    write_matrix_csv((fs::path(out_dir) / (base + ".csv")).string(), ordered, n, n);
    check(mvsc_write_heatmap_ppm((fs::path(out_dir) / (base + ".ppm")).string().c_str(),
                                 ordered.data(), n, n, 0),
          "writing heatmap");
  }

  // Common-code scatter (top-2 principal components), one file per view.
  for (int v = 0; v < m; ++v) {
    std::vector<double> xy(static_cast<size_t>(n) * 2);
    check(mvsc_model_embed2d(model.get(), ds.get(), v, "zc", xy.data()), "projecting codes");
    const std::string base = "zc_view" + std::to_string(v) + "_pca";
    std::ofstream csv((fs::path(out_dir) / (base + ".csv")).string());
    csv << "x,y,label\n";
    for (int i = 0; i < n; ++i)
      csv << xy[2 * static_cast<size_t>(i)] << ',' << xy[2 * static_cast<size_t>(i) + 1]
          << ',' << labels[static_cast<size_t>(i)] << '\n';
    csv.close();
    check(mvsc_write_scatter_ppm((fs::path(out_dir) / (base + ".ppm")).string().c_str(),
                                 xy.data(), labels.data(), n),
          "writing scatter");
  }

  // Cross-view block cosine matrix and correlation summary (views 0 and 1).
  if (m >= 2) {
    int dim = 0;
    check(mvsc_model_cosine_block(model.get(), ds.get(), 0, 1, subset, 7, nullptr, &dim),
          "sizing cosine block");
    std::vector<double> block(static_cast<size_t>(dim) * dim);
    check(mvsc_model_cosine_block(model.get(), ds.get(), 0, 1, subset, 7, block.data(), &dim),
          "computing cosine block");
    write_matrix_csv((fs::path(out_dir) / "cosine_blocks.csv").string(), block, dim, dim);
    check(mvsc_write_heatmap_ppm((fs::path(out_dir) / "cosine_blocks.ppm").string().c_str(),
                                 block.data(), dim, dim, 1),
          "writing cosine heatmap");

    double cc = 0, cs = 0;
    check(mvsc_model_cosine_stats(model.get(), ds.get(), 0, 1, &cc, &cs),
          "computing cosine stats");
    std::ostringstream stats;
    stats << "mean_abs_cosine_zc_zc = " << cc << "\n";
    stats << "mean_abs_cosine_zc_zs = " << cs << "\n";
    stats << "projection = top-2 principal components\n";
    stats << "cosine_block_order = zc_i, zs_i, zc_j, zs_j (subset of " << subset
          << " samples)\n";
    stats << "label_order = " << (truth_available ? "ground truth" : "predicted") << "\n";
    write_file((fs::path(out_dir) / "stats.txt").string(), stats.str());
  }

  json viz_man;
  viz_man["command"] = "viz";
  viz_man["run_dir"] = run_dir;
  viz_man["dataset_dir"] = data_dir;
  json outputs = json::object();
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name == "manifest.json") continue;
    outputs[name] = hex64(fnv1a_file(entry.path().string()));
  }
  viz_man["outputs"] = outputs;
  write_file((fs::path(out_dir) / "manifest.json").string(), viz_man.dump(2) + "\n");
  std::cout << "viz artifacts written to " << out_dir << "\n";
  return 0;
}

int cmd_eval(const std::string& truth_path, const std::string& data_dir,
             const std::string& pred_path, const std::string& out_path) {
  std::vector<int> truth;
  if (!truth_path.empty()) {
    truth = read_label_file(truth_path);
  } else if (!data_dir.empty()) {
    DatasetPtr ds = load_dataset(data_dir);
    if (mvsc_dataset_num_classes(ds.get()) < 1)
      die_validation("dataset has no labels; pass --truth");
    truth.resize(static_cast<size_t>(mvsc_dataset_num_samples(ds.get())));
    check(mvsc_dataset_labels(ds.get(), truth.data()), "reading labels");
  } else {
    die_validation("eval needs --truth or --data");
  }
  const std::vector<int> pred = read_label_file(pred_path);
  if (pred.size() != truth.size())
    die_validation("label count mismatch: truth has " + std::to_string(truth.size()) +
                   ", prediction has " + std::to_string(pred.size()));
  double acc = 0, nmi = 0, ari = 0;
  check(mvsc_evaluate_labels(truth.data(), pred.data(), static_cast<int>(truth.size()),
                             &acc, &nmi, &ari),
        "evaluating");
  int k = 0;
  for (int v : truth) k = std::max(k, v + 1);
  const std::string text =
      metrics_json(acc, nmi, ari, static_cast<int>(truth.size()), k).dump(2) + "\n";
  if (!out_path.empty()) write_file(out_path, text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-view subspace clustering toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic multi-view dataset");
  int n = 500, k = 5, subspace_dim = 3, latent_dim = 10;
  double noise_sigma = 0.1;
  std::string views = "30,30", nonlinearity = "tanh-affine", synth_out;
  std::uint64_t synth_seed = 1;
  synth->add_option("--n", n, "sample count");
  synth->add_option("--k", k, "cluster count");
  synth->add_option("--views", views, "comma list of view dimensions");
  synth->add_option("--subspace-dim", subspace_dim, "intrinsic dimension per cluster");
  synth->add_option("--latent-dim", latent_dim, "shared latent dimension");
  synth->add_option("--noise-sigma", noise_sigma, "additive noise std");
  synth->add_option("--nonlinearity", nonlinearity, "none | tanh-affine");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "output dataset directory");

  // train
  auto* train = app.add_subcommand("train", "train and cluster a dataset directory");
  std::string data_dir, config_path, ablate_flags, train_out;
  std::vector<std::string> sets;
  long long train_seed = -1;
  int cluster_k = 0;
  train->add_option("--data", data_dir, "dataset directory")->required();
  train->add_option("--config", config_path, "config file (flat key = value)");
  train->add_option("--set", sets, "config override key=value (repeatable)");
  train->add_option("--seed", train_seed, "override the config seed");
  auto* ablate_opt = train->add_option("--ablate", ablate_flags,
                                       "comma list of drop_Ls, drop_mkl, drop_cmi, drop_dis");
  train->add_option("--k", cluster_k, "cluster count (default: infer from labels)");
  train->add_option("--out", train_out, "run directory");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "single-term ablation sweep over seeds");
  std::string ab_data, ab_config, ab_seeds = "1,2,3,4,5", ab_out;
  std::vector<std::string> ab_sets;
  int jobs = 1;
  ablate->add_option("--data", ab_data, "dataset directory")->required();
  ablate->add_option("--config", ab_config, "config file");
  ablate->add_option("--set", ab_sets, "config override key=value (repeatable)");
  ablate->add_option("--seeds", ab_seeds, "comma list of seeds");
  ablate->add_option("--jobs", jobs, "parallel runs");
  ablate->add_option("--out", ab_out, "output directory");

  // verify
  auto* verify = app.add_subcommand("verify", "run the oracle verification suite");
  std::string verify_out;
  verify->add_option("--out", verify_out, "write the flat report to this file");

  // viz
  auto* viz = app.add_subcommand("viz", "export plots and CSVs for a finished run");
  std::string viz_run, viz_data, viz_out;
  int viz_subset = 8;
  viz->add_option("--run", viz_run, "run directory produced by train")->required();
  viz->add_option("--data", viz_data, "dataset directory (default: from the run manifest)");
  viz->add_option("--subset", viz_subset, "samples in the cosine block matrix");
  viz->add_option("--out", viz_out, "output directory (default: <run>/viz)");

  // eval
  auto* eval = app.add_subcommand("eval", "score predicted labels against ground truth");
  std::string ev_truth, ev_data, ev_pred, ev_out;
  eval->add_option("--truth", ev_truth, "ground-truth labels file (one int per line)");
  eval->add_option("--data", ev_data, "dataset directory holding ground truth");
  eval->add_option("--pred", ev_pred, "predicted labels file")->required();
  eval->add_option("--out", ev_out, "write the metrics record to this file");

  // print-config on any subcommand context
  bool print_config = false;
  app.add_flag("--print-config", print_config, "print the default config with docs and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (print_config) {
      mvsc_config* cfg = nullptr;
      mvsc_config_create(&cfg);
      std::cout << config_echo(cfg, true);
      mvsc_config_free(cfg);
      return 0;
    }
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (print_config) {
    mvsc_config* cfg = nullptr;
    mvsc_config_create(&cfg);
    std::cout << config_echo(cfg, true);
    mvsc_config_free(cfg);
    return 0;
  }

  try {
    if (synth->parsed())
      return cmd_synth(n, k, views, subspace_dim, latent_dim, noise_sigma, nonlinearity,
                       synth_seed, synth_out);
    if (train->parsed())
      return cmd_train(data_dir, config_path, sets, train_seed, ablate_flags,
                       ablate_opt->count() > 0, cluster_k, train_out);
    if (ablate->parsed()) return cmd_ablate(ab_data, ab_config, ab_sets, ab_seeds, jobs, ab_out);
    if (verify->parsed()) return cmd_verify(verify_out);
    if (viz->parsed()) return cmd_viz(viz_run, viz_data, viz_out, viz_subset);
    if (eval->parsed()) return cmd_eval(ev_truth, ev_data, ev_pred, ev_out);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
