#include "core/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "core/csv.hpp"
#include "core/dataset.hpp"

namespace mvsc {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, ',')) {
    if (cur.empty()) continue;
    char* end = nullptr;
    const long v = std::strtol(cur.c_str(), &end, 10);
    require(end != cur.c_str() && *end == '\0', errc::invalid_argument,
            "bad integer list element: " + cur);
    out.push_back(static_cast<int>(v));
  }
  require(!out.empty(), errc::invalid_argument, "empty integer list");
  return out;
}

std::string format_int_list(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(end != s.c_str() && *end == '\0', errc::invalid_argument, "bad number: " + s);
  return v;
}

long parse_long(const std::string& s) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  require(end != s.c_str() && *end == '\0', errc::invalid_argument, "bad integer: " + s);
  return v;
}

struct KeyDef {
  const char* key;
  const char* doc;
  std::function<std::string(const Config&)> get;
  std::function<void(Config&, const std::string&)> set;
};

const std::vector<KeyDef>& key_defs() {
  static const std::vector<KeyDef> defs = {
      {"seed", "master seed; every random stream derives from it",
       [](const Config& c) { return std::to_string(c.seed); },
       [](Config& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(parse_long(v)); }},
      {"precision", "floating point width; only f64 is supported",
       [](const Config& c) { return c.precision; },
       [](Config& c, const std::string& v) { c.precision = v; }},
      {"normalize", "per-feature input normalization: zscore | minmax | none",
       [](const Config& c) { return c.normalize; },
       [](Config& c, const std::string& v) { c.normalize = v; }},
      {"batch_policy", "batching; only full (all samples per step) is supported",
       [](const Config& c) { return c.batch_policy; },
       [](Config& c, const std::string& v) { c.batch_policy = v; }},
      {"full_batch_ceiling", "largest sample count accepted for training",
       [](const Config& c) { return std::to_string(c.full_batch_ceiling); },
       [](Config& c, const std::string& v) { c.full_batch_ceiling = static_cast<int>(parse_long(v)); }},
      {"arch.trunk_hidden", "encoder trunk hidden widths (comma list)",
       [](const Config& c) { return format_int_list(c.trunk_hidden); },
       [](Config& c, const std::string& v) { c.trunk_hidden = parse_int_list(v); }},
      {"arch.feature_dim", "width of the pre-split feature",
       [](const Config& c) { return std::to_string(c.feature_dim); },
       [](Config& c, const std::string& v) { c.feature_dim = static_cast<int>(parse_long(v)); }},
      {"arch.code_dim", "width of the common code and of the specific code",
       [](const Config& c) { return std::to_string(c.code_dim); },
       [](Config& c, const std::string& v) { c.code_dim = static_cast<int>(parse_long(v)); }},
      {"arch.decoder_hidden", "decoder hidden widths (comma list)",
       [](const Config& c) { return format_int_list(c.decoder_hidden); },
       [](Config& c, const std::string& v) { c.decoder_hidden = parse_int_list(v); }},
      {"arch.disc_hidden", "discriminator hidden width",
       [](const Config& c) { return std::to_string(c.disc_hidden); },
       [](Config& c, const std::string& v) { c.disc_hidden = static_cast<int>(parse_long(v)); }},
      {"arch.pred_hidden", "cross-code predictor hidden width",
       [](const Config& c) { return std::to_string(c.pred_hidden); },
       [](Config& c, const std::string& v) { c.pred_hidden = static_cast<int>(parse_long(v)); }},
      {"weights.lambda", "bottleneck multiplier (shared across views)",
       [](const Config& c) { return format_double(c.lambda); },
       [](Config& c, const std::string& v) { c.lambda = parse_double(v); }},
      {"weights.alpha", "weight of the cross-code unpredictability loss",
       [](const Config& c) { return format_double(c.alpha); },
       [](Config& c, const std::string& v) { c.alpha = parse_double(v); }},
      {"weights.beta", "weight of the reconstruction loss",
       [](const Config& c) { return format_double(c.beta); },
       [](Config& c, const std::string& v) { c.beta = parse_double(v); }},
      {"weights.gamma", "weight of the self-expression loss",
       [](const Config& c) { return format_double(c.gamma); },
       [](Config& c, const std::string& v) { c.gamma = parse_double(v); }},
      {"weights.lambda_se", "ridge weight inside the self-expression loss",
       [](const Config& c) { return format_double(c.lambda_se); },
       [](Config& c, const std::string& v) { c.lambda_se = parse_double(v); }},
      {"opt.step_size", "Adam step size (shared by main and critic updates)",
       [](const Config& c) { return format_double(c.step_size); },
       [](Config& c, const std::string& v) { c.step_size = parse_double(v); }},
      {"opt.beta1", "Adam first-moment decay",
       [](const Config& c) { return format_double(c.adam_beta1); },
       [](Config& c, const std::string& v) { c.adam_beta1 = parse_double(v); }},
      {"opt.beta2", "Adam second-moment decay",
       [](const Config& c) { return format_double(c.adam_beta2); },
       [](Config& c, const std::string& v) { c.adam_beta2 = parse_double(v); }},
      {"opt.eps", "Adam denominator epsilon",
       [](const Config& c) { return format_double(c.adam_eps); },
       [](Config& c, const std::string& v) { c.adam_eps = parse_double(v); }},
      {"opt.pretrain_steps", "autoencoder warm-up steps",
       [](const Config& c) { return std::to_string(c.pretrain_steps); },
       [](Config& c, const std::string& v) { c.pretrain_steps = static_cast<int>(parse_long(v)); }},
      {"opt.train_steps", "joint training steps",
       [](const Config& c) { return std::to_string(c.train_steps); },
       [](Config& c, const std::string& v) { c.train_steps = static_cast<int>(parse_long(v)); }},
      {"opt.critic_steps", "critic updates per main update",
       [](const Config& c) { return std::to_string(c.critic_steps); },
       [](Config& c, const std::string& v) { c.critic_steps = static_cast<int>(parse_long(v)); }},
      {"cluster.k", "cluster count; 0 infers it from dataset labels",
       [](const Config& c) { return std::to_string(c.cluster_k); },
       [](Config& c, const std::string& v) { c.cluster_k = static_cast<int>(parse_long(v)); }},
      {"cluster.kmeans_restarts", "seeded k-means restarts, best inertia wins",
       [](const Config& c) { return std::to_string(c.kmeans_restarts); },
       [](Config& c, const std::string& v) { c.kmeans_restarts = static_cast<int>(parse_long(v)); }},
      {"cluster.kmeans_iters", "k-means iteration cap",
       [](const Config& c) { return std::to_string(c.kmeans_iters); },
       [](Config& c, const std::string& v) { c.kmeans_iters = static_cast<int>(parse_long(v)); }},
      {"cluster.kmeans_tol", "relative inertia tolerance for k-means",
       [](const Config& c) { return format_double(c.kmeans_tol); },
       [](Config& c, const std::string& v) { c.kmeans_tol = parse_double(v); }},
      {"ablate", "comma list of drop_Ls, drop_mkl, drop_cmi, drop_dis",
       [](const Config& c) { return c.ablate; },
       [](Config& c, const std::string& v) { c.ablate = v; }},
      {"log_every", "emit a loss record every this many steps",
       [](const Config& c) { return std::to_string(c.log_every); },
       [](Config& c, const std::string& v) { c.log_every = static_cast<int>(parse_long(v)); }},
  };
  return defs;
}

const KeyDef& find_key(const std::string& key) {
  for (const KeyDef& d : key_defs())
    if (key == d.key) return d;
  fail(errc::invalid_argument, "unknown config key: " + key);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

void Config::validate() const {
  require(precision == "f64", errc::invalid_argument,
          "precision: only f64 is supported (got " + precision + ")");
  require(batch_policy == "full", errc::invalid_argument,
          "batch_policy: only full is supported (got " + batch_policy + ")");
  parse_normalize_mode(normalize);
  require(step_size > 0.0, errc::invalid_argument, "opt.step_size must be > 0");
  require(pretrain_steps >= 0, errc::invalid_argument, "opt.pretrain_steps must be >= 0");
  require(train_steps >= 0, errc::invalid_argument, "opt.train_steps must be >= 0");
  require(critic_steps >= 0, errc::invalid_argument, "opt.critic_steps must be >= 0");
  require(feature_dim >= 1 && code_dim >= 1, errc::invalid_argument,
          "arch widths must be >= 1");
  require(lambda >= 0 && alpha >= 0 && beta >= 0 && gamma >= 0 && lambda_se >= 0,
          errc::invalid_argument, "loss weights must be >= 0");
  require(log_every >= 1, errc::invalid_argument, "log_every must be >= 1");
  require(kmeans_restarts >= 1 && kmeans_iters >= 1, errc::invalid_argument,
          "k-means settings must be >= 1");
}

void Config::set(const std::string& key, const std::string& value) {
  find_key(key).set(*this, value);
}

std::string Config::get(const std::string& key) const { return find_key(key).get(*this); }

std::vector<std::string> Config::keys() {
  std::vector<std::string> out;
  for (const KeyDef& d : key_defs()) out.push_back(d.key);
  return out;
}

std::string Config::key_doc(const std::string& key) { return find_key(key).doc; }

std::string Config::to_string() const {
  std::string out;
  for (const KeyDef& d : key_defs()) out += std::string(d.key) + " = " + d.get(*this) + "\n";
  return out;
}

std::string Config::to_string_documented() const {
  std::string out;
  for (const KeyDef& d : key_defs())
    out += std::string(d.key) + " = " + d.get(*this) + "  # " + d.doc + "\n";
  return out;
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    require(eq != std::string::npos, errc::invalid_argument,
            "config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    cfg.set(key, value);
  }
  cfg.validate();
  return cfg;
}

Config Config::from_file(const std::string& path) {
  return from_string(read_text_file(path));
}

}  // namespace mvsc
