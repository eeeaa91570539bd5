#include "core/params.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace mvsc {

Matrix& ParamStore::add(const std::string& name, int rows, int cols) {
  require(!has(name), errc::internal, "duplicate parameter: " + name);
  entries_.push_back({name, Matrix::Zero(rows, cols)});
  index_[name] = static_cast<int>(entries_.size()) - 1;
  return entries_.back().value;
}

Matrix& ParamStore::at(const std::string& name) {
  auto it = index_.find(name);
  require(it != index_.end(), errc::invalid_argument, "unknown parameter: " + name);
  return entries_[static_cast<size_t>(it->second)].value;
}

const Matrix& ParamStore::at(const std::string& name) const {
  auto it = index_.find(name);
  require(it != index_.end(), errc::invalid_argument, "unknown parameter: " + name);
  return entries_[static_cast<size_t>(it->second)].value;
}

std::int64_t ParamStore::total_size() const {
  std::int64_t s = 0;
  for (const Entry& e : entries_) s += e.value.size();
  return s;
}

ParamStore ParamStore::zeros_like() const {
  ParamStore out;
  for (const Entry& e : entries_)
    out.add(e.name, static_cast<int>(e.value.rows()), static_cast<int>(e.value.cols()));
  return out;
}

namespace {

constexpr char kMagic[8] = {'M', 'V', 'S', 'C', 'K', 'P', 'T', '1'};

void write_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::ifstream& in, const std::string& path) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  require(in.good(), errc::format, "truncated checkpoint: " + path);
  return v;
}

}  // namespace

void save_checkpoint(const ParamStore& params, const std::string& path,
                     const std::string& config_echo) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io, "cannot open for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_u64(out, config_echo.size());
  out.write(config_echo.data(), static_cast<std::streamsize>(config_echo.size()));
  write_u64(out, static_cast<std::uint64_t>(params.count()));
  for (int i = 0; i < params.count(); ++i) {
    const std::string& name = params.name(i);
    const Matrix& m = params.value(i);
    write_u64(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u64(out, static_cast<std::uint64_t>(m.rows()));
    write_u64(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double v = m(r, c);
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
      }
  }
  require(out.good(), errc::io, "write failed: " + path);
}

ParamStore load_checkpoint(const std::string& path, std::string* config_echo) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io, "cannot open: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  require(in.good() && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0, errc::format,
          "not a checkpoint file: " + path);
  const std::uint64_t cfg_len = read_u64(in, path);
  std::string cfg(cfg_len, '\0');
  in.read(cfg.data(), static_cast<std::streamsize>(cfg_len));
  require(in.good(), errc::format, "truncated checkpoint: " + path);
  if (config_echo) *config_echo = cfg;
  const std::uint64_t count = read_u64(in, path);
  ParamStore params;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t name_len = read_u64(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(name_len));
    const std::uint64_t rows = read_u64(in, path);
    const std::uint64_t cols = read_u64(in, path);
    Matrix& m = params.add(name, static_cast<int>(rows), static_cast<int>(cols));
    for (std::uint64_t r = 0; r < rows; ++r)
      for (std::uint64_t c = 0; c < cols; ++c) {
        double v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
      }
    require(in.good(), errc::format, "truncated checkpoint: " + path);
  }
  return params;
}

TapeParams::TapeParams(ad::Tape& tape, const ParamStore& params,
                       const std::function<bool(const std::string&)>& requires_grad)
    : params_(&params) {
  for (int i = 0; i < params.count(); ++i) {
    const std::string& name = params.name(i);
    vars_[name] = tape.leaf(params.value(i), requires_grad(name));
  }
}

ad::Var TapeParams::at(const std::string& name) const {
  auto it = vars_.find(name);
  require(it != vars_.end(), errc::invalid_argument, "unknown parameter: " + name);
  return it->second;
}

ParamStore TapeParams::grads(ad::Tape& tape) const {
  ParamStore out = params_->zeros_like();
  for (int i = 0; i < params_->count(); ++i) {
    const std::string& name = params_->name(i);
    out.at(name) = tape.grad(vars_.at(name));
  }
  return out;
}

}  // namespace mvsc
