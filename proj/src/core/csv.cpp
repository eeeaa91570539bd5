#include "core/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mvsc {

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  require(out.good(), errc::io, "cannot open for writing: " + path);
  char buf[40];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
  require(out.good(), errc::io, "write failed: " + path);
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::io, "cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.c_str();
    while (true) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      require(end != p, errc::format, "bad numeric field in " + path);
      row.push_back(v);
      while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
      if (*end == ',') {
        p = end + 1;
      } else if (*end == '\0') {
        break;
      } else {
        fail(errc::format, "unexpected character in " + path);
      }
    }
    if (!rows.empty())
      require(row.size() == rows.front().size(), errc::format,
              "ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), errc::format, "empty matrix file: " + path);
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
  return m;
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  require(out.good(), errc::io, "cannot open for writing: " + path);
  for (int v : labels) out << v << '\n';
  require(out.good(), errc::io, "write failed: " + path);
}

std::vector<int> read_labels(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::io, "cannot open: " + path);
  std::vector<int> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    char* end = nullptr;
    const long v = std::strtol(line.c_str(), &end, 10);
    require(end != line.c_str(), errc::format, "bad label line in " + path);
    labels.push_back(static_cast<int>(v));
  }
  return labels;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  require(out.good(), errc::io, "cannot open for writing: " + path);
  out << content;
  require(out.good(), errc::io, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::io, "cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mvsc
