#pragma once

#include <string>
#include <vector>

#include "core/common.hpp"

namespace mvsc {

// Plain numeric CSV, no header. Doubles are written with 17 significant
// digits so save/load round-trips are exact.
void write_matrix_csv(const std::string& path, const Matrix& m);
Matrix read_matrix_csv(const std::string& path);

// One integer per line.
void write_labels(const std::string& path, const std::vector<int>& labels);
std::vector<int> read_labels(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace mvsc
