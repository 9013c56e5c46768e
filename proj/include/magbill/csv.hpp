#pragma once

// Deterministic text artifacts: fixed column order, 17 significant digits,
// LF line endings, atomic replace via temp file + rename.

#include <string>
#include <vector>

namespace magbill {

std::string fmt17(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void add_row(std::vector<std::string> row);
};

void emit_csv(const CsvTable& table, const std::string& path);
void emit_text(const std::string& text, const std::string& path);

}  // namespace magbill
