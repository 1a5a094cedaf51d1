// csv.cpp

#include "polariton/csv.hpp"

#include <array>
#include <cstdio>
#include <fstream>

namespace polariton::cli {

std::string csv_number(double value) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.16e", value);
  return buf.data();
}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::invalid_argument("CsvTable: row width does not match header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw OutputError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw OutputError("failed writing " + path.string());
}

}  // namespace polariton::cli
