// csv.hpp: deterministic CSV tables

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace polariton::cli {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scientific notation, 17 significant digits.
std::string csv_number(double value);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  // Throws std::invalid_argument if the width does not match the header.
  void add(std::vector<std::string> row);
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::vector<std::vector<std::string>>& rows() { return rows_; }

  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Creates parent directories; throws OutputError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace polariton::cli
