#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace floqscar {

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

/// Comma-separated file with a header row. Numbers use format_double.
class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
  CsvWriter& cell(std::size_t x) { return cell(static_cast<long long>(x)); }
  CsvWriter& cell(bool x) { return cell(static_cast<long long>(x ? 1 : 0)); }
  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(const char* text) { return cell(std::string_view(text)); }
  void end_row();

private:
  void separator();
  std::ofstream out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

/// Minimal CSV reader for files written by CsvWriter (no quoting).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Library version string embedded in manifests.
std::string_view version();

} // namespace floqscar
