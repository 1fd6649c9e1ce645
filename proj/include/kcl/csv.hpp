#ifndef KCL_CSV_HPP_
#define KCL_CSV_HPP_

// Plain CSV output: header row, 17 significant digits, '\n' line endings.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace kcl {

/// %.17g, independent of the global locale.
std::string format_number(double value);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(std::span<const double> values);
  void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }

  /// Flushes and reports write failures.
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace kcl

#endif  // KCL_CSV_HPP_
