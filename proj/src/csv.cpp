#include "kcl/csv.hpp"

#include <charconv>

#include "kcl/error.hpp"

namespace kcl {

namespace {
constexpr const char* kModule = "harness";
}

std::string format_number(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw Error(kModule, "cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != columns_) throw Error(kModule, "row width does not match the header of " + path_.string());
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += format_number(values[i]);
  }
  line += '\n';
  out_ << line;
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw Error(kModule, "write failed for " + path_.string());
}

}  // namespace kcl
