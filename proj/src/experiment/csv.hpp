#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "wgibbs/error.hpp"

namespace wgibbs::detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Comma-separated, '\n' line endings, header row written on construction.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw_io("cannot write " + path.string());
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  // Leading label followed by numbers.
  template <class Range>
  void numbers(std::string_view label, const Range& values) {
    out_ << label;
    for (double v : values) out_ << ',' << fmt(v);
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw_io("failed writing " + path_.string());
  }

  ~CsvWriter() {
    if (out_.is_open()) out_.close();
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace wgibbs::detail
