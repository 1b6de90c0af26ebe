#pragma once

// Deterministic run artifacts: CSV tables with declared headers, the
// versioned JSON report, and gnuplot-compatible plot scripts.  Floating
// point is printed with %.17g everywhere, so identical runs produce byte
// identical files.

#include <string>
#include <vector>

#include "itp/bm_pipeline.hpp"

namespace itp::report {

inline constexpr const char* kSchema = "itp-report/1";

std::string fmt(double v);

// column-checked CSV assembly, '\n' line endings
class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  const std::string& text() const { return text_; }

 private:
  std::size_t cols_;
  std::string text_;
};

std::string decomposition_to_json(const bm::DecompositionReport& rep);

// residual curve plot over a tail CSV written by the decompose run
std::string residual_plot_script(const std::string& csv_name);

void write_file(const std::string& path, const std::string& content);

}  // namespace itp::report
