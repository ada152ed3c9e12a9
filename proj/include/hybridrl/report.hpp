#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hybridrl/diagnostics.hpp"

namespace hybridrl {

// Fixed decimal formatting shared by every emitter so re-runs are
// byte-identical. Non-finite values print as inf/-inf/nan.
std::string format_double(double v);

// Aggregated curve: header episode,mean,lo,hi with 1-based episodes.
std::string curve_csv(const CoverageCurve& curve);

// Wide per-trial table: header episode,trial_0,...,trial_{n-1}.
std::string trials_csv(const std::vector<std::vector<double>>& per_trial);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// FNV-1a, used to fingerprint emitted CSVs in the manifest.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::string_view bytes);

struct SvgSeries {
  std::string label;
  std::vector<double> mean;
  std::vector<double> lo;  // may be empty for band-less series
  std::vector<double> hi;
};

struct SvgStyle {
  std::string title;
  std::string x_label = "episode";
  std::string y_label;
  int width = 720;
  int height = 440;
  double value_cap = 1e6;  // infinities are clamped here before plotting
};

// Deterministic line chart with shaded confidence bands and a legend.
std::string render_svg(const std::vector<SvgSeries>& series, const SvgStyle& style);

}  // namespace hybridrl
