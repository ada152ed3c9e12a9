#include "hybridrl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hybridrl {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string curve_csv(const CoverageCurve& curve) {
  std::ostringstream out;
  out << "episode,mean,lo,hi\n";
  for (std::size_t i = 0; i < curve.mean.size(); ++i)
    out << (i + 1) << ',' << format_double(curve.mean[i]) << ',' << format_double(curve.lo[i])
        << ',' << format_double(curve.hi[i]) << '\n';
  return out.str();
}

std::string trials_csv(const std::vector<std::vector<double>>& per_trial) {
  std::ostringstream out;
  out << "episode";
  for (std::size_t t = 0; t < per_trial.size(); ++t) out << ",trial_" << t;
  out << '\n';
  const std::size_t len = per_trial.empty() ? 0 : per_trial.front().size();
  for (std::size_t i = 0; i < len; ++i) {
    out << (i + 1);
    for (const auto& c : per_trial) out << ',' << format_double(c[i]);
    out << '\n';
  }
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001B3ull;
  }
  return hash;
}

std::string hash_hex(std::string_view bytes) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b"};

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

double clamp_value(double v, double cap) {
  if (std::isnan(v)) return 0.0;
  if (std::isinf(v)) return v > 0 ? cap : -cap;
  return std::clamp(v, -cap, cap);
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

std::string render_svg(const std::vector<SvgSeries>& series, const SvgStyle& style) {
  if (series.empty()) throw std::invalid_argument("render_svg: no series");
  std::size_t len = 0;
  for (const auto& s : series) len = std::max(len, s.mean.size());
  if (len == 0) throw std::invalid_argument("render_svg: empty series");

  double y_min = 0.0, y_max = 1.0;
  bool first = true;
  auto fold = [&](const std::vector<double>& xs) {
    for (double v : xs) {
      const double c = clamp_value(v, style.value_cap);
      if (first) {
        y_min = y_max = c;
        first = false;
      } else {
        y_min = std::min(y_min, c);
        y_max = std::max(y_max, c);
      }
    }
  };
  for (const auto& s : series) {
    fold(s.mean);
    fold(s.lo);
    fold(s.hi);
  }
  if (y_max - y_min < 1e-12) {
    y_max += 1.0;
    y_min -= 1.0;
  }
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  const double left = 64, right = 16, top = 30, bottom = 44;
  const double plot_w = style.width - left - right;
  const double plot_h = style.height - top - bottom;
  auto x_px = [&](std::size_t i) {
    return left + (len == 1 ? 0.5 * plot_w
                            : plot_w * static_cast<double>(i) / static_cast<double>(len - 1));
  };
  auto y_px = [&](double v) {
    const double c = clamp_value(v, style.value_cap);
    return top + plot_h * (1.0 - (c - y_min) / (y_max - y_min));
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\""
      << style.height << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n";
  out << "<rect width=\"" << style.width << "\" height=\"" << style.height
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << px(left + plot_w / 2) << "\" y=\"18\" font-family=\"sans-serif\" "
         "font-size=\"13\" text-anchor=\"middle\">"
      << style.title << "</text>\n";

  // gridlines and tick labels
  const int y_ticks = 5;
  for (int i = 0; i <= y_ticks; ++i) {
    const double v = y_min + (y_max - y_min) * i / y_ticks;
    const double y = y_px(v);
    out << "<line x1=\"" << px(left) << "\" y1=\"" << px(y) << "\" x2=\"" << px(left + plot_w)
        << "\" y2=\"" << px(y) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << px(left - 6) << "\" y=\"" << px(y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << tick_label(v)
        << "</text>\n";
  }
  const int x_ticks = std::min<std::size_t>(6, len);
  for (int i = 0; i < x_ticks; ++i) {
    const std::size_t idx =
        x_ticks == 1 ? 0 : (len - 1) * static_cast<std::size_t>(i) / (x_ticks - 1);
    const double x = x_px(idx);
    out << "<text x=\"" << px(x) << "\" y=\"" << px(top + plot_h + 16)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << (idx + 1)
        << "</text>\n";
  }
  out << "<text x=\"" << px(left + plot_w / 2) << "\" y=\"" << px(style.height - 8)
      << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << style.x_label
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << px(top + plot_h / 2)
      << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << px(top + plot_h / 2) << ")\">" << style.y_label << "</text>\n";
  out << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(plot_w)
      << "\" height=\"" << px(plot_h) << "\" fill=\"none\" stroke=\"#444444\"/>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (!s.lo.empty() && s.lo.size() == s.mean.size() && s.hi.size() == s.mean.size()) {
      out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < s.mean.size(); ++i)
        out << px(x_px(i)) << ',' << px(y_px(s.hi[i])) << ' ';
      for (std::size_t i = s.mean.size(); i-- > 0;)
        out << px(x_px(i)) << ',' << px(y_px(s.lo[i])) << ' ';
      out << "\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.mean.size(); ++i)
      out << px(x_px(i)) << ',' << px(y_px(s.mean[i])) << ' ';
    out << "\"/>\n";
  }

  // legend, top-right corner of the plot area
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
    const double y = top + 14 + 14 * static_cast<double>(k);
    out << "<line x1=\"" << px(left + plot_w - 120) << "\" y1=\"" << px(y) << "\" x2=\""
        << px(left + plot_w - 100) << "\" y2=\"" << px(y) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << px(left + plot_w - 94) << "\" y=\"" << px(y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << series[k].label << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace hybridrl
