#include "hbc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hbc/errors.hpp"
#include "hbc/stats.hpp"

namespace hbc {

namespace {

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v, int digits = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// White to dark blue.
std::string shade(double v) {
  v = std::clamp(v, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255 - 230 * v));
  const int g = static_cast<int>(std::lround(255 - 180 * v));
  const int b = static_cast<int>(std::lround(255 - 90 * v));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string render_confusion_svg(const EvalReport& r) {
  const std::size_t k = r.class_names.size();
  if (r.pooled.size() != k) throw SchemaError("report confusion matrix does not match its class list");
  const int cell = 44;
  const int left = 150;
  const int top = 150;
  const int w = left + cell * static_cast<int>(k) + 20;
  const int h = top + cell * static_cast<int>(k) + 60;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<text x=\"10\" y=\"20\" font-size=\"14\">" << esc(r.title.empty() ? r.scheme : r.title) << " | macro F "
    << fmt(r.pooled_macro_f(), 3) << " | accuracy " << fmt(accuracy(r.pooled), 3) << "</text>\n";
  for (std::size_t i = 0; i < k; ++i) {
    const int y = top + cell * static_cast<int>(i);
    const int x = left + cell * static_cast<int>(i);
    s << "<text x=\"" << left - 6 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"end\">"
      << esc(r.class_names[i]) << "</text>\n";
    s << "<text transform=\"translate(" << x + cell / 2 + 4 << "," << top - 6
      << ") rotate(-60)\">" << esc(r.class_names[i]) << "</text>\n";
  }
  for (std::size_t i = 0; i < k; ++i) {
    double row = 0.0;
    for (std::size_t v : r.pooled[i]) row += static_cast<double>(v);
    for (std::size_t j = 0; j < k; ++j) {
      const double frac = row > 0.0 ? static_cast<double>(r.pooled[i][j]) / row : 0.0;
      const int x = left + cell * static_cast<int>(j);
      const int y = top + cell * static_cast<int>(i);
      s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
        << shade(frac) << "\" stroke=\"#999\"/>";
      s << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"middle\" fill=\""
        << (frac > 0.55 ? "#fff" : "#000") << "\">" << fmt(frac) << "</text>\n";
    }
  }
  s << "<text x=\"" << left << "\" y=\"" << h - 20 << "\">rows: true class, columns: predicted (row-normalized)</text>\n";
  s << "</svg>\n";
  return s.str();
}

std::string render_count_box_svg(const nlohmann::json& report) {
  static const std::array<std::pair<const char*, const char*>, 5> kSources = {
      {{"cap", "HBC"}, {"acc", "Acc"}, {"gyro", "Gyro"}, {"imu", "IMU fused"}, {"cap+imu", "All fused"}}};
  std::vector<std::vector<double>> acc(kSources.size());
  try {
    for (const auto& seg : report.at("segments"))
      for (std::size_t i = 0; i < kSources.size(); ++i)
        acc[i].push_back(seg.at("accuracy").at(kSources[i].first).get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed count report: ") + e.what());
  }
  if (acc[0].empty()) throw SchemaError("count report has no segments");

  double lo = 0.0;
  for (const auto& v : acc) lo = std::min(lo, stats::min(v));
  lo = std::floor(lo * 10.0) / 10.0;
  const double hi = 1.0;
  const int left = 60, top = 40, plot_h = 300, col = 90;
  const int w = left + col * static_cast<int>(kSources.size()) + 20;
  const int h = top + plot_h + 50;
  auto ypos = [&](double v) { return top + plot_h - (v - lo) / (hi - lo) * plot_h; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<text x=\"10\" y=\"20\" font-size=\"14\">Counting accuracy per source (" << acc[0].size()
    << " segments)</text>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = lo + (hi - lo) * t / 5.0;
    s << "<line x1=\"" << left << "\" x2=\"" << w - 10 << "\" y1=\"" << ypos(v) << "\" y2=\"" << ypos(v)
      << "\" stroke=\"#ddd\"/><text x=\"" << left - 6 << "\" y=\"" << ypos(v) + 4 << "\" text-anchor=\"end\">"
      << fmt(v) << "</text>\n";
  }
  for (std::size_t i = 0; i < kSources.size(); ++i) {
    const auto& v = acc[i];
    const double q1 = stats::quantile(v, 0.25), med = stats::median(v), q3 = stats::quantile(v, 0.75);
    const double mn = stats::min(v), mx = stats::max(v), mean = stats::mean(v);
    const double cx = left + col * (static_cast<double>(i) + 0.5);
    s << "<line x1=\"" << cx << "\" x2=\"" << cx << "\" y1=\"" << ypos(mn) << "\" y2=\"" << ypos(mx)
      << "\" stroke=\"#333\"/>";
    s << "<rect x=\"" << cx - 20 << "\" y=\"" << ypos(q3) << "\" width=\"40\" height=\""
      << std::max(1.0, ypos(q1) - ypos(q3)) << "\" fill=\"#9ecae1\" stroke=\"#333\"/>";
    s << "<line x1=\"" << cx - 20 << "\" x2=\"" << cx + 20 << "\" y1=\"" << ypos(med) << "\" y2=\"" << ypos(med)
      << "\" stroke=\"#08306b\" stroke-width=\"2\"/>";
    s << "<circle cx=\"" << cx << "\" cy=\"" << ypos(mean) << "\" r=\"3\" fill=\"#e6550d\"/>";
    s << "<text x=\"" << cx << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">" << kSources[i].second
      << "</text><text x=\"" << cx << "\" y=\"" << top + plot_h + 32 << "\" text-anchor=\"middle\">" << fmt(mean, 3)
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace hbc
