#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <vector>

#include "driftlab/csv.hpp"

namespace driftlab::cli {

namespace {

constexpr double W = 720, H = 480;
constexpr double ML = 70, MR = 130, MT = 30, MB = 50;  // margins (legend right)
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf"};

struct Axis {
  double lo = 0, hi = 1;
  double map(double v, double a, double b) const {
    if (hi == lo) return 0.5 * (a + b);
    return a + (v - lo) / (hi - lo) * (b - a);
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

void header(std::ofstream& out) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
      << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
}

void axes(std::ofstream& out, const Axis& x, const Axis& y, bool log_y) {
  out << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
      << H - MB << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\""
      << H - MB << "\" stroke=\"black\"/>\n";
  auto ylab = [&](double v) { return log_y ? "1e" + fmt(v) : fmt(v); };
  out << "<text x=\"" << ML << "\" y=\"" << H - MB + 20 << "\" font-size=\"12\">"
      << fmt(x.lo) << "</text>\n"
      << "<text x=\"" << W - MR - 30 << "\" y=\"" << H - MB + 20 << "\" font-size=\"12\">"
      << fmt(x.hi) << "</text>\n"
      << "<text x=\"6\" y=\"" << H - MB << "\" font-size=\"12\">" << ylab(y.lo)
      << "</text>\n"
      << "<text x=\"6\" y=\"" << MT + 10 << "\" font-size=\"12\">" << ylab(y.hi)
      << "</text>\n";
}

int fail(const std::string& why) {
  std::cerr << "plot error: " << why << "\n";
  return 2;
}

}  // namespace

int emit_svg(const std::string& csv_path, const std::string& out_path,
             const std::string& kind, bool log_y, int value_column) {
  CsvTable t;
  try {
    t = read_csv(csv_path);
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  if (t.rows.empty()) return fail("empty CSV: " + csv_path);

  std::ofstream out(out_path);
  if (!out) return fail("cannot open for write: " + out_path);

  if (kind == "line" || kind == "scatter") {
    const std::size_t cols = t.rows.front().size();
    if (cols < 2) return fail(kind + " plot needs at least 2 columns");
    const std::size_t nseries = kind == "scatter" ? 1 : cols - 1;
    Axis x, y;
    x.lo = x.hi = t.rows.front()[0];
    bool y_init = false;
    for (const auto& r : t.rows) {
      x.lo = std::min(x.lo, r[0]);
      x.hi = std::max(x.hi, r[0]);
      for (std::size_t s = 1; s <= nseries; ++s) {
        double v = r[s];
        if (log_y) {
          if (!(v > 0.0)) return fail("log-y plot requires positive values");
          v = std::log10(v);
        }
        if (!std::isfinite(v)) continue;
        if (!y_init) {
          y.lo = y.hi = v;
          y_init = true;
        }
        y.lo = std::min(y.lo, v);
        y.hi = std::max(y.hi, v);
      }
    }
    if (!y_init) return fail("no finite values to plot");
    header(out);
    axes(out, x, y, log_y);
    for (std::size_t s = 1; s <= nseries; ++s) {
      const char* color = kColors[(s - 1) % 7];
      if (kind == "line") {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
        for (const auto& r : t.rows) {
          double v = r[s];
          if (log_y) v = std::log10(v);
          if (!std::isfinite(v)) continue;
          out << x.map(r[0], ML, W - MR) << "," << y.map(v, H - MB, MT) << " ";
        }
        out << "\"/>\n";
      } else {
        for (const auto& r : t.rows) {
          if (!std::isfinite(r[1])) continue;
          out << "<circle cx=\"" << x.map(r[0], ML, W - MR) << "\" cy=\""
              << y.map(r[1], H - MB, MT) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
      }
      const std::string name = s < t.header.size() ? t.header[s] : "series" + std::to_string(s);
      out << "<text x=\"" << W - MR + 10 << "\" y=\"" << MT + 16.0 * s
          << "\" font-size=\"12\" fill=\"" << color << "\">" << name << "</text>\n";
    }
    out << "</svg>\n";
    return 0;
  }

  if (kind == "heatmap") {
    if (t.rows.front().size() < 3) return fail("heatmap needs at least 3 columns");
    const std::size_t vc = static_cast<std::size_t>(value_column);
    if (vc >= t.rows.front().size()) return fail("heatmap value column out of range");
    std::set<double> xs, ys;
    double vlo = t.rows.front()[vc], vhi = vlo;
    for (const auto& r : t.rows) {
      xs.insert(r[0]);
      ys.insert(r[1]);
      vlo = std::min(vlo, r[vc]);
      vhi = std::max(vhi, r[vc]);
    }
    const double cw = (W - ML - MR) / xs.size();
    const double ch = (H - MT - MB) / ys.size();
    auto index_of = [](const std::set<double>& s, double v) {
      return static_cast<double>(std::distance(s.begin(), s.find(v)));
    };
    header(out);
    for (const auto& r : t.rows) {
      const double f = vhi == vlo ? 0.5 : (r[vc] - vlo) / (vhi - vlo);
      const int red = static_cast<int>(255 * f);
      const int blue = static_cast<int>(255 * (1.0 - f));
      out << "<rect x=\"" << ML + index_of(xs, r[0]) * cw << "\" y=\""
          << H - MB - (index_of(ys, r[1]) + 1) * ch << "\" width=\"" << cw
          << "\" height=\"" << ch << "\" fill=\"rgb(" << red << ",64," << blue
          << ")\"/>\n";
    }
    out << "<text x=\"" << W - MR + 10 << "\" y=\"" << MT + 16 << "\" font-size=\"12\">min "
        << fmt(vlo) << "</text>\n";
    out << "<text x=\"" << W - MR + 10 << "\" y=\"" << MT + 32 << "\" font-size=\"12\">max "
        << fmt(vhi) << "</text>\n";
    out << "</svg>\n";
    return 0;
  }

  return fail("unknown plot kind: " + kind + " (expected line, scatter, or heatmap)");
}

}  // namespace driftlab::cli
