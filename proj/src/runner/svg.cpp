#include "mfbo/runner/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "mfbo/errors.hpp"

namespace mfbo::runner {

namespace {

constexpr int kWidth = 840;
constexpr int kHeight = 520;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 170;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

struct LinearScale {
  double lo = 0.0, hi = 1.0;
  double pix_lo = 0.0, pix_hi = 1.0;

  double operator()(double v) const {
    if (hi == lo) return 0.5 * (pix_lo + pix_hi);
    return pix_lo + (v - lo) / (hi - lo) * (pix_hi - pix_lo);
  }
};

std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
    ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return ticks;
}

void open_svg(std::ofstream& out, const std::string& path, const std::string& title) {
  out.open(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";
}

void draw_axes(std::ofstream& out, const LinearScale& xs, const LinearScale& ys,
               const std::string& x_label, const std::string& y_label) {
  const int x0 = kMarginLeft, x1 = kWidth - kMarginRight;
  const int y0 = kHeight - kMarginBottom, y1 = kMarginTop;
  out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
      << "\" stroke=\"black\"/>\n";
  for (double t : nice_ticks(xs.lo, xs.hi)) {
    const double px = xs(t);
    out << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\""
        << y0 + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << px << "\" y=\"" << y0 + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(t) << "</text>\n";
  }
  for (double t : nice_ticks(ys.lo, ys.hi)) {
    const double py = ys(t);
    out << "<line x1=\"" << x0 - 5 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\""
        << py << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << x0 - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
        << "</text>\n"
        << "<line x1=\"" << x0 << "\" y1=\"" << py << "\" x2=\"" << x1 << "\" y2=\"" << py
        << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
  }
  out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << x_label << "</text>\n"
      << "<text x=\"18\" y=\"" << (y0 + y1) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 "
      << (y0 + y1) / 2 << ")\">" << y_label << "</text>\n";
}

}  // namespace

void write_line_plot_svg(const std::string& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<PlotSeries>& series) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      const double band = s.band.empty() ? 0.0 : s.band[i];
      y_lo = std::min(y_lo, s.y[i] - band);
      y_hi = std::max(y_hi, s.y[i] + band);
    }
  }
  if (!(x_hi >= x_lo)) throw std::invalid_argument("write_line_plot_svg: no data");
  if (y_hi == y_lo) {
    y_hi += 1.0;
    y_lo -= 1.0;
  }
  const double pad = 0.04 * (y_hi - y_lo);
  LinearScale xs{x_lo, x_hi, static_cast<double>(kMarginLeft),
                 static_cast<double>(kWidth - kMarginRight)};
  LinearScale ys{y_lo - pad, y_hi + pad, static_cast<double>(kHeight - kMarginBottom),
                 static_cast<double>(kMarginTop)};

  std::ofstream out;
  open_svg(out, path, title);
  draw_axes(out, xs, ys, x_label, y_label);

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    if (!s.band.empty()) {
      out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        out << xs(s.x[i]) << ',' << ys(s.y[i] + s.band[i]) << ' ';
      }
      for (std::size_t i = s.x.size(); i-- > 0;) {
        out << xs(s.x[i]) << ',' << ys(s.y[i] - s.band[i]) << ' ';
      }
      out << "\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << xs(s.x[i]) << ',' << ys(s.y[i]) << ' ';
    }
    out << "\"/>\n";
    const int ly = kMarginTop + 18 * static_cast<int>(si);
    out << "<line x1=\"" << kWidth - kMarginRight + 12 << "\" y1=\"" << ly << "\" x2=\""
        << kWidth - kMarginRight + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << kWidth - kMarginRight + 40 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed for " + path);
}

void write_histogram_svg(const std::string& path, const std::string& title,
                         const Matrix& rows, const std::vector<std::string>& row_labels) {
  if (rows.empty()) throw std::invalid_argument("write_histogram_svg: no data");
  const std::size_t num_groups = rows.rows();
  const std::size_t num_actions = rows.cols();
  double y_hi = 0.0;
  for (std::size_t c = 0; c < num_groups; ++c) {
    for (std::size_t a = 0; a < num_actions; ++a) y_hi = std::max(y_hi, rows(c, a));
  }
  if (y_hi == 0.0) y_hi = 1.0;

  LinearScale xs{0.0, static_cast<double>(num_actions), static_cast<double>(kMarginLeft),
                 static_cast<double>(kWidth - kMarginRight)};
  LinearScale ys{0.0, 1.08 * y_hi, static_cast<double>(kHeight - kMarginBottom),
                 static_cast<double>(kMarginTop)};

  std::ofstream out;
  open_svg(out, path, title);
  draw_axes(out, xs, ys, "action index", "probability");

  const double slot = (xs.pix_hi - xs.pix_lo) / num_actions;
  const double bar = 0.8 * slot / num_groups;
  for (std::size_t c = 0; c < num_groups; ++c) {
    const char* color = kPalette[c % std::size(kPalette)];
    for (std::size_t a = 0; a < num_actions; ++a) {
      const double x = xs(static_cast<double>(a)) + 0.1 * slot + bar * c;
      const double y = ys(rows(c, a));
      const double y0 = ys(0.0);
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar
          << "\" height=\"" << std::max(0.0, y0 - y) << "\" fill=\"" << color
          << "\" fill-opacity=\"0.85\"/>\n";
    }
    const int ly = kMarginTop + 18 * static_cast<int>(c);
    out << "<rect x=\"" << kWidth - kMarginRight + 12 << "\" y=\"" << ly - 9
        << "\" width=\"20\" height=\"12\" fill=\"" << color << "\"/>\n"
        << "<text x=\"" << kWidth - kMarginRight + 40 << "\" y=\"" << ly + 2
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << (c < row_labels.size() ? row_labels[c] : "row " + std::to_string(c))
        << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace mfbo::runner
