#include "nevlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <stdexcept>

namespace nevlab::io {

std::string format_double(double x) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == x || (std::isnan(back) && std::isnan(x))) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& config_hash,
                     std::uint64_t seed, bool with_timestamp) {
  out_.open(path);
  if (!out_) throw std::runtime_error("cannot open output file: " + path.string());
  out_ << "# config=" << config_hash << " seed=" << seed;
  if (with_timestamp) {
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out_ << " written=" << stamp;
  }
  out_ << "\n";
}

void CsvWriter::header(const std::vector<std::string>& names) {
  n_columns_ = names.size();
  for (std::size_t i = 0; i < names.size(); ++i)
    out_ << (i ? "," : "") << names[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != n_columns_)
    throw std::runtime_error("csv row does not match the header width");
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << (i ? "," : "") << format_double(values[i]);
  out_ << "\n";
}

void CsvWriter::row_tagged(const std::string& tag, const std::vector<double>& values) {
  if (values.size() + 1 != n_columns_)
    throw std::runtime_error("csv row does not match the header width");
  out_ << tag;
  for (double v : values) out_ << "," << format_double(v);
  out_ << "\n";
}

void CsvWriter::row_cells(const std::vector<std::string>& cells) {
  if (cells.size() != n_columns_)
    throw std::runtime_error("csv row does not match the header width");
  for (std::size_t i = 0; i < cells.size(); ++i)
    out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
}

namespace {

std::string xml_escape(const std::string& s) {
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

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Ticks {
  std::vector<double> at;
};

Ticks nice_ticks(double lo, double hi) {
  Ticks t;
  const double span = hi - lo;
  if (!(span > 0.0)) {
    t.at = {lo};
    return t;
  }
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  const double first = std::ceil(lo / step) * step;
  for (double v = first; v <= hi + 1e-9 * span; v += step) t.at.push_back(v);
  return t;
}

}  // namespace

void write_svg_plot(const std::filesystem::path& path, const std::vector<Series>& series,
                    const PlotOptions& opts) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  if (!(x_hi >= x_lo)) {
    x_lo = 0.0;
    x_hi = 1.0;
  }
  if (!(y_hi >= y_lo)) {
    y_lo = 0.0;
    y_hi = 1.0;
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) {
    y_lo -= 0.5;
    y_hi += 0.5;
  }
  const double y_pad = 0.06 * (y_hi - y_lo);
  y_lo -= y_pad;
  y_hi += y_pad;

  const double ml = 70, mr = 20, mt = 40, mb = 50;
  const double pw = opts.width - ml - mr, ph = opts.height - mt - mb;
  auto sx = [&](double x) { return ml + pw * (x - x_lo) / (x_hi - x_lo); };
  auto sy = [&](double y) { return mt + ph * (1.0 - (y - y_lo) / (y_hi - y_lo)); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open plot file: " + path.string());
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\""
      << opts.height << "\" viewBox=\"0 0 " << opts.width << " " << opts.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (const auto& [a, b] : opts.shaded_x) {
    const double xa = std::clamp(a, x_lo, x_hi), xb = std::clamp(b, x_lo, x_hi);
    if (xb <= xa) continue;
    out << "<rect x=\"" << num(sx(xa)) << "\" y=\"" << num(mt) << "\" width=\""
        << num(sx(xb) - sx(xa)) << "\" height=\"" << num(ph)
        << "\" fill=\"#d62728\" fill-opacity=\"0.15\"/>\n";
  }

  const Ticks tx = nice_ticks(x_lo, x_hi), ty = nice_ticks(y_lo, y_hi);
  out << "<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
  for (double v : tx.at)
    out << "<line x1=\"" << num(sx(v)) << "\" y1=\"" << num(mt) << "\" x2=\"" << num(sx(v))
        << "\" y2=\"" << num(mt + ph) << "\"/>\n";
  for (double v : ty.at)
    out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(sy(v)) << "\" x2=\"" << num(ml + pw)
        << "\" y2=\"" << num(sy(v)) << "\"/>\n";
  out << "</g>\n";
  out << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
  for (double v : tx.at)
    out << "<text x=\"" << num(sx(v)) << "\" y=\"" << num(mt + ph + 18)
        << "\" text-anchor=\"middle\">" << num(v) << "</text>\n";
  for (double v : ty.at)
    out << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(sy(v) + 4)
        << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
  out << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(opts.height - 12)
      << "\" text-anchor=\"middle\">" << xml_escape(opts.x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << num(mt + ph / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << num(mt + ph / 2) << ")\">"
      << xml_escape(opts.y_label) << "</text>\n";
  out << "<text x=\"" << num(ml + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << xml_escape(opts.title) << "</text>\n";
  out << "</g>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << num(sx(s.x[i])) << "," << num(sy(s.y[i])) << " ";
    }
    out << "\"/>\n";
    const double ly = mt + 16 + 16 * si;
    out << "<line x1=\"" << num(ml + pw - 150) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(ml + pw - 125) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text font-family=\"sans-serif\" font-size=\"12\" x=\"" << num(ml + pw - 120)
        << "\" y=\"" << num(ly + 4) << "\">" << xml_escape(s.label) << "</text>\n";
  }

  out << "</svg>\n";
}

}  // namespace nevlab::io
