#include "dirflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dirflow/errors.hpp"

namespace dirflow {

namespace {

std::string num(double x) {
  if (!std::isfinite(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << "t_or_n,cos_theta1,cos_theta2,norm1,norm2,loss,N,eta\n";
  for (const auto& r : traj.records) {
    os << num(r.t) << ',' << num(r.cos1) << ',' << num(r.cos2) << ',' << num(r.norm1) << ',' << num(r.norm2) << ','
       << num(r.loss) << ',' << num(r.n) << ',' << num(r.eta) << '\n';
  }
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
}

std::string render_lines(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 55;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  auto tx = [&](double x) { return spec.logx ? std::log10(x) : x; };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (spec.logx && s.x[i] <= 0.0)) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pad = 0.04 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  double pw = W - L - R, ph = H - T - B;
  if (spec.equal_axes) {
    const double sx = pw / (x1 - x0), sy = ph / (y1 - y0);
    const double s = std::min(sx, sy);
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    x0 = cx - 0.5 * pw / s;
    x1 = cx + 0.5 * pw / s;
    y0 = cy - 0.5 * ph / s;
    y1 = cy + 0.5 * ph / s;
  }
  auto px = [&](double x) { return L + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return T + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
     << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    const double X = L + pw * k / 4.0, Y = T + ph - ph * k / 4.0;
    os << "<text x=\"" << X << "\" y=\"" << T + ph + 16 << "\" text-anchor=\"middle\">"
       << short_num(spec.logx ? std::pow(10.0, xv) : xv) << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << Y + 4 << "\" text-anchor=\"end\">" << short_num(yv) << "</text>\n";
  }
  os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << escape(spec.xlabel)
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << T + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << T + ph / 2
     << ")\">" << escape(spec.ylabel) << "</text>\n";
  int legend = 0;
  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
       << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    // Thin very long series to keep files small.
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t stride = std::max<std::size_t>(1, n / 4000);
    for (std::size_t i = 0; i < n; i += stride) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (spec.logx && s.x[i] <= 0.0)) continue;
      os << short_num(px(s.x[i])) << ',' << short_num(py(s.y[i])) << ' ';
    }
    os << "\"/>\n";
    const double ly = T + 14 + 16 * legend++;
    os << "<line x1=\"" << L + pw - 150 << "\" y1=\"" << ly << "\" x2=\"" << L + pw - 128 << "\" y2=\"" << ly
       << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
       << "/>\n";
    os << "<text x=\"" << L + pw - 122 << "\" y=\"" << ly + 4 << "\">" << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string render_sign_grid(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                             const std::vector<double>& xs, const std::vector<double>& ys,
                             const std::vector<double>& values) {
  constexpr double W = 640, H = 480, L = 70, R = 20, T = 40, B = 55;
  const double pw = W - L - R, ph = H - T - B;
  const double cw = pw / std::max<std::size_t>(1, xs.size()), ch = ph / std::max<std::size_t>(1, ys.size());
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\" shape-rendering=\"crispEdges\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
  for (std::size_t iy = 0; iy < ys.size(); ++iy) {
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      const double v = values[iy * xs.size() + ix];
      os << "<rect x=\"" << short_num(L + ix * cw) << "\" y=\"" << short_num(T + ph - (iy + 1) * ch) << "\" width=\""
         << short_num(cw + 0.05) << "\" height=\"" << short_num(ch + 0.05) << "\" fill=\""
         << (v > 0.0 ? "#d62728" : "#1f77b4") << "\"/>\n";
    }
  }
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!xs.empty() && !ys.empty()) {
    for (int k = 0; k <= 4; ++k) {
      const std::size_t ix = (xs.size() - 1) * k / 4, iy = (ys.size() - 1) * k / 4;
      os << "<text x=\"" << L + (ix + 0.5) * cw << "\" y=\"" << T + ph + 16 << "\" text-anchor=\"middle\">"
         << short_num(xs[ix]) << "</text>\n";
      os << "<text x=\"" << L - 6 << "\" y=\"" << T + ph - (iy + 0.5) * ch + 4 << "\" text-anchor=\"end\">"
         << short_num(ys[iy]) << "</text>\n";
    }
  }
  os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << escape(xlabel)
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << T + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << T + ph / 2
     << ")\">" << escape(ylabel) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace dirflow
