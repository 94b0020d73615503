#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dirflow/dynamics.hpp"

namespace dirflow {

// Trajectory as CSV with header t_or_n,cos_theta1,cos_theta2,norm1,norm2,loss,N,eta.
// Absent or non-finite fields are left empty.
std::string trajectory_csv(const Trajectory& traj);
void write_text(const std::filesystem::path& path, const std::string& text);

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool logx = false;
  bool equal_axes = false;  // same units on both axes (weight-plane paths)
};

// Self-contained SVG line chart.
std::string render_lines(const PlotSpec& spec, const std::vector<PlotSeries>& series);

// SVG grid of colored cells; values[iy * xs.size() + ix] > 0 draws red, else blue.
std::string render_sign_grid(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                             const std::vector<double>& xs, const std::vector<double>& ys,
                             const std::vector<double>& values);

}  // namespace dirflow
