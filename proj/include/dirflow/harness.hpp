#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dirflow/bounds.hpp"
#include "dirflow/config.hpp"
#include "dirflow/dynamics.hpp"

namespace dirflow {

// One named invariant outcome. margin is signed: >= 0 means it holds.
struct Check {
  std::string id;
  bool pass = false;
  double margin = 0.0;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;

  bool pass() const;
  void add(Check c) { checks.push_back(std::move(c)); }
  // Passes iff observed <= limit; margin = limit - observed.
  void at_most(const std::string& id, double observed, double limit, const std::string& detail = {});
  void expect(const std::string& id, bool ok, const std::string& detail = {});
};

std::string report_json(const SuiteReport& report);
void write_report(const std::filesystem::path& path, const SuiteReport& report);
// One line per check: PASS/FAIL, id, margin, detail.
void print_report(std::ostream& os, const SuiteReport& report);

Check certification_check(const CertificationReport& rep);

// Runs the simulation a config describes.
Trajectory run_trajectory(const RunConfig& cfg);

// Builds the bound curves a config requests against a finished trajectory,
// resolving anchors, phase switches and validity windows. Throws ConfigError
// when a curve does not fit the model or method, DomainError when the
// trajectory does not meet the curve's hypotheses.
std::vector<BoundCurve> build_curves(const RunConfig& cfg, const Trajectory& traj);

// Certifies each curve; flows get a 1e-9 integrator allowance on top of slack.
SuiteReport certify_all(const std::string& suite, const Trajectory& traj, const std::vector<BoundCurve>& curves,
                        double slack);

// Plots of a trajectory with any curves overlaid.
void write_plots(const std::filesystem::path& dir, const Trajectory& traj, const std::vector<BoundCurve>& curves,
                 const std::string& title);

struct CommandOptions {
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> slack;
};

// Exit codes: 0 pass, 1 failed check or failed run, 2 bad input.
int cmd_simulate(const std::filesystem::path& config, const CommandOptions& opt, std::ostream& log);
int cmd_simulate_text(const std::string& config_text, const CommandOptions& opt, std::ostream& log);
int cmd_reproduce(const std::string& figure, const CommandOptions& opt, std::ostream& log);
int cmd_verify(const std::string& suite, const CommandOptions& opt, std::ostream& log);
int cmd_signmap(const std::filesystem::path& config, const CommandOptions& opt, std::ostream& log);

// Property suites: identities, bounds, gd, relu, appendix. Throws
// ConfigError for an unknown name.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);
const std::vector<std::string>& suite_names();

// Quadrature sign map of N plus an optional Monte Carlo map; writes
// signmap.csv and SVGs under dir.
SuiteReport run_signmap(const SignMapConfig& cfg, const std::filesystem::path& dir);

// Figure reproductions; each writes its artifacts under dir.
SuiteReport reproduce_fig1(const std::filesystem::path& dir, std::uint64_t seed);
SuiteReport reproduce_fig2(const std::filesystem::path& dir, std::uint64_t seed, std::optional<double> slack);
SuiteReport reproduce_fig3(const std::filesystem::path& dir);

}  // namespace dirflow
