#include <CLI11.hpp>

#include <iostream>

#include "dirflow/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dirflow: population-loss training dynamics, bound certification and figure reproduction"};
  app.require_subcommand(1);

  dirflow::CommandOptions opt;
  std::string out = ".";
  std::uint64_t seed = 0;
  double slack = 0.0;
  auto add_common = [&](CLI::App* sub, bool with_slack) {
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "override the random seed");
    if (with_slack) sub->add_option("--slack", slack, "override the certification slack")->check(CLI::NonNegativeNumber);
  };

  std::string config, figure, suite;
  auto* simulate = app.add_subcommand("simulate", "run a configured simulation and certify its bound curves");
  simulate->add_option("config", config, "run config (JSON)")->required();
  add_common(simulate, true);
  auto* reproduce = app.add_subcommand("reproduce", "reproduce a figure: fig1, fig2 or fig3");
  reproduce->add_option("figure", figure, "fig1 | fig2 | fig3")->required();
  add_common(reproduce, true);
  auto* verify = app.add_subcommand("verify", "run a property suite: identities, bounds, gd, relu, appendix");
  verify->add_option("suite", suite, "suite name")->required();
  add_common(verify, false);
  auto* signmap = app.add_subcommand("signmap", "sign map of the norm-growth rate N(w)");
  signmap->add_option("config", config, "sign-map config (JSON)")->required();
  add_common(signmap, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  opt.out = out;
  for (auto* sub : {simulate, reproduce, verify, signmap}) {
    if (sub->parsed() && sub->count("--seed")) opt.seed = seed;
    if (sub->parsed() && sub->get_option_no_throw("--slack") && sub->count("--slack")) opt.slack = slack;
  }

  if (simulate->parsed()) return dirflow::cmd_simulate(config, opt, std::cout);
  if (reproduce->parsed()) return dirflow::cmd_reproduce(figure, opt, std::cout);
  if (verify->parsed()) return dirflow::cmd_verify(suite, opt, std::cout);
  return dirflow::cmd_signmap(config, opt, std::cout);
}
