#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pcap/config.hpp"
#include "pcap/error.hpp"
#include "pcap/pipeline.hpp"

namespace {

struct Flags {
  std::string config, body, q, tgrid, out, formats, field;
  int n = 0;
  double p = 0.0, rfar = 0.0, h = 0.0, grading = 0.0;
  bool no_companion = false, numeric = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration");
  cmd->add_option("--body", f.body, "ball:R, spheroid:a,c or superell:a,c,m");
  cmd->add_option("--n", f.n, "dimension (3 for solves)");
  cmd->add_option("--p", f.p, "p-Laplace exponent, 1 < p < n");
  cmd->add_option("--q", f.q, "comma-separated exponents, e.g. 1.5,2,inf");
  cmd->add_option("--rfar", f.rfar, "outer radius of the mesh");
  cmd->add_option("--h", f.h, "tangential mesh spacing on the body");
  cmd->add_option("--grading", f.grading, "radial step relative to the tangential step");
  cmd->add_option("--tgrid", f.tgrid, "auto, auto:N, log:a,b,N or a comma list");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--format", f.formats, "csv,json");
  cmd->add_option("--field", f.field, "field artifact to load instead of solving");
  cmd->add_flag("--no-companion", f.no_companion, "skip the coarse companion solve");
  cmd->add_flag("--numeric", f.numeric, "identities: sample the loaded field too");
}

pcap::RunConfig build_config(CLI::App* cmd, const Flags& f) {
  pcap::RunConfig cfg = f.config.empty() ? pcap::RunConfig{} : pcap::load_config(f.config);
  auto given = [&](const char* name) { return cmd->count(name) > 0; };
  if (given("--body")) cfg.body = f.body;
  if (given("--n")) cfg.n = f.n;
  if (given("--p")) cfg.p = f.p;
  if (given("--q")) cfg.q = pcap::parse_q_list(f.q);
  if (given("--rfar")) cfg.mesh.r_far = f.rfar;
  if (given("--h")) cfg.mesh.target_h = f.h;
  if (given("--grading")) cfg.mesh.grading = f.grading;
  if (given("--tgrid")) cfg.tgrid = f.tgrid;
  if (given("--out")) cfg.out = f.out;
  if (given("--format")) cfg.formats = pcap::parse_formats(f.formats);
  if (given("--field")) cfg.field = f.field;
  if (f.no_companion) cfg.companion = false;
  if (f.numeric) cfg.numeric = true;
  pcap::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-capacitary potentials of convex bodies: solve, sweep level-set quantities, check inequalities"};
  // -h would clash with the mesh spacing flag --h
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", pcap::tool_version());
  Flags flags;
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const pcap::RunConfig&);
  };
  const Command commands[] = {
      {"solve", "solve and write the field artifact", pcap::cmd_solve},
      {"sweep", "level-set profiles of V_q and V_inf", pcap::cmd_sweep},
      {"check", "evaluate the inequality suite", pcap::cmd_check},
      {"identities", "residuals of the pointwise identities", pcap::cmd_identities},
      {"capacity", "capacity from the three estimators", pcap::cmd_capacity},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, flags);
    subs.emplace_back(sub, &c);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pcap::kExitConfig;
  }
  try {
    for (const auto& [sub, cmd] : subs) {
      if (sub->parsed()) return cmd->run(build_config(sub, flags));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pcap::exit_code_for(e);
  }
  return pcap::kExitFailure;
}
