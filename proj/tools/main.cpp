// coagflux: run | verify | oracle-compare | sweep
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "coagflux/commands.hpp"
#include "coagflux/config.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  bool strict = false;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output directory (overrides [output] directory)");
  cmd->add_flag("--strict", c.strict, "treat configuration warnings as errors");
}

coagflux::ConfigOverrides parse_sets(const std::vector<std::string>& sets) {
  coagflux::ConfigOverrides overrides;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected section.key=value");
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return overrides;
}

coagflux::LoadedConfig load(const Common& c) {
  auto loaded = coagflux::load_config(c.config, c.strict, parse_sets(c.sets));
  if (!c.out.empty()) loaded.config.output_directory = c.out;
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
  return loaded;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sectional solver for coagulation with a small-size source"};
  app.require_subcommand(1);

  Common run_opts, verify_opts, oracle_opts, sweep_opts;
  unsigned threads = 1;
  std::vector<std::string> axes;

  auto* run_cmd = app.add_subcommand("run", "integrate and write trajectory files");
  add_common(run_cmd, run_opts);
  run_cmd->add_option("--set", run_opts.sets, "override section.key=value");

  auto* verify_cmd = app.add_subcommand("verify", "integrate and check the bounds; exit 1 on failure");
  add_common(verify_cmd, verify_opts);
  verify_cmd->add_option("--set", verify_opts.sets, "override section.key=value");

  auto* oracle_cmd = app.add_subcommand("oracle-compare", "compare with the constant-kernel closed forms");
  add_common(oracle_cmd, oracle_opts);
  oracle_cmd->add_option("--set", oracle_opts.sets, "override section.key=value");

  auto* sweep_cmd = app.add_subcommand("sweep", "verify every point of a parameter grid");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--vary", axes, "section.key=v1,v2,... (repeatable)")->required();
  sweep_cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const auto loaded = load(run_opts);
      return coagflux::cmd_run(loaded.config, loaded.config.output_directory);
    }
    if (*verify_cmd) {
      const auto loaded = load(verify_opts);
      return coagflux::cmd_verify(loaded.config, loaded.config.output_directory, std::cout);
    }
    if (*oracle_cmd) {
      const auto loaded = load(oracle_opts);
      return coagflux::cmd_oracle_compare(loaded.config, loaded.config.output_directory,
                                          std::cout);
    }
    if (*sweep_cmd) {
      std::ifstream in(sweep_opts.config);
      std::stringstream text;
      text << in.rdbuf();
      std::vector<coagflux::SweepAxis> parsed;
      for (const auto& a : axes) parsed.push_back(coagflux::parse_sweep_axis(a));
      // Validate the template once before spawning anything.
      const auto loaded = load(sweep_opts);
      const std::string out = sweep_opts.out.empty() ? loaded.config.output_directory
                                                     : sweep_opts.out;
      return coagflux::cmd_sweep(text.str(), parsed, out, threads, sweep_opts.strict,
                                 std::cout);
    }
  } catch (const coagflux::ConfigError& e) {
    std::cerr << "configuration errors:\n";
    for (const auto& err : e.errors()) std::cerr << "  " << err << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
