#include <exception>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "rssd/error.hpp"
#include "rssd/io.hpp"

namespace {

using rssd::ErrorCode;
using namespace rssd::cli;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kImproperSection:
    case ErrorCode::kInvalidSection:
    case ErrorCode::kUnstableSection:
    case ErrorCode::kOutOfBox:
      return kExitInput;
    default:
      return kExitNumeric;
  }
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("plantset", args.plantset, "Plant-set JSON file")->required();
  cmd->add_option("--config", args.config, "Run configuration JSON");
  cmd->add_option("--seed", args.seed, "Random seed (overrides the config)");
  cmd->add_option("--grid", args.grid, "Frequency grid lo:hi:count (rad/s)")
      ->check([](const std::string& spec) -> std::string {
        try {
          rssd::io::parse_grid_spec(spec);
        } catch (const rssd::Error& e) {
          return e.what();
        }
        return {};
      });
  cmd->add_option("--out", args.out, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust simultaneous stabilization and decoupling toolkit"};
  app.require_subcommand(1);

  CommonArgs vgap_args, synth_args, analyze_args, sim_args, verify_args;
  std::filesystem::path analyze_ctrl, sim_ctrl, sim_scenarios, verify_report;

  auto* vgap = app.add_subcommand("vgap", "Pairwise ν-gaps and the central plant");
  add_common(vgap, vgap_args);

  auto* synth = app.add_subcommand("synth", "Compensator and gain synthesis");
  add_common(synth, synth_args);

  auto* analyze = app.add_subcommand("analyze", "Closed-loop curves, spectra and margins");
  add_common(analyze, analyze_args);
  analyze->add_option("--controller", analyze_ctrl,
                      "Controller JSON or synthesis report")->required();

  auto* sim = app.add_subcommand("sim", "Linear closed-loop simulation");
  add_common(sim, sim_args);
  sim->add_option("--controller", sim_ctrl, "Controller JSON or synthesis report")
      ->required();
  sim->add_option("--scenario", sim_scenarios, "Scenario JSON")->required();

  auto* verify = app.add_subcommand("verify", "Re-check a synthesis report");
  add_common(verify, verify_args);
  verify->add_option("--report", verify_report, "Synthesis report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*vgap) return cmd_vgap(vgap_args);
    if (*synth) return cmd_synth(synth_args);
    if (*analyze) return cmd_analyze(analyze_args, analyze_ctrl);
    if (*sim) return cmd_sim(sim_args, sim_ctrl, sim_scenarios);
    if (*verify) return cmd_verify(verify_args, verify_report);
  } catch (const rssd::Error& e) {
    std::cerr << "error (" << rssd::to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
