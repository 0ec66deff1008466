#include "pmelab/runner.hpp"

#include <CLI11.hpp>
#include <iostream>

// Exit codes: 0 all regime-valid checks pass, 1 check failure,
// 2 config error, 3 runtime error.
int main(int argc, char** argv) {
  CLI::App app{"Verification laboratory for degenerate diffusion gradient estimates"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  CLI::App* run = app.add_subcommand("run", "Execute the checks of a config file");
  run->add_option("config", config_path, "Path to a JSON config")->required();
  run->add_option("-o,--output-dir", output_dir,
                  "Output directory (overrides config and " +
                      std::string(pmelab::kOutputDirEnv) + ")");

  CLI::App* list = app.add_subcommand("list-checks", "Print the check catalog");
  CLI::App* ver = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (ver->parsed()) {
      std::cout << pmelab::kVersion << "\n";
      return 0;
    }
    if (list->parsed()) {
      std::cout << pmelab::check_catalog().dump(2) << "\n";
      return 0;
    }
    const pmelab::json config = pmelab::load_config(config_path);
    const pmelab::RunResult res = pmelab::run_config(config, output_dir);
    for (const auto& c : res.report["checks"]) {
      std::cout << c["scenario"].get<std::string>() << " / "
                << c["id"].get<std::string>() << ": "
                << (!c["regime_valid"].get<bool>()
                        ? "regime-invalid (skipped)"
                        : c["pass"].get<bool>() ? "pass" : "FAIL")
                << "\n";
    }
    std::cout << (res.exit_code == 0 ? "overall: pass" : "overall: FAIL")
              << "\n";
    return res.exit_code;
  } catch (const pmelab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
