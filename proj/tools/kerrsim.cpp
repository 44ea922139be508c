#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "kerr/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Trapped-ion cavity cross-Kerr gate simulator"};
  app.require_subcommand(1, 1);

  std::string config_path;
  kerr::RunOptions options;
  for (const char* name : {"simulate", "gate", "validate", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "scenario config file")->required();
    sub->add_option("--out", options.out_dir, "output directory (default: output_dir key)");
    sub->add_flag("--strict-regime", options.strict_regime,
                  "exit 1 when a validity condition fails");
    sub->add_option("--threads", options.threads, "sweep worker threads")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kerr::exit_code::usage;
  }

  const kerr::Command command = kerr::parse_command(app.get_subcommands().front()->get_name());
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot read config " << config_path << "\n";
    return kerr::exit_code::usage;
  }
  std::stringstream text;
  text << in.rdbuf();

  options.log = &std::cerr;
  const kerr::RunResult result = kerr::run_config(command, text.str(), options);
  if (!result.files.empty()) {
    std::string dir = options.out_dir;
    if (dir.empty()) {
      // Fall back to the config's output_dir.
      try {
        const auto parsed = kerr::parse_config(text.str());
        dir = std::holds_alternative<kerr::SweepConfig>(parsed)
                  ? std::get<kerr::SweepConfig>(parsed).base.output_dir
                  : std::get<kerr::ScenarioConfig>(parsed).output_dir;
      } catch (const kerr::ConfigError&) {
        dir = ".";
      }
    }
    try {
      kerr::write_outputs(result, dir);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return kerr::exit_code::numerical;
    }
    for (const auto& f : result.files) std::cout << dir << "/" << f.name << "\n";
  }
  (result.exit_code == 0 ? std::cout : std::cerr) << result.message << "\n";
  return result.exit_code;
}
