#ifndef KERR_SCENARIO_HPP
#define KERR_SCENARIO_HPP

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "kerr/config.hpp"

namespace kerr {

enum class Command { simulate, gate, validate, sweep };
/// Throws std::invalid_argument for unknown names.
Command parse_command(const std::string& name);
std::string to_string(Command c);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int regime = 1;
inline constexpr int numerical = 2;
inline constexpr int usage = 64;
}  // namespace exit_code

struct RunOptions {
  std::string out_dir;  // empty: the config's output_dir
  bool strict_regime = false;
  int threads = 1;
  std::ostream* log = nullptr;  // progress lines, if set
};

struct OutputFile {
  std::string name;  // relative to the output directory
  std::string content;
};

struct RunResult {
  int exit_code = exit_code::ok;
  std::string message;
  std::vector<OutputFile> files;
};

/// Runs one scenario and returns the rendered outputs without touching disk.
RunResult run_scenario(Command command, const ScenarioConfig& cfg,
                       const RunOptions& options = {});
RunResult run_sweep(const SweepConfig& cfg, const RunOptions& options = {});

/// Parses `config_text`, dispatches, and maps errors to exit codes. A sweep
/// config is only accepted by Command::sweep and vice versa.
RunResult run_config(Command command, std::string_view config_text,
                     const RunOptions& options = {});

/// Writes every output file into `dir`, creating it if needed.
void write_outputs(const RunResult& result, const std::string& dir);

/// The `# config: ` lines of a rendered output, joined back into a config.
std::string extract_echoed_config(std::string_view output);

}  // namespace kerr

#endif  // KERR_SCENARIO_HPP
