#ifndef KERR_CONFIG_HPP
#define KERR_CONFIG_HPP

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kerr/dynamics.hpp"
#include "kerr/gate.hpp"
#include "kerr/hamiltonians.hpp"

namespace kerr {

/// Malformed configuration. `line()` is 0 when the problem is not tied to a
/// single line (missing keys, conflicting keys).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

inline constexpr const char* kSchemaVersion = "kerrsim/1";

enum class Frame { lab, interaction };

struct InitialTerm {
  Complex amplitude;
  BasisLabel ket;
};

struct TransitionTriple {
  int m;
  int m_prime;
  int n;
};

/// Raw `key = value` text with the line it came from.
struct ConfigEntry {
  std::string value;
  int line = 0;
};
using ConfigEntries = std::map<std::string, ConfigEntry>;

struct ScenarioConfig {
  std::string label;
  HamiltonianLevel level = HamiltonianLevel::full;
  PhysicalParams params;  // rad/s
  std::optional<DissipationParams> dissipation;
  int phonon_cutoff = 6;
  int photon_cutoff = 2;
  std::optional<double> t_final;  // empty: gate time of the level
  int samples = 2001;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  std::optional<double> max_step;
  std::vector<InitialTerm> initial;
  bool amplitude_columns = false;
  Frame frame = Frame::lab;
  LindbladMethod lindblad_method = LindbladMethod::propagator;
  double window_delta_t = 40.0;
  std::vector<TransitionTriple> transition_triples;
  int transition_samples = 1000;
  int quad_points_per_period = 64;
  RegimeThresholds thresholds;
  std::string output_dir = ".";

  /// Resolved `key = value` pairs (defaults filled) in schema order, used for
  /// the echoed header.
  std::vector<std::pair<std::string, std::string>> resolved;

  CompositeSpace space() const { return {phonon_cutoff, photon_cutoff}; }
  PureState initial_state() const;
  /// t_final if set, otherwise gate_time (ld_gate_time for the ld level).
  double resolved_t_final() const;
  EvolutionSpec evolution_spec(double t_final) const;
};

struct SweepAxis {
  std::string name;
  std::vector<std::string> values;  // verbatim tokens
  int line = 0;
};

struct SweepConfig {
  ScenarioConfig base;
  ConfigEntries base_entries;
  std::vector<SweepAxis> axes;
  std::vector<std::string> reductions;
  long max_points = 10000;

  std::size_t point_count() const;
  /// Entries for point `coords` (one value index per axis).
  ConfigEntries point_entries(const std::vector<std::size_t>& coords) const;
};

using ParsedConfig = std::variant<ScenarioConfig, SweepConfig>;

/// Line-oriented `key = value`, `#` comments, `[sweep.<param>]` sections
/// holding a `values = a, b, c` list. Frequencies are `*_hz` keys in ordinary
/// Hz and are multiplied by 2 pi here, once.
ParsedConfig parse_config(std::string_view text);

/// Builds a scenario from already tokenized entries (used for sweep points).
ScenarioConfig build_scenario(const ConfigEntries& entries);

/// Keys an axis may sweep.
bool is_sweepable_key(std::string_view key);
/// Reduction names a sweep may tabulate.
const std::vector<std::string>& known_reductions();

std::vector<InitialTerm> parse_initial_state(const std::string& text, int line);

}  // namespace kerr

#endif  // KERR_CONFIG_HPP
