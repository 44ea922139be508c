#include "kerr/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace kerr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Kind { text, number, integer, flag };

struct KeySpec {
  const char* name;
  Kind kind;
  const char* fallback;  // nullptr: required or optional (see group)
  const char* group;     // alternatives share a group; nullptr otherwise
  bool sweepable;
  bool scenario;         // false for sweep-only keys
};

// Schema order is the echo order.
constexpr KeySpec kKeys[] = {
    {"label", Kind::text, "scenario", nullptr, false, true},
    {"level", Kind::text, "full", nullptr, false, true},
    {"g_hz", Kind::number, nullptr, nullptr, true, true},
    {"eta", Kind::number, nullptr, nullptr, true, true},
    {"delta_hz", Kind::number, nullptr, "delta", true, true},
    {"delta_over_g", Kind::number, "10", "delta", true, true},
    {"nu_hz", Kind::number, nullptr, "nu", true, true},
    {"nu_over_delta", Kind::number, "20", "nu", true, true},
    {"omega_c_hz", Kind::number, nullptr, "omega_c", true, true},
    {"omega_c_over_delta", Kind::number, "10", "omega_c", true, true},
    {"kappa_hz", Kind::number, nullptr, "optional", true, true},
    {"gamma_hz", Kind::number, nullptr, "optional", true, true},
    {"phonon_cutoff", Kind::integer, "6", nullptr, true, true},
    {"photon_cutoff", Kind::integer, "2", nullptr, true, true},
    {"t_final_s", Kind::text, "gate", nullptr, true, true},
    {"samples", Kind::integer, "2001", nullptr, true, true},
    {"rel_tol", Kind::number, "1e-9", nullptr, true, true},
    {"abs_tol", Kind::number, "1e-12", nullptr, true, true},
    {"max_step_s", Kind::text, "auto", nullptr, false, true},
    {"initial", Kind::text, "|g,0,1>", nullptr, false, true},
    {"amplitude_columns", Kind::flag, "false", nullptr, false, true},
    {"frame", Kind::text, "lab", nullptr, false, true},
    {"lindblad_method", Kind::text, "propagator", nullptr, false, true},
    {"window_delta_t", Kind::number, "40", nullptr, true, true},
    {"transition_triples", Kind::text, "0,0,1; 0,2,1; 1,1,1", nullptr, false, true},
    {"transition_samples", Kind::integer, "1000", nullptr, false, true},
    {"quad_points_per_period", Kind::integer, "64", nullptr, false, true},
    {"regime_g_over_delta_max", Kind::number, "0.1", nullptr, true, true},
    {"regime_delta_over_nu_max", Kind::number, "0.1", nullptr, true, true},
    {"regime_resonance_margin_min", Kind::number, "0.1", nullptr, true, true},
    {"output_dir", Kind::text, ".", nullptr, false, true},
    {"reduction", Kind::text, "conditional_phase_rad", nullptr, false, false},
    {"max_points", Kind::integer, "10000", nullptr, false, false},
};

const KeySpec* find_key(std::string_view name) {
  for (const auto& k : kKeys)
    if (name == k.name) return &k;
  return nullptr;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(std::string_view(s).substr(
        start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(const std::string& text, const std::string& key, int line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty())
    throw ConfigError("cannot parse '" + text + "' as a number for key '" + key + "'",
                      line);
  if (!std::isfinite(v))
    throw ConfigError("key '" + key + "' must be finite", line);
  return v;
}

int parse_integer(const std::string& text, const std::string& key, int line) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() ||
      v > std::numeric_limits<int>::max() || v < std::numeric_limits<int>::min())
    throw ConfigError("cannot parse '" + text + "' as an integer for key '" + key + "'",
                      line);
  return static_cast<int>(v);
}

bool parse_flag(const std::string& text, const std::string& key, int line) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError("key '" + key + "' expects true or false, got '" + text + "'",
                    line);
}

struct Tokenized {
  ConfigEntries entries;
  std::vector<SweepAxis> axes;
};

Tokenized tokenize(std::string_view text) {
  Tokenized out;
  SweepAxis* section = nullptr;
  std::set<std::string> axis_names;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(raw.substr(0, hash));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header '" + line + "'", line_no);
      const std::string name = trim(line.substr(1, line.size() - 2));
      constexpr std::string_view prefix = "sweep.";
      if (name.rfind(prefix, 0) != 0)
        throw ConfigError("unknown section '" + name + "' (expected [sweep.<param>])",
                          line_no);
      const std::string param = name.substr(prefix.size());
      if (!is_sweepable_key(param))
        throw ConfigError("parameter '" + param + "' cannot be swept", line_no);
      if (!axis_names.insert(param).second)
        throw ConfigError("duplicate sweep axis '" + param + "'", line_no);
      out.axes.push_back({param, {}, line_no});
      section = &out.axes.back();
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (section) {
      if (key != "values")
        throw ConfigError("unknown key '" + key + "' in sweep section (expected 'values')",
                          line_no);
      if (!section->values.empty())
        throw ConfigError("duplicate key 'values' in sweep section", line_no);
      section->line = line_no;
      for (auto& v : split(value, ',')) {
        if (v.empty()) throw ConfigError("empty value in sweep list", line_no);
        section->values.push_back(v);
      }
      continue;
    }
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError("unknown key '" + key + "'", line_no);
    if (out.entries.count(key))
      throw ConfigError("duplicate key '" + key + "' (first set on line " +
                            std::to_string(out.entries[key].line) + ")",
                        line_no);
    if (spec->kind == Kind::number) parse_number(value, key, line_no);
    if (spec->kind == Kind::integer) parse_integer(value, key, line_no);
    if (spec->kind == Kind::flag) parse_flag(value, key, line_no);
    out.entries[key] = {value, line_no};
  }
  for (const auto& a : out.axes)
    if (a.values.empty())
      throw ConfigError("sweep axis '" + a.name + "' has no values", a.line);
  return out;
}

}  // namespace

bool is_sweepable_key(std::string_view key) {
  const KeySpec* k = find_key(key);
  return k && k->sweepable;
}

const std::vector<std::string>& known_reductions() {
  static const std::vector<std::string> names = {
      "conditional_phase_rad", "conditional_phase_error_rad", "process_fidelity",
      "max_excited_population", "worst_basis_excited_population", "t_gate_s",
      "phi00_rad", "phi10_rad", "phi01_rad", "phi11_rad", "min_purity",
      "max_infidelity", "lambda_rad_s", "lambda_hz", "gate_time_s",
      "ld_gate_time_s"};
  return names;
}

std::vector<InitialTerm> parse_initial_state(const std::string& text, int line) {
  std::vector<InitialTerm> terms;
  std::size_t i = 0;
  const auto skip = [&] {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  };
  const auto fail = [&](const std::string& why) -> void {
    throw ConfigError("initial state '" + text + "': " + why, line);
  };
  const auto number_at = [&](std::size_t from, std::size_t to) {
    return parse_number(trim(std::string_view(text).substr(from, to - from)), "initial",
                        line);
  };
  double sign = 1.0;
  skip();
  while (i < text.size()) {
    Complex amp = 1.0;
    if (text[i] == '(') {
      const auto close = text.find(')', i);
      const auto comma = text.find(',', i);
      if (close == std::string::npos || comma == std::string::npos || comma > close)
        fail("complex amplitude must read (re,im)");
      amp = {number_at(i + 1, comma), number_at(comma + 1, close)};
      i = close + 1;
    } else if (text[i] != '|') {
      const auto bar = text.find('|', i);
      if (bar == std::string::npos) fail("missing ket");
      amp = number_at(i, bar);
      i = bar;
    }
    skip();
    if (i >= text.size() || text[i] != '|') fail("expected '|'");
    const auto close = text.find('>', i);
    if (close == std::string::npos) fail("unterminated ket");
    const auto parts = split(text.substr(i + 1, close - i - 1), ',');
    if (parts.size() != 3 || (parts[0] != "g" && parts[0] != "e"))
      fail("ket must read |g,m,n> or |e,m,n>");
    BasisLabel ket{parts[0] == "g" ? IonLevel::ground : IonLevel::excited,
                   parse_integer(parts[1], "initial", line),
                   parse_integer(parts[2], "initial", line)};
    terms.push_back({sign * amp, ket});
    i = close + 1;
    skip();
    if (i >= text.size()) break;
    if (text[i] != '+' && text[i] != '-') fail("terms must be joined by + or -");
    sign = text[i] == '-' ? -1.0 : 1.0;
    ++i;
    skip();
    if (i >= text.size()) fail("dangling operator");
  }
  if (terms.empty()) fail("no terms");
  return terms;
}

PureState ScenarioConfig::initial_state() const {
  const CompositeSpace s = space();
  Vector v = Vector::Zero(s.dim());
  for (const auto& t : initial) {
    if (t.ket.phonon >= s.phonon_cutoff() || t.ket.photon >= s.photon_cutoff() ||
        t.ket.phonon < 0 || t.ket.photon < 0)
      throw ConfigError("initial ket " + to_string(t.ket) + " lies outside the cutoffs",
                        0);
    v(s.index(t.ket)) += t.amplitude;
  }
  PureState psi(s, v);
  if (psi.norm() == 0.0) throw ConfigError("initial state has zero norm", 0);
  psi.normalize();
  return psi;
}

double ScenarioConfig::resolved_t_final() const {
  if (t_final) return *t_final;
  return level == HamiltonianLevel::ld ? ld_gate_time(params) : gate_time(params);
}

EvolutionSpec ScenarioConfig::evolution_spec(double t) const {
  EvolutionSpec spec;
  spec.t_final = t;
  spec.sample_count = samples;
  spec.rel_tol = rel_tol;
  spec.abs_tol = abs_tol;
  if (max_step) spec.max_step = *max_step;
  return spec;
}

ScenarioConfig build_scenario(const ConfigEntries& entries) {
  // Required keys first, all reported together.
  std::string missing;
  for (const char* req : {"g_hz", "eta"})
    if (!entries.count(req)) missing += missing.empty() ? req : std::string(", ") + req;
  if (!missing.empty()) throw ConfigError("missing required keys: " + missing, 0);

  for (const auto& [key, entry] : entries) {
    const KeySpec* spec = find_key(key);
    if (!spec || !spec->scenario)
      throw ConfigError("key '" + key + "' is not valid here", entry.line);
  }

  ScenarioConfig cfg;
  std::map<std::string, std::pair<std::string, int>> resolved;
  std::vector<std::string> order;
  for (const auto& k : kKeys) {
    if (!k.scenario) continue;
    const auto it = entries.find(k.name);
    if (it != entries.end()) {
      resolved[k.name] = {it->second.value, it->second.line};
      order.push_back(k.name);
      continue;
    }
    if (!k.fallback) continue;
    // Alternatives: the default applies only if no sibling was given.
    bool sibling = false;
    if (k.group)
      for (const auto& o : kKeys)
        if (o.group && std::string_view(o.group) == k.group && entries.count(o.name))
          sibling = true;
    if (sibling) continue;
    resolved[k.name] = {k.fallback, 0};
    order.push_back(k.name);
  }
  for (const char* group : {"delta", "nu", "omega_c"}) {
    int given = 0;
    for (const auto& o : kKeys)
      if (o.group && std::string_view(o.group) == group && entries.count(o.name)) ++given;
    if (given > 1)
      throw ConfigError(std::string("conflicting keys for ") + group +
                            ": give exactly one of the alternatives",
                        0);
  }
  for (const auto& name : order)
    cfg.resolved.emplace_back(name, resolved[name].first);

  const auto text = [&](const char* key) { return resolved.at(key).first; };
  const auto line = [&](const char* key) { return resolved.at(key).second; };
  const auto has = [&](const char* key) { return resolved.count(key) > 0; };
  const auto num = [&](const char* key) { return parse_number(text(key), key, line(key)); };
  const auto integer = [&](const char* key) {
    return parse_integer(text(key), key, line(key));
  };

  cfg.label = text("label");
  if (cfg.label.empty() ||
      cfg.label.find_first_of("/\\ \t") != std::string::npos)
    throw ConfigError("label must be non-empty without spaces or slashes", line("label"));
  try {
    cfg.level = parse_level(text("level"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), line("level"));
  }

  // Frequencies: the only Hz -> rad/s conversion.
  PhysicalParams& p = cfg.params;
  p.g = kTwoPi * num("g_hz");
  p.eta = num("eta");
  p.delta = has("delta_hz") ? kTwoPi * num("delta_hz") : num("delta_over_g") * p.g;
  p.nu = has("nu_hz") ? kTwoPi * num("nu_hz") : num("nu_over_delta") * std::abs(p.delta);
  p.omega_c = has("omega_c_hz") ? kTwoPi * num("omega_c_hz")
                                : num("omega_c_over_delta") * std::abs(p.delta);
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid physical parameters: ") + e.what(), 0);
  }
  if (has("kappa_hz") || has("gamma_hz")) {
    DissipationParams d;
    if (has("kappa_hz")) d.kappa = kTwoPi * num("kappa_hz");
    if (has("gamma_hz")) d.gamma = kTwoPi * num("gamma_hz");
    if (d.kappa < 0.0 || d.gamma < 0.0)
      throw ConfigError("decay rates must be >= 0", 0);
    cfg.dissipation = d;
  }

  cfg.phonon_cutoff = integer("phonon_cutoff");
  cfg.photon_cutoff = integer("photon_cutoff");
  if (cfg.phonon_cutoff < 1 || cfg.photon_cutoff < 1)
    throw ConfigError("cutoffs must be >= 1", 0);
  if (text("t_final_s") != "gate") {
    cfg.t_final = num("t_final_s");
    if (!(*cfg.t_final > 0.0))
      throw ConfigError("t_final_s must be > 0", line("t_final_s"));
  }
  cfg.samples = integer("samples");
  if (cfg.samples < 2) throw ConfigError("samples must be >= 2", line("samples"));
  cfg.rel_tol = num("rel_tol");
  cfg.abs_tol = num("abs_tol");
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
    throw ConfigError("tolerances must be > 0", 0);
  if (text("max_step_s") != "auto") {
    cfg.max_step = num("max_step_s");
    if (!(*cfg.max_step > 0.0))
      throw ConfigError("max_step_s must be > 0", line("max_step_s"));
  }
  cfg.initial = parse_initial_state(text("initial"), line("initial"));
  cfg.amplitude_columns = parse_flag(text("amplitude_columns"), "amplitude_columns",
                                     line("amplitude_columns"));
  const std::string frame = text("frame");
  if (frame == "lab")
    cfg.frame = Frame::lab;
  else if (frame == "interaction")
    cfg.frame = Frame::interaction;
  else
    throw ConfigError("frame must be lab or interaction", line("frame"));
  const std::string method = text("lindblad_method");
  if (method == "propagator")
    cfg.lindblad_method = LindbladMethod::propagator;
  else if (method == "adaptive")
    cfg.lindblad_method = LindbladMethod::adaptive;
  else
    throw ConfigError("lindblad_method must be propagator or adaptive",
                      line("lindblad_method"));
  cfg.window_delta_t = num("window_delta_t");
  if (!(cfg.window_delta_t > 0.0))
    throw ConfigError("window_delta_t must be > 0", line("window_delta_t"));
  for (const auto& triple : split(text("transition_triples"), ';')) {
    const auto v = split(triple, ',');
    if (v.size() != 3)
      throw ConfigError("transition_triples entries must read m,m',n",
                        line("transition_triples"));
    cfg.transition_triples.push_back(
        {parse_integer(v[0], "transition_triples", line("transition_triples")),
         parse_integer(v[1], "transition_triples", line("transition_triples")),
         parse_integer(v[2], "transition_triples", line("transition_triples"))});
  }
  cfg.transition_samples = integer("transition_samples");
  if (cfg.transition_samples < 2)
    throw ConfigError("transition_samples must be >= 2", line("transition_samples"));
  cfg.quad_points_per_period = integer("quad_points_per_period");
  if (cfg.quad_points_per_period < 2)
    throw ConfigError("quad_points_per_period must be >= 2",
                      line("quad_points_per_period"));
  cfg.thresholds.g_over_delta_max = num("regime_g_over_delta_max");
  cfg.thresholds.delta_over_nu_max = num("regime_delta_over_nu_max");
  cfg.thresholds.resonance_margin_min = num("regime_resonance_margin_min");
  cfg.output_dir = text("output_dir");
  // Output location is not part of the physics echo.
  std::erase_if(cfg.resolved, [](const auto& kv) { return kv.first == "output_dir"; });
  return cfg;
}

std::size_t SweepConfig::point_count() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

ConfigEntries SweepConfig::point_entries(const std::vector<std::size_t>& coords) const {
  ConfigEntries e = base_entries;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const KeySpec* spec = find_key(axes[i].name);
    if (spec && spec->group && std::string_view(spec->group) != "optional")
      for (const auto& o : kKeys)
        if (o.group && std::string_view(o.group) == spec->group) e.erase(o.name);
    e[axes[i].name] = {axes[i].values[coords[i]], axes[i].line};
  }
  return e;
}

ParsedConfig parse_config(std::string_view text) {
  Tokenized tok = tokenize(text);
  if (tok.axes.empty()) {
    for (const char* k : {"reduction", "max_points"})
      if (tok.entries.count(k))
        throw ConfigError(std::string("key '") + k + "' is only valid in a sweep config",
                          tok.entries[k].line);
    return build_scenario(tok.entries);
  }

  SweepConfig sweep;
  sweep.axes = std::move(tok.axes);
  std::string reductions = "conditional_phase_rad";
  int reduction_line = 0;
  if (auto it = tok.entries.find("reduction"); it != tok.entries.end()) {
    reductions = it->second.value;
    reduction_line = it->second.line;
    tok.entries.erase(it);
  }
  for (auto& r : split(reductions, ',')) {
    const auto& known = known_reductions();
    if (std::find(known.begin(), known.end(), r) == known.end())
      throw ConfigError("unknown reduction '" + r + "'", reduction_line);
    sweep.reductions.push_back(r);
  }
  if (auto it = tok.entries.find("max_points"); it != tok.entries.end()) {
    sweep.max_points = parse_integer(it->second.value, "max_points", it->second.line);
    if (sweep.max_points < 1)
      throw ConfigError("max_points must be >= 1", it->second.line);
    tok.entries.erase(it);
  }
  // Each axis value must itself be valid for its key.
  for (const auto& a : sweep.axes)
    for (const auto& v : a.values) {
      const KeySpec* k = find_key(a.name);
      if (k->kind == Kind::integer) parse_integer(v, a.name, a.line);
      parse_number(v, a.name, a.line);  // axes are numeric so rows sort by value
    }
  sweep.base_entries = tok.entries;
  // Defaults for the first point validate the base configuration.
  sweep.base = build_scenario(sweep.point_entries(std::vector<std::size_t>(sweep.axes.size(), 0)));
  return sweep;
}

}  // namespace kerr
