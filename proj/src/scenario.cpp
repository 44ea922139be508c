#include "kerr/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <thread>

#include "kerr/csv.hpp"

namespace kerr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Header lines shared by every output file.
std::vector<std::string> header_lines(Command command, const ScenarioConfig& cfg,
                                      bool with_echo = true) {
  std::vector<std::string> out;
  out.push_back(std::string("schema = ") + kSchemaVersion);
  out.push_back("command = " + to_string(command));
  out.push_back("label = " + cfg.label);
  out.push_back("units: time s, angles rad, frequencies as rad/s and Hz");
  const auto freq = [&out](const char* name, double rad_s) {
    out.push_back(std::string(name) + "_rad_s = " + format_double(rad_s) + ", " + name +
                  "_hz = " + format_double(rad_s / kTwoPi));
  };
  const PhysicalParams& p = cfg.params;
  freq("g", p.g);
  freq("delta", p.delta);
  freq("nu", p.nu);
  freq("omega_c", p.omega_c);
  freq("omega_a", p.omega_a());
  if (cfg.dissipation) {
    freq("kappa", cfg.dissipation->kappa);
    freq("gamma", cfg.dissipation->gamma);
  }
  out.push_back("eta = " + format_double(p.eta));
  if (with_echo)
    for (const auto& [k, v] : cfg.resolved) out.push_back("config: " + k + " = " + v);
  return out;
}

std::string render_block(const std::vector<std::string>& header,
                         const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string out;
  for (const auto& h : header) out += "# " + h + "\n";
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::vector<std::pair<std::string, std::string>> regime_fields(const RegimeReport& r) {
  return {
      {"regime_overall", to_string(r.overall())},
      {"regime_g_over_delta", format_double(r.ratio_g_delta)},
      {"regime_dispersive", to_string(r.dispersive)},
      {"regime_delta_over_nu", format_double(r.ratio_delta_nu)},
      {"regime_rwa", to_string(r.rwa)},
      {"regime_nearest_resonance_k", std::to_string(r.nearest_resonance_k)},
      {"regime_resonance_margin", format_double(r.resonance_margin)},
      {"regime_off_resonance", to_string(r.off_resonance)},
      {"regime_failed", r.conditions_with(Verdict::fail)},
      {"regime_warned", r.conditions_with(Verdict::warn)},
  };
}

std::string file_name(const ScenarioConfig& cfg, const char* suffix) {
  return cfg.label + suffix;
}

// simulate -----------------------------------------------------------------

RunResult run_simulate(const ScenarioConfig& cfg) {
  const CompositeSpace s = cfg.space();
  const Operator h = build_hamiltonian(cfg.level, cfg.params, s);
  const double t_final = cfg.resolved_t_final();
  const EvolutionSpec spec = cfg.evolution_spec(t_final);
  const PureState psi0 = cfg.initial_state();
  const std::vector<Operator> ops = {number_op(s, Mode::phonon),
                                     number_op(s, Mode::photon),
                                     excited_projector(s)};
  const Eigen::VectorXd e0 =
      reference_free_hamiltonian(cfg.level, cfg.params, s).matrix.diagonal().real();
  const bool rotate = cfg.frame == Frame::interaction;

  std::vector<std::string> columns = {"t_s",     "n_phonon",      "n_photon",
                                      "p_excited", "norm_or_trace", "purity"};
  const int d = s.dim();
  const bool mixed = cfg.dissipation.has_value();
  if (cfg.amplitude_columns)
    for (int i = 0; i < d; ++i) {
      const BasisLabel b = s.label(i);
      const std::string tag = std::string(b.ion == IonLevel::ground ? "g" : "e") + "_" +
                              std::to_string(b.phonon) + "_" + std::to_string(b.photon);
      if (mixed) {
        columns.push_back("pop_" + tag);
      } else {
        columns.push_back("re_" + tag);
        columns.push_back("im_" + tag);
      }
    }
  CsvTable table(columns);
  for (const auto& line : header_lines(Command::simulate, cfg)) table.add_metadata(line);
  table.add_metadata("frame = " + std::string(rotate ? "interaction" : "lab"));
  table.add_metadata(std::string("state = ") + (mixed ? "density matrix" : "pure"));

  std::vector<double> row;
  if (mixed) {
    const MixedTrajectory traj =
        evolve_lindblad(h, dissipation_channels(s, *cfg.dissipation), MixedState(psi0),
                        spec, cfg.lindblad_method);
    const Eigen::MatrixXd obs = observables(traj, ops);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      const MixedState& rho = traj.states[k];
      row = {traj.times[k], obs(k, 0), obs(k, 1), obs(k, 2), rho.trace().real(),
             rho.purity()};
      if (cfg.amplitude_columns) {
        const Matrix r = rotate ? rotate_to_interaction(e0, rho.matrix, traj.times[k])
                                : rho.matrix;
        for (int i = 0; i < d; ++i) row.push_back(r(i, i).real());
      }
      table.add_row(row);
    }
  } else {
    const PureTrajectory traj = evolve_static(h, psi0, spec);
    const Eigen::MatrixXd obs = observables(traj, ops);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      const Vector& psi = traj.states[k].amplitudes;
      const double n2 = psi.squaredNorm();
      row = {traj.times[k], obs(k, 0), obs(k, 1), obs(k, 2), n2, n2 * n2};
      if (cfg.amplitude_columns) {
        const Vector v = rotate ? rotate_to_interaction(e0, psi, traj.times[k]) : psi;
        for (int i = 0; i < d; ++i) {
          row.push_back(v(i).real());
          row.push_back(v(i).imag());
        }
      }
      table.add_row(row);
    }
  }
  RunResult r;
  r.files.push_back({file_name(cfg, "_trajectory.csv"), table.render()});
  r.message = "wrote " + std::to_string(table.rows()) + " trajectory rows";
  return r;
}

// gate ---------------------------------------------------------------------

GateReport gate_report(const ScenarioConfig& cfg) {
  GateOptions opt;
  opt.sample_count = cfg.samples;
  GateReport rep = simulate_gate(cfg.level, cfg.params, cfg.space(),
                                 cfg.resolved_t_final(), cfg.dissipation, opt);
  rep.label = cfg.label;
  rep.regime = regime_check(cfg.params, cfg.thresholds);
  return rep;
}

std::optional<double> try_number(double (*f)(const PhysicalParams&),
                                 const PhysicalParams& p) {
  try {
    return f(p);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

RunResult run_gate(const ScenarioConfig& cfg) {
  const GateReport rep = gate_report(cfg);
  const PhysicalParams& p = cfg.params;
  const double lambda = kerr_coupling(p);
  const auto t_ideal = try_number(gate_time, p);
  const auto t_ld = try_number(ld_gate_time, p);
  const auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("nan");
  };

  std::vector<std::pair<std::string, std::string>> kv = {
      {"label", rep.label},
      {"level", to_string(rep.level)},
      {"dissipative", rep.dissipative ? "true" : "false"},
      {"t_gate_s", format_double(rep.t_gate)},
      {"conditional_phase_rad", format_double(rep.conditional_phase)},
      {"conditional_phase_error_rad",
       format_double(angular_distance(rep.conditional_phase, std::numbers::pi))},
      {"phi00_rad", format_double(rep.phases.wrapped(0, 0))},
      {"phi10_rad", format_double(rep.phases.wrapped(1, 0))},
      {"phi01_rad", format_double(rep.phases.wrapped(0, 1))},
      {"phi11_rad", format_double(rep.phases.wrapped(1, 1))},
      {"process_fidelity", format_double(rep.process_fidelity)},
      {"max_excited_population", format_double(rep.max_excited_population)},
      {"worst_basis_excited_population",
       format_double(rep.worst_basis_excited_population)},
      {"population_00", format_double(rep.populations[GatePhases::slot(0, 0)])},
      {"population_10", format_double(rep.populations[GatePhases::slot(1, 0)])},
      {"population_01", format_double(rep.populations[GatePhases::slot(0, 1)])},
      {"population_11", format_double(rep.populations[GatePhases::slot(1, 1)])},
      {"min_purity", format_double(rep.min_purity)},
      {"lambda_rad_s", format_double(lambda)},
      {"lambda_hz", format_double(lambda / kTwoPi)},
      {"gate_time_s", opt(t_ideal)},
      {"ld_gate_time_s", opt(t_ld)},
  };
  if (cfg.dissipation && t_ld) {
    kv.push_back({"ld_gate_time_times_kappa_rad", format_double(*t_ld * cfg.dissipation->kappa)});
    kv.push_back({"ld_gate_time_times_kappa_hz",
                  format_double(*t_ld * cfg.dissipation->kappa / kTwoPi)});
  }
  for (auto& f : regime_fields(rep.regime)) kv.push_back(std::move(f));

  const auto header = header_lines(Command::gate, cfg);
  std::vector<std::string> columns;
  std::vector<std::string> cells;
  for (const auto& [k, v] : kv) {
    if (k == "label" || k == "level" || k == "dissipative" ||
        k.rfind("regime_", 0) == 0)
      continue;
    columns.push_back(k);
    cells.push_back(v);
  }
  CsvTable table(columns);
  for (const auto& line : header) table.add_metadata(line);
  table.add_text_row(cells);

  RunResult r;
  r.files.push_back({file_name(cfg, "_gate.txt"), render_block(header, kv)});
  r.files.push_back({file_name(cfg, "_gate.csv"), table.render()});
  r.message = "conditional_phase_rad = " + format_double(rep.conditional_phase);
  return r;
}

// validate ---------------------------------------------------------------

std::vector<std::pair<std::string, PureState>> infidelity_inputs(const ScenarioConfig& cfg) {
  const CompositeSpace s = cfg.space();
  std::vector<std::pair<std::string, PureState>> in;
  for (int n = 0; n < 2; ++n)
    for (int m = 0; m < 2; ++m)
      if (m < s.phonon_cutoff() && n < s.photon_cutoff())
        in.emplace_back("infidelity_g" + std::to_string(m) + std::to_string(n),
                        basis_state(s, IonLevel::ground, m, n));
  in.emplace_back("infidelity_initial", cfg.initial_state());
  return in;
}

EvolutionSpec window_spec(const ScenarioConfig& cfg) {
  return cfg.evolution_spec(cfg.window_delta_t / std::abs(cfg.params.delta));
}

double max_infidelity(const ScenarioConfig& cfg) {
  double worst = 0.0;
  for (const auto& [name, psi] : infidelity_inputs(cfg))
    worst = std::max(worst, effective_vs_full_fidelity(cfg.params, cfg.space(),
                                                       window_spec(cfg), psi,
                                                       cfg.thresholds)
                                .max());
  return worst;
}

RunResult run_validate(const ScenarioConfig& cfg, const RunOptions& options) {
  const RegimeReport regime = regime_check(cfg.params, cfg.thresholds);
  const auto header = header_lines(Command::validate, cfg);
  RunResult r;
  auto kv = regime_fields(regime);
  const bool failed = regime.overall() == Verdict::fail;
  kv.push_back({"infidelity_check", failed ? "skipped (regime fail)" : "run"});
  r.files.push_back({file_name(cfg, "_regime.txt"), render_block(header, kv)});
  if (failed) {
    r.message = "regime check failed: " + regime.conditions_with(Verdict::fail);
    if (options.strict_regime) {
      r.exit_code = exit_code::regime;
      return r;
    }
  }

  if (!failed) {
    const auto inputs = infidelity_inputs(cfg);
    std::vector<InfidelitySeries> series;
    for (const auto& [name, psi] : inputs)
      series.push_back(effective_vs_full_fidelity(cfg.params, cfg.space(),
                                                  window_spec(cfg), psi,
                                                  cfg.thresholds));
    std::vector<std::string> cols = {"t_s", "delta_t"};
    for (const auto& [name, psi] : inputs) cols.push_back(name);
    CsvTable table(cols);
    for (const auto& line : header) table.add_metadata(line);
    double worst = 0.0;
    for (const auto& s : series) worst = std::max(worst, s.max());
    table.add_metadata("max_infidelity = " + format_double(worst));
    for (std::size_t k = 0; k < series[0].times.size(); ++k) {
      std::vector<double> row = {series[0].times[k],
                                 series[0].times[k] * std::abs(cfg.params.delta)};
      for (const auto& s : series) row.push_back(s.infidelity[k]);
      table.add_row(row);
    }
    r.files.push_back({file_name(cfg, "_infidelity.csv"), table.render()});
  }

  CsvTable bound({"m", "m_prime", "n", "t_s", "probability", "envelope", "within_bound"});
  for (const auto& line : header) bound.add_metadata(line);
  const double t_end = cfg.window_delta_t / std::abs(cfg.params.delta);
  std::vector<double> times(cfg.transition_samples);
  for (int k = 0; k < cfg.transition_samples; ++k)
    times[k] = t_end * double(k + 1) / double(cfg.transition_samples);
  int violations = 0;
  for (const auto& tr : cfg.transition_triples) {
    const std::string triple =
        std::to_string(tr.m) + "," + std::to_string(tr.m_prime) + "," + std::to_string(tr.n);
    try {
      const TransitionSeries ts = transition_probability_series(
          cfg.params, cfg.space(), tr.n, tr.m, tr.m_prime, times,
          cfg.quad_points_per_period);
      for (std::size_t k = 0; k < times.size(); ++k) {
        const bool ok = ts.probability[k] <= ts.envelope;
        violations += ok ? 0 : 1;
        bound.add_text_row({std::to_string(tr.m), std::to_string(tr.m_prime),
                            std::to_string(tr.n), format_double(times[k]),
                            format_double(ts.probability[k]), format_double(ts.envelope),
                            ok ? "1" : "0"});
      }
    } catch (const ResonanceError& e) {
      bound.add_metadata("triple " + triple + " rejected: " + e.what());
    }
  }
  bound.add_metadata("bound_violations = " + std::to_string(violations));
  r.files.push_back({file_name(cfg, "_transition.csv"), bound.render()});
  if (r.message.empty())
    r.message = "regime " + to_string(regime.overall()) + ", bound violations " +
                std::to_string(violations);
  return r;
}

// sweep --------------------------------------------------------------------

bool needs_gate(const std::vector<std::string>& reductions) {
  for (const auto& r : reductions)
    if (r != "max_infidelity" && r != "lambda_rad_s" && r != "lambda_hz" &&
        r != "gate_time_s" && r != "ld_gate_time_s")
      return true;
  return false;
}

std::vector<double> reduce(const ScenarioConfig& cfg,
                           const std::vector<std::string>& reductions) {
  std::optional<GateReport> rep;
  if (needs_gate(reductions)) rep = gate_report(cfg);
  const PhysicalParams& p = cfg.params;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> out;
  for (const auto& name : reductions) {
    double v = nan;
    if (name == "conditional_phase_rad") v = rep->conditional_phase;
    else if (name == "conditional_phase_error_rad")
      v = angular_distance(rep->conditional_phase, std::numbers::pi);
    else if (name == "process_fidelity") v = rep->process_fidelity;
    else if (name == "max_excited_population") v = rep->max_excited_population;
    else if (name == "worst_basis_excited_population")
      v = rep->worst_basis_excited_population;
    else if (name == "t_gate_s") v = rep->t_gate;
    else if (name == "phi00_rad") v = rep->phases.wrapped(0, 0);
    else if (name == "phi10_rad") v = rep->phases.wrapped(1, 0);
    else if (name == "phi01_rad") v = rep->phases.wrapped(0, 1);
    else if (name == "phi11_rad") v = rep->phases.wrapped(1, 1);
    else if (name == "min_purity") v = rep->min_purity;
    else if (name == "max_infidelity") v = max_infidelity(cfg);
    else if (name == "lambda_rad_s") v = kerr_coupling(p);
    else if (name == "lambda_hz") v = kerr_coupling(p) / kTwoPi;
    else if (name == "gate_time_s") v = try_number(gate_time, p).value_or(nan);
    else if (name == "ld_gate_time_s") v = try_number(ld_gate_time, p).value_or(nan);
    out.push_back(v);
  }
  return out;
}

std::vector<std::size_t> coordinates(std::size_t index, const SweepConfig& cfg) {
  std::vector<std::size_t> c(cfg.axes.size());
  for (std::size_t i = cfg.axes.size(); i-- > 0;) {
    c[i] = index % cfg.axes[i].values.size();
    index /= cfg.axes[i].values.size();
  }
  return c;
}

double axis_value(const SweepAxis& a, std::size_t k) {
  return std::stod(a.values[k]);
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "simulate") return Command::simulate;
  if (name == "gate") return Command::gate;
  if (name == "validate") return Command::validate;
  if (name == "sweep") return Command::sweep;
  throw std::invalid_argument("unknown command '" + name + "'");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::gate: return "gate";
    case Command::validate: return "validate";
    case Command::sweep: return "sweep";
  }
  return "?";
}

RunResult run_scenario(Command command, const ScenarioConfig& cfg,
                       const RunOptions& options) {
  if (command == Command::sweep)
    throw std::invalid_argument("run_scenario: use run_sweep for sweeps");
  if (options.strict_regime && command != Command::validate) {
    const RegimeReport regime = regime_check(cfg.params, cfg.thresholds);
    if (regime.overall() == Verdict::fail)
      return {exit_code::regime,
              "regime check failed: " + regime.conditions_with(Verdict::fail), {}};
  }
  switch (command) {
    case Command::simulate: return run_simulate(cfg);
    case Command::gate: return run_gate(cfg);
    case Command::validate: return run_validate(cfg, options);
    case Command::sweep: break;
  }
  return {};
}

RunResult run_sweep(const SweepConfig& cfg, const RunOptions& options) {
  const std::size_t total = cfg.point_count();
  if (options.log)
    *options.log << "sweep " << cfg.base.label << ": " << total << " points\n";
  if (total > static_cast<std::size_t>(cfg.max_points))
    throw ConfigError("sweep has " + std::to_string(total) +
                          " points, above max_points = " + std::to_string(cfg.max_points),
                      0);

  std::vector<ScenarioConfig> points;
  points.reserve(total);
  for (std::size_t i = 0; i < total; ++i)
    points.push_back(build_scenario(cfg.point_entries(coordinates(i, cfg))));
  if (options.strict_regime)
    for (std::size_t i = 0; i < total; ++i) {
      const RegimeReport regime = regime_check(points[i].params, points[i].thresholds);
      if (regime.overall() == Verdict::fail)
        return {exit_code::regime,
                "sweep point " + std::to_string(i) + ": regime check failed: " +
                    regime.conditions_with(Verdict::fail),
                {}};
    }

  std::vector<std::vector<double>> results(total);
  std::vector<std::string> errors(total);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        results[i] = reduce(points[i], cfg.reductions);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int threads =
      static_cast<int>(std::clamp<std::size_t>(std::max(options.threads, 1), 1, total));
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < total; ++i)
    if (!errors[i].empty())
      throw IntegrationError("sweep point " + std::to_string(i) + ": " + errors[i], 0.0);

  std::vector<std::size_t> order(total);
  for (std::size_t i = 0; i < total; ++i) order[i] = i;
  std::vector<std::vector<double>> keys(total);
  for (std::size_t i = 0; i < total; ++i) {
    const auto c = coordinates(i, cfg);
    for (std::size_t a = 0; a < cfg.axes.size(); ++a)
      keys[i].push_back(axis_value(cfg.axes[a], c[a]));
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

  std::vector<std::string> columns;
  for (const auto& a : cfg.axes) columns.push_back(a.name);
  for (const auto& r : cfg.reductions) columns.push_back(r);
  CsvTable table(columns);
  for (const auto& line : header_lines(Command::sweep, cfg.base, false))
    table.add_metadata(line);
  table.add_metadata("points = " + std::to_string(total));
  std::string reductions;
  for (const auto& r : cfg.reductions) reductions += (reductions.empty() ? "" : ", ") + r;
  for (const auto& [k, v] : cfg.base.resolved) {
    const bool swept = std::any_of(cfg.axes.begin(), cfg.axes.end(),
                                   [&](const SweepAxis& a) { return a.name == k; });
    if (!swept) table.add_metadata("config: " + k + " = " + v);
  }
  table.add_metadata("config: reduction = " + reductions);
  table.add_metadata("config: max_points = " + std::to_string(cfg.max_points));
  for (const auto& a : cfg.axes) {
    std::string values;
    for (const auto& v : a.values) values += (values.empty() ? "" : ", ") + v;
    table.add_metadata("config: [sweep." + a.name + "]");
    table.add_metadata("config: values = " + values);
  }
  for (std::size_t i : order) {
    std::vector<double> row = keys[i];
    row.insert(row.end(), results[i].begin(), results[i].end());
    table.add_row(row);
  }
  RunResult r;
  r.files.push_back({cfg.base.label + "_sweep.csv", table.render()});
  r.message = "wrote " + std::to_string(total) + " sweep rows";
  return r;
}

RunResult run_config(Command command, std::string_view config_text,
                     const RunOptions& options) {
  ParsedConfig parsed;
  try {
    parsed = parse_config(config_text);
  } catch (const ConfigError& e) {
    return {exit_code::usage, std::string("config error: ") + e.what(), {}};
  }
  const bool is_sweep = std::holds_alternative<SweepConfig>(parsed);
  const std::string label = is_sweep ? std::get<SweepConfig>(parsed).base.label
                                     : std::get<ScenarioConfig>(parsed).label;
  if (is_sweep != (command == Command::sweep))
    return {exit_code::usage,
            "scenario '" + label + "': " +
                (is_sweep ? "config has [sweep.*] sections; use the sweep command"
                          : "sweep command needs at least one [sweep.<param>] section"),
            {}};
  try {
    RunResult r = is_sweep ? run_sweep(std::get<SweepConfig>(parsed), options)
                           : run_scenario(command, std::get<ScenarioConfig>(parsed), options);
    r.message = "scenario '" + label + "': " + r.message;
    return r;
  } catch (const ConfigError& e) {
    return {exit_code::usage, "scenario '" + label + "': config error: " + e.what(), {}};
  } catch (const std::exception& e) {
    return {exit_code::numerical, "scenario '" + label + "': numerical failure: " + e.what(),
            {}};
  }
}

void write_outputs(const RunResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& f : result.files)
    write_file((std::filesystem::path(dir) / f.name).string(), f.content);
}

std::string extract_echoed_config(std::string_view output) {
  constexpr std::string_view prefix = "# config: ";
  std::string out;
  std::size_t pos = 0;
  while (pos < output.size()) {
    auto nl = output.find('\n', pos);
    if (nl == std::string_view::npos) nl = output.size();
    const auto line = output.substr(pos, nl - pos);
    if (line.substr(0, prefix.size()) == prefix) {
      out += line.substr(prefix.size());
      out += '\n';
    }
    pos = nl + 1;
  }
  return out;
}

}  // namespace kerr
