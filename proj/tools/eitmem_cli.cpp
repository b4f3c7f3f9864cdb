#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "eitmem/scenario_io.hpp"

namespace {

using namespace eitmem;

struct SimulateArgs {
  std::string preset;
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<double> snapshot_every;
  std::optional<double> dt;
  std::optional<std::size_t> grid_points;
  bool emit_reference = false;
  bool spectral_filter = false;
};

RunConfig load(const std::string& preset, const std::string& config) {
  if (!config.empty()) return load_config_file(config);
  RunConfig c = find_preset(preset).config;
  c.preset = preset;
  return c;
}

int simulate(const SimulateArgs& a) {
  RunConfig c = load(a.preset, a.config);
  if (a.out_dir) c.out_dir = *a.out_dir;
  if (a.snapshot_every) c.snapshot_every = *a.snapshot_every;
  if (a.dt) c.dt = *a.dt;
  if (a.grid_points) c.grid_points = *a.grid_points;
  if (a.emit_reference) c.emit_analytic_reference = true;
  if (a.spectral_filter) c.spectral_filter = true;
  to_scenario(c);

  const RunResult r = run_scenario(c);
  const auto& rep = r.report;
  std::printf("run %s: %zu snapshots written to %s\n", c.name.c_str(),
              r.trajectory.snapshots.size(), c.out_dir.c_str());
  std::printf("  alpha1 fit   %.6g 1/s\n", rep.alpha1_fit.rate);
  std::printf("  storage v_g  %.6g m/s\n", rep.storage_vg);
  std::printf("  distortion   %.6g\n", rep.distortion);
  std::printf("  fidelity     %.6g\n", rep.fidelity);
  if (r.trajectory.guard) {
    std::fprintf(stderr, "physics guard %s: %s\n", to_string(r.trajectory.guard->kind),
                 r.trajectory.guard->message.c_str());
  } else if (r.exit_code == kExitPhysicsGuard) {
    std::fprintf(stderr, "output destroyed: distortion %.6g > %g\n", rep.distortion,
                 kDestroyedThreshold);
  }
  return r.exit_code;
}

int presets() {
  for (const auto& p : preset_catalog()) {
    std::printf("%-7s %s%s\n", p.name.c_str(), p.description.c_str(),
                p.regime_flagged ? "  [regime flag]" : "");
    if (p.regime_flagged) std::printf("        %s\n", p.flag_reason.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dark-state polariton light-storage simulator"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "Run a scenario and write snapshots");
  auto* opt_preset = cmd_sim->add_option("--preset", sim.preset, "Named preset");
  auto* opt_config = cmd_sim->add_option("--config", sim.config, "Config file");
  opt_preset->excludes(opt_config);
  cmd_sim->add_option("--out-dir", sim.out_dir, "Output directory");
  cmd_sim->add_option("--snapshot-every", sim.snapshot_every, "Snapshot interval (s)");
  cmd_sim->add_option("--dt", sim.dt, "Quadrature step (s)");
  cmd_sim->add_option("--grid-points", sim.grid_points, "Spatial grid size (power of two)");
  cmd_sim->add_flag("--emit-analytic-reference", sim.emit_reference,
                    "Also write analytic reference profiles");
  cmd_sim->add_flag("--spectral-filter", sim.spectral_filter, "Apply the 2/3 low-pass mask");

  app.add_subcommand("presets", "List the built-in presets");

  std::string limits_config, limits_preset;
  auto* cmd_limits = app.add_subcommand("limits", "Print regime checks and detuning limits");
  auto* lim_config = cmd_limits->add_option("--config", limits_config, "Config file");
  auto* lim_preset = cmd_limits->add_option("--preset", limits_preset, "Named preset");
  lim_config->excludes(lim_preset);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (cmd_sim->parsed()) {
      if (sim.preset.empty() && sim.config.empty()) {
        std::fprintf(stderr, "error: simulate needs --preset or --config\n");
        return kExitInvalid;
      }
      return simulate(sim);
    }
    if (cmd_limits->parsed()) {
      if (limits_preset.empty() && limits_config.empty()) {
        std::fprintf(stderr, "error: limits needs --config or --preset\n");
        return kExitInvalid;
      }
      std::fputs(format_limits(load(limits_preset, limits_config)).c_str(), stdout);
      return kExitOk;
    }
    return presets();
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.is_physics_guard() ? kExitPhysicsGuard : kExitInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
