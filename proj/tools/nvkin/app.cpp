#include "app.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"

namespace nvkin::cli {

namespace {

struct Overrides {
  std::string config_path;
  std::optional<int> jobs;
  std::optional<std::string> output;
  std::optional<double> mw_frequency_hz;
  std::vector<double> window_t;
  std::optional<double> temperature_k;
  std::optional<double> t1_s;
  std::optional<double> t1_dq_s;
  std::optional<double> theta_deg;
  std::optional<double> intensity_w_per_m2;
  std::optional<std::string> theta_grid;
  std::optional<std::string> intensity_grid;
  std::optional<double> linewidth_t;
  std::optional<double> spectrum_step_t;
};

RunConfig resolve_config(const Overrides& o) {
  std::string path = o.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("NVKIN_CONFIG"); env && *env) path = env;
  }
  RunConfig cfg = path.empty() ? RunConfig{} : load_config_file(path);

  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.output) cfg.output_path = *o.output;
  if (o.mw_frequency_hz) cfg.mw_frequency_hz = *o.mw_frequency_hz;
  if (!o.window_t.empty()) cfg.field_window = {o.window_t[0], o.window_t[1]};
  if (o.temperature_k) cfg.spin.temperature_k = *o.temperature_k;
  if (o.t1_s) cfg.rates.t1_s = *o.t1_s;
  if (o.t1_dq_s) cfg.rates.t1_dq_s = *o.t1_dq_s;
  if (o.theta_deg) cfg.theta_deg = *o.theta_deg;
  if (o.intensity_w_per_m2) cfg.intensity_w_per_m2 = *o.intensity_w_per_m2;
  if (o.theta_grid) cfg.theta_grid_deg = parse_grid(*o.theta_grid);
  if (o.intensity_grid) cfg.intensity_grid_w_per_m2 = parse_grid(*o.intensity_grid);
  if (o.linewidth_t) cfg.linewidth_fwhm_t = *o.linewidth_t;
  if (o.spectrum_step_t) cfg.spectrum_step_t = *o.spectrum_step_t;
  cfg.validate();
  return cfg;
}

// Runs `body` against stdout or the --output file.
template <class Body>
int with_output(const std::string& path, std::ostream& out, std::ostream& err, const Body& body) {
  if (path.empty()) return body(out);
  std::ofstream file(path);
  if (!file) {
    err << "error: cannot open output file " << path << '\n';
    return kExitFailure;
  }
  const int rc = body(file);
  file.flush();
  if (!file) {
    err << "error: failed writing " << path << '\n';
    return kExitFailure;
  }
  return rc;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"NV-center spin kinetics and ESR spectrum tool"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config_path, "JSON config file (fallback: $NVKIN_CONFIG)");
  app.add_option("--jobs", o.jobs, "worker threads (0 = all processors)");
  app.add_option("-o,--output", o.output, "write data to this file instead of stdout");
  app.add_option("--mw-frequency", o.mw_frequency_hz, "microwave frequency [Hz]");
  app.add_option("--window", o.window_t, "field window lo hi [T]")->expected(2);
  app.add_option("--temperature", o.temperature_k, "lattice temperature [K]");
  app.add_option("--t1", o.t1_s, "ground-state T1 [s]");
  app.add_option("--t1-dq", o.t1_dq_s, "T1 of the ms=-1 <-> ms=+1 channel [s]");
  app.add_option("--theta", o.theta_deg, "field angle for power sweeps and spectra [deg]");
  app.add_option("--intensity", o.intensity_w_per_m2,
                 "laser intensity for theta sweeps and spectra [W/m^2]");
  app.add_option("--theta-grid", o.theta_grid, "start:stop:step or comma list [deg]");
  app.add_option("--intensity-grid", o.intensity_grid, "start:stop:step or comma list [W/m^2]");
  app.add_option("--linewidth", o.linewidth_t, "spectrum line FWHM [T]");
  app.add_option("--spectrum-step", o.spectrum_step_t,
                 "uniform spectrum step [T]; 0 samples around features only");

  auto* resonances = app.add_subcommand("resonances", "resonant fields and couplings vs theta");

  auto* sweep = app.add_subcommand("sweep", "steady-state polarization vs theta or intensity");
  SweepMode mode = SweepMode::theta;
  const std::map<std::string, SweepMode> modes{{"theta", SweepMode::theta},
                                               {"power", SweepMode::power}};
  sweep->add_option("--mode", mode, "theta | power")
      ->required()
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));

  auto* spectrum = app.add_subcommand("spectrum", "synthetic absorption spectrum");

  auto* fit = app.add_subcommand("fit", "multi-Lorentzian fit of a spectrum CSV");
  FitCommandOptions fo;
  const std::map<std::string, SpectrumKind> kinds{{"absorption", SpectrumKind::absorption},
                                                  {"differential", SpectrumKind::differential}};
  fit->add_option("input", fo.input_path, "two-column CSV (field_T, signal)")->required();
  fit->add_option("--kind", fo.kind, "absorption | differential")
      ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case));
  fit->add_flag("--integrate", fo.integrate_first, "integrate a differential spectrum first");
  fit->add_flag("--baseline", fo.baseline, "subtract a polynomial baseline fitted off-peak");
  fit->add_option("--baseline-degree", fo.baseline_degree, "baseline polynomial degree")
      ->check(CLI::Range(0, 3));
  fit->add_option("--n-hyperfine", fo.guess.n_hyperfine, "components per peak")
      ->check(CLI::Range(1, 9));
  fit->add_option("--threshold", fo.guess.threshold_fraction,
                  "peak detection threshold as a fraction of the largest line")
      ->check(CLI::Range(0.0, 1.0));
  bool free_amplitudes = false;
  fit->add_flag("--free-amplitudes", free_amplitudes, "fit each hyperfine component separately");
  fit->add_option("--max-iterations", fo.fit.max_iterations, "Levenberg-Marquardt iteration cap");
  std::optional<double> ref_area, ref_pol;
  fit->add_option("--reference-area", ref_area, "area of the reference line");
  fit->add_option("--reference-polarization", ref_pol, "polarization of the reference line");
  std::vector<double> couplings;
  fit->add_option("--couplings", couplings, "per-peak MW coupling, in field order")
      ->delimiter(',');

  auto* geometry = app.add_subcommand("geometry", "NV axis angles vs plate rotation");
  std::string rotation_grid = "0:180:1";
  double tilt_deg = 45.0;
  geometry->add_option("--rotation-grid", rotation_grid, "start:stop:step or comma list [deg]");
  geometry->add_option("--tilt", tilt_deg, "mount tilt of the rotation axis [deg]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*geometry) {
      const auto grid = parse_grid(rotation_grid);
      return with_output(o.output.value_or(""), out, err,
                         [&](std::ostream& s) { return cmd_geometry(grid, tilt_deg, s); });
    }

    const RunConfig cfg = resolve_config(o);
    if (*resonances) {
      return with_output(cfg.output_path, out, err,
                         [&](std::ostream& s) { return cmd_resonances(cfg, s, err); });
    }
    if (*sweep) {
      return with_output(cfg.output_path, out, err,
                         [&](std::ostream& s) { return cmd_sweep(cfg, mode, s, err); });
    }
    if (*spectrum) {
      return with_output(cfg.output_path, out, err,
                         [&](std::ostream& s) { return cmd_spectrum(cfg, s, err); });
    }
    if (*fit) {
      fo.equal_amplitude = !free_amplitudes;
      fo.g_factor = cfg.spin.g_factor;
      fo.reference_area = ref_area;
      fo.reference_polarization = ref_pol;
      fo.couplings = couplings;
      if (fo.reference_area.has_value() != fo.reference_polarization.has_value()) {
        err << "error: --reference-area and --reference-polarization go together\n";
        return kExitConfig;
      }
      return with_output(cfg.output_path, out, err,
                         [&](std::ostream& s) { return cmd_fit(fo, s, err); });
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace nvkin::cli
