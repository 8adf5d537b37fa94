#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "nvkin/constants.hpp"
#include "nvkin/geometry.hpp"
#include "nvkin/kinetics.hpp"
#include "nvkin/spectrum_io.hpp"
#include "parallel.hpp"

namespace nvkin::cli {

namespace {

using constants::deg_to_rad;

std::vector<ResonanceResult> observable_resonances(const RunConfig& cfg, double theta_deg,
                                                   const TransitionSpec& t) {
  auto all = find_resonances(cfg.spin, cfg.mw_frequency_hz, deg_to_rad(theta_deg), t,
                             cfg.field_window);
  std::vector<ResonanceResult> kept;
  for (const auto& r : all) {
    if (r.coupling >= kCouplingFloor) kept.push_back(r);
  }
  return kept;
}

double rounded(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

}  // namespace

int cmd_resonances(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const auto rows = parallel_map<std::string>(
      cfg.theta_grid_deg.size(), resolve_jobs(cfg.jobs), [&](std::size_t i) {
        const double theta = cfg.theta_grid_deg[i];
        std::ostringstream block;
        for (const auto& t : kAllTransitions) {
          for (const auto& r : observable_resonances(cfg, theta, t)) {
            block << format_number(theta) << ',' << t.label() << ',' << format_number(r.field_t)
                  << ',' << format_number(r.coupling) << '\n';
          }
        }
        return block.str();
      });

  out << "theta_deg,transition,field_T,coupling\n";
  bool any = false;
  for (const auto& block : rows) {
    out << block;
    any = any || !block.empty();
  }
  if (!any) {
    log << "warning: no resonances in the field window\n";
    return kExitNoRoots;
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, SweepMode mode, std::ostream& out, std::ostream& log) {
  const auto& grid = mode == SweepMode::theta ? cfg.theta_grid_deg : cfg.intensity_grid_w_per_m2;
  const auto blocks = parallel_map<std::string>(
      grid.size(), resolve_jobs(cfg.jobs), [&](std::size_t i) {
        const double theta = mode == SweepMode::theta ? grid[i] : cfg.theta_deg;
        const double intensity = mode == SweepMode::power ? grid[i] : cfg.intensity_w_per_m2;
        std::ostringstream block;
        const std::string x = format_number(grid[i]);
        try {
          const double beta = pumping_beta(intensity, cfg.rates);
          for (const auto& t : kAllTransitions) {
            for (const auto& r : observable_resonances(cfg, theta, t)) {
              block << x << ',' << t.label() << ',' << format_number(r.field_t) << ',';
              try {
                const auto sol = solve_point(cfg.spin, cfg.rates,
                                             FieldVector{r.field_t, deg_to_rad(theta), 0.0}, beta);
                const double sz = spin_polarization(sol.pumped, t.lower, t.upper);
                const double thermal = spin_polarization(sol.dark, t.lower, t.upper);
                block << format_number(sz) << ',' << format_number(amplification(sz, thermal))
                      << ",ok\n";
              } catch (const std::exception& e) {
                block << "nan,nan,error\n";
                std::ostringstream msg;
                msg << "warning: sweep point " << x << " transition " << t.label()
                    << " failed: " << e.what() << '\n';
                log << msg.str();
              }
            }
          }
        } catch (const std::exception& e) {
          block << x << ",-,nan,nan,nan,error\n";
          log << "warning: sweep point " + x + " failed: " + e.what() + "\n";
        }
        return block.str();
      });

  out << (mode == SweepMode::theta ? "theta_deg" : "intensity_W_per_m2")
      << ",transition,field_T,S_z,amplification,status\n";
  for (const auto& b : blocks) out << b;
  return kExitOk;
}

Spectrum spectrum_for(const RunConfig& cfg, std::vector<PeakModel>* features_out) {
  const double beta = pumping_beta(cfg.intensity_w_per_m2, cfg.rates);
  const double splitting = hyperfine_field_spacing(cfg.spin.hyperfine_par_hz, cfg.spin.g_factor);

  std::vector<PeakModel> features;
  for (const auto& t : kAllTransitions) {
    for (const auto& r : observable_resonances(cfg, cfg.theta_deg, t)) {
      const auto sol = solve_point(cfg.spin, cfg.rates,
                                   FieldVector{r.field_t, deg_to_rad(cfg.theta_deg), 0.0}, beta);
      PeakModel p;
      p.center_t = r.field_t;
      p.fwhm_t = cfg.linewidth_fwhm_t;
      p.amplitude = spin_polarization(sol.pumped, t.lower, t.upper) * r.coupling;
      p.hyperfine_splitting_t = splitting;
      p.n_hyperfine = 3;
      features.push_back(p);
    }
  }
  std::sort(features.begin(), features.end(),
            [](const PeakModel& a, const PeakModel& b) { return a.center_t < b.center_t; });
  if (features_out) *features_out = features;

  std::vector<double> axis;
  if (cfg.spectrum_step_t > 0.0) {
    const double span = cfg.field_window.hi_t - cfg.field_window.lo_t;
    const auto count = static_cast<std::size_t>(std::floor(span / cfg.spectrum_step_t + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) {
      axis.push_back(cfg.field_window.lo_t + cfg.spectrum_step_t * static_cast<double>(k));
    }
  } else if (!features.empty()) {
    const double step = cfg.linewidth_fwhm_t / 8.0;
    auto windows = peak_windows(features, 25.0);
    std::vector<FieldInterval> merged;
    for (const auto& w : windows) {
      if (!merged.empty() && w.lo_t <= merged.back().hi_t) {
        merged.back().hi_t = std::max(merged.back().hi_t, w.hi_t);
      } else {
        merged.push_back(w);
      }
    }
    for (const auto& w : merged) {
      const auto count = static_cast<std::size_t>(std::ceil((w.hi_t - w.lo_t) / step)) + 1;
      for (std::size_t k = 0; k < count; ++k) {
        const double x = w.lo_t + step * static_cast<double>(k);
        if (axis.empty() || x > axis.back()) axis.push_back(x);
      }
    }
  }
  return synthesize(features, axis, SpectrumKind::absorption);
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  std::vector<PeakModel> features;
  const Spectrum s = spectrum_for(cfg, &features);
  for (const auto& f : features) {
    log << "feature at " << format_number(f.center_t) << " T, amplitude "
        << format_number(f.amplitude) << '\n';
  }
  write_spectrum_csv(out, s);
  if (features.empty()) {
    log << "warning: no observable transitions in the field window\n";
    return kExitNoRoots;
  }
  return kExitOk;
}

int cmd_fit(const FitCommandOptions& opts, std::ostream& out, std::ostream& log) {
  Spectrum s;
  try {
    s = read_spectrum_csv_file(opts.input_path, opts.kind);
  } catch (const SpectrumFormatError& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  Spectrum work = s;
  if (work.kind == SpectrumKind::differential && opts.integrate_first) work = integrate(work);
  auto absorption_view = [](const Spectrum& x) {
    return x.kind == SpectrumKind::absorption ? x : integrate(x);
  };

  std::vector<PeakModel> guesses = guess_peaks(absorption_view(work), opts.guess);
  if (opts.baseline && !guesses.empty()) {
    work = baseline_correct(work, peak_windows(guesses), opts.baseline_degree);
    guesses = guess_peaks(absorption_view(work), opts.guess);
  }

  using nlohmann::json;
  json report;
  report["input"] = opts.input_path;
  report["kind"] = to_string(work.kind);
  report["samples"] = work.size();

  FitResult fit;
  if (guesses.empty()) {
    fit.message = "no peaks detected";
  } else {
    fit = fit_multipeak(work, guesses, opts.equal_amplitude, opts.fit);
  }

  json peaks = json::array();
  for (std::size_t i = 0; i < fit.peaks.size(); ++i) {
    const auto& p = fit.peaks[i];
    json jp;
    jp["center_T"] = rounded(p.center_t);
    jp["fwhm_T"] = rounded(p.fwhm_t);
    jp["amplitude"] = rounded(p.amplitude);
    jp["area"] = rounded(p.area());
    jp["n_hyperfine"] = p.n_hyperfine;
    jp["hyperfine_splitting_T"] = rounded(p.hyperfine_splitting_t);
    jp["t2star_s"] = rounded(t2star_from_fwhm(p.fwhm_t, opts.g_factor));
    if (!p.component_amplitudes.empty()) {
      json comps = json::array();
      for (double a : p.component_amplitudes) comps.push_back(rounded(a));
      jp["component_amplitudes"] = comps;
    }
    if (opts.reference_area && opts.reference_polarization) {
      const double c = i < opts.couplings.size() ? opts.couplings[i] : 1.0;
      const auto est = extract_polarization(p.area(), c, *opts.reference_area,
                                            *opts.reference_polarization);
      jp["coupling"] = rounded(c);
      jp["polarization"] = rounded(est.value);
    }
    peaks.push_back(jp);
  }
  report["peaks"] = peaks;
  report["total_area"] = rounded(fit.total_area());
  report["residual_norm"] = rounded(fit.residual_norm);
  report["iterations"] = fit.iterations;
  report["converged"] = fit.converged;
  report["message"] = fit.message;
  out << report.dump(2) << '\n';

  if (!fit.converged) {
    log << "warning: fit did not converge: " << fit.message << '\n';
    return kExitNonConvergence;
  }
  return kExitOk;
}

int cmd_geometry(const std::vector<double>& rotation_deg, double tilt_deg, std::ostream& out) {
  out << "rotation_deg,theta1_deg,theta2_deg,theta3_deg,theta4_deg\n";
  for (double r : rotation_deg) {
    const auto angles = nv_orientation_angles(CrystalMount{deg_to_rad(r), deg_to_rad(tilt_deg)});
    out << format_number(r);
    for (double a : angles) out << ',' << format_number(constants::rad_to_deg(a));
    out << '\n';
  }
  return kExitOk;
}

}  // namespace nvkin::cli
