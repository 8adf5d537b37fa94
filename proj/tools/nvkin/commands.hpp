#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "nvkin/peak_fit.hpp"
#include "nvkin/spectra.hpp"

namespace nvkin::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitNoRoots = 3,
  kExitNonConvergence = 4,
};

// Transitions whose coupling falls below this are treated as unobservable
// and left out of resonance, sweep and spectrum output.
inline constexpr double kCouplingFloor = 1e-10;

enum class SweepMode { theta, power };

int cmd_resonances(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, SweepMode mode, std::ostream& out, std::ostream& log);

/// Synthetic absorption spectrum at cfg.theta_deg / cfg.intensity_w_per_m2.
Spectrum spectrum_for(const RunConfig& cfg, std::vector<PeakModel>* features = nullptr);
int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& log);

struct FitCommandOptions {
  std::string input_path;
  SpectrumKind kind = SpectrumKind::absorption;
  bool integrate_first = false;
  bool baseline = false;
  int baseline_degree = 1;
  bool equal_amplitude = true;
  // Low threshold keeps weak double-quantum lines; noise is rejected by
  // the prominence test.
  GuessOptions guess{3, 5, 0.02, 0.2e-3};
  FitOptions fit;
  double g_factor = 2.0;
  std::optional<double> reference_area;
  std::optional<double> reference_polarization;
  std::vector<double> couplings;  // per fitted peak; default 1
};

int cmd_fit(const FitCommandOptions& opts, std::ostream& out, std::ostream& log);

int cmd_geometry(const std::vector<double>& rotation_deg, double tilt_deg, std::ostream& out);

}  // namespace nvkin::cli
