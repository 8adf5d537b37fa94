#pragma once

// Multipeak Lorentzian least-squares fitting and polarization extraction from
// fitted line areas.

#include <string>
#include <vector>

#include "nvkin/spectra.hpp"

namespace nvkin {

struct FitOptions {
  int max_iterations = 200;
  // Largest |cos| between the residual and any Jacobian column.
  double gradient_tolerance = 1e-10;
  // Largest relative parameter change of an accepted step.
  double step_tolerance = 1e-12;
  // Fit the hyperfine splitting of multiplets; otherwise held at the guess.
  bool fit_splitting = true;
};

struct FitResult {
  std::vector<PeakModel> peaks;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;

  double total_area() const;
};

/// Damped Gauss-Newton (Levenberg-Marquardt) fit of `initial` to `s`. With
/// equal_amplitude every multiplet shares one amplitude; otherwise each
/// component has its own. Non-convergence is reported in the result with the
/// best parameters found, not thrown.
FitResult fit_multipeak(const Spectrum& s, const std::vector<PeakModel>& initial,
                        bool equal_amplitude, const FitOptions& opts = {});

struct GuessOptions {
  int n_hyperfine = 1;
  int smoothing_window = 5;
  double threshold_fraction = 0.1;
  // Extrema closer than this are grouped into one multiplet.
  double cluster_gap_t = 0.2e-3;
  // Minimum prominence in units of the smoothed-curve noise level, which is
  // estimated from the spread of sample-to-sample differences.
  double noise_prominence = 6.0;
};

/// Initial peaks from local extrema of the moving-average-smoothed curve,
/// fwhm seeded at three local sample spacings. An extremum must reach
/// threshold_fraction of the largest |value| and rise above the deeper of its
/// two flanking saddles by both that fraction and noise_prominence noise
/// levels. Absorption spectra only.
std::vector<PeakModel> guess_peaks(const Spectrum& s, const GuessOptions& opts = {});

/// Exclusion windows spanning each multiplet plus `pad_fwhm` linewidths.
std::vector<FieldInterval> peak_windows(const std::vector<PeakModel>& peaks,
                                        double pad_fwhm = 10.0);

struct PolarizationEstimate {
  double value = 0.0;
  double area = 0.0;
  double coupling = 1.0;
  double reference_area = 1.0;
  double reference_polarization = 0.0;
};

/// S_z = (A / C) * (S_ref / A_ref).
PolarizationEstimate extract_polarization(double area, double coupling, double ref_area,
                                          double ref_pol);

}  // namespace nvkin
