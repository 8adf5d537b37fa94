#pragma once

// Field-swept ESR spectra: Lorentzian synthesis with hyperfine multiplets,
// cumulative integration and polynomial baseline removal.

#include <stdexcept>
#include <vector>

namespace nvkin {

enum class SpectrumKind { absorption, differential };

const char* to_string(SpectrumKind kind);

struct Spectrum {
  std::vector<double> field_t;  // strictly increasing
  std::vector<double> signal;
  SpectrumKind kind = SpectrumKind::absorption;

  std::size_t size() const { return field_t.size(); }
  /// Throws std::invalid_argument on unequal lengths, a non-increasing axis
  /// or non-finite samples.
  void validate() const;
};

/// A Lorentzian line split into n_hyperfine equally spaced components.
/// `amplitude` is the peak height of each component; when
/// `component_amplitudes` is non-empty it overrides that per component.
struct PeakModel {
  double center_t = 0.0;
  double fwhm_t = 1e-5;
  double amplitude = 1.0;
  double hyperfine_splitting_t = 0.0;
  int n_hyperfine = 1;
  std::vector<double> component_amplitudes;

  void validate() const;
  double component_center(int k) const;
  double component_amplitude(int k) const;
  /// Sum over components of (pi/2) * a * w.
  double area() const;
};

/// a (w/2)^2 / ((x - c)^2 + (w/2)^2)
double lorentzian(double x, double center, double fwhm, double amplitude);
/// d/dx of lorentzian().
double lorentzian_derivative(double x, double center, double fwhm, double amplitude);

double evaluate_peaks(const std::vector<PeakModel>& peaks, double x, SpectrumKind kind);

Spectrum synthesize(const std::vector<PeakModel>& peaks, const std::vector<double>& axis,
                    SpectrumKind kind);

/// Uniform grid [lo, hi] with `count` samples.
std::vector<double> linear_axis(double lo, double hi, std::size_t count);

/// Cumulative trapezoidal integral of a differential spectrum, zero at the
/// first sample.
Spectrum integrate(const Spectrum& s);

struct FieldInterval {
  double lo_t = 0.0;
  double hi_t = 0.0;
  bool contains(double x) const { return x >= lo_t && x <= hi_t; }
};

class InsufficientBaselineError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Least-squares polynomial fitted to the samples outside every window and
/// subtracted from the whole curve. Needs at least 10 off-peak samples.
Spectrum baseline_correct(const Spectrum& s, const std::vector<FieldInterval>& peak_windows,
                          int degree = 1);

/// Field spacing of hyperfine lines for a splitting in Hz (theta = 0 slope).
double hyperfine_field_spacing(double splitting_hz, double g_factor);

/// T2* = 1 / (pi * df), df = fwhm * g mu_B / h.
double t2star_from_fwhm(double fwhm_t, double g_factor);
double fwhm_from_t2star(double t2star_s, double g_factor);

}  // namespace nvkin
