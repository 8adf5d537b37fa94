#include "nvkin/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "nvkin/constants.hpp"

namespace nvkin {

const char* to_string(SpectrumKind kind) {
  return kind == SpectrumKind::absorption ? "absorption" : "differential";
}

void Spectrum::validate() const {
  if (field_t.size() != signal.size()) {
    throw std::invalid_argument("spectrum axis and signal lengths differ");
  }
  for (std::size_t i = 0; i < field_t.size(); ++i) {
    if (!std::isfinite(field_t[i]) || !std::isfinite(signal[i])) {
      throw std::invalid_argument("spectrum contains non-finite samples");
    }
    if (i > 0 && !(field_t[i] > field_t[i - 1])) {
      throw std::invalid_argument("spectrum field axis must be strictly increasing");
    }
  }
}

void PeakModel::validate() const {
  if (!(fwhm_t > 0.0)) throw std::invalid_argument("peak fwhm must be positive");
  if (n_hyperfine < 1) throw std::invalid_argument("peak needs at least one component");
  if (!component_amplitudes.empty() &&
      component_amplitudes.size() != static_cast<std::size_t>(n_hyperfine)) {
    throw std::invalid_argument("component amplitude count must equal n_hyperfine");
  }
}

double PeakModel::component_center(int k) const {
  return center_t + (k - 0.5 * (n_hyperfine - 1)) * hyperfine_splitting_t;
}

double PeakModel::component_amplitude(int k) const {
  return component_amplitudes.empty() ? amplitude
                                      : component_amplitudes[static_cast<std::size_t>(k)];
}

double PeakModel::area() const {
  double total = 0.0;
  for (int k = 0; k < n_hyperfine; ++k) {
    total += 0.5 * constants::pi * component_amplitude(k) * fwhm_t;
  }
  return total;
}

double lorentzian(double x, double center, double fwhm, double amplitude) {
  const double hw = 0.5 * fwhm;
  const double d = x - center;
  return amplitude * hw * hw / (d * d + hw * hw);
}

double lorentzian_derivative(double x, double center, double fwhm, double amplitude) {
  const double hw = 0.5 * fwhm;
  const double d = x - center;
  const double q = d * d + hw * hw;
  return -2.0 * amplitude * hw * hw * d / (q * q);
}

double evaluate_peaks(const std::vector<PeakModel>& peaks, double x, SpectrumKind kind) {
  double y = 0.0;
  for (const auto& p : peaks) {
    for (int k = 0; k < p.n_hyperfine; ++k) {
      const double c = p.component_center(k);
      const double a = p.component_amplitude(k);
      y += kind == SpectrumKind::absorption ? lorentzian(x, c, p.fwhm_t, a)
                                            : lorentzian_derivative(x, c, p.fwhm_t, a);
    }
  }
  return y;
}

Spectrum synthesize(const std::vector<PeakModel>& peaks, const std::vector<double>& axis,
                    SpectrumKind kind) {
  for (const auto& p : peaks) p.validate();
  Spectrum s;
  s.kind = kind;
  s.field_t = axis;
  s.signal.resize(axis.size());
  for (std::size_t i = 0; i < axis.size(); ++i) s.signal[i] = evaluate_peaks(peaks, axis[i], kind);
  s.validate();
  return s;
}

std::vector<double> linear_axis(double lo, double hi, std::size_t count) {
  if (count < 2 || !(hi > lo)) throw std::invalid_argument("linear axis needs hi > lo and >= 2 samples");
  std::vector<double> axis(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) axis[i] = lo + step * static_cast<double>(i);
  axis.back() = hi;
  return axis;
}

Spectrum integrate(const Spectrum& s) {
  if (s.kind != SpectrumKind::differential) {
    throw std::invalid_argument("integrate expects a differential spectrum");
  }
  s.validate();
  Spectrum out;
  out.kind = SpectrumKind::absorption;
  out.field_t = s.field_t;
  out.signal.assign(s.size(), 0.0);
  for (std::size_t i = 1; i < s.size(); ++i) {
    out.signal[i] = out.signal[i - 1] +
                    0.5 * (s.signal[i] + s.signal[i - 1]) * (s.field_t[i] - s.field_t[i - 1]);
  }
  return out;
}

Spectrum baseline_correct(const Spectrum& s, const std::vector<FieldInterval>& peak_windows,
                          int degree) {
  s.validate();
  if (degree < 0 || degree > 3) throw std::invalid_argument("baseline degree must be 0..3");

  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < s.size(); ++i) {
    bool inside = false;
    for (const auto& w : peak_windows) inside = inside || w.contains(s.field_t[i]);
    if (!inside) support.push_back(i);
  }
  constexpr std::size_t kMinSupport = 10;
  if (support.size() < kMinSupport || support.size() <= static_cast<std::size_t>(degree)) {
    throw InsufficientBaselineError("only " + std::to_string(support.size()) +
                                    " off-peak samples for the baseline fit");
  }

  // Map the axis onto [-1, 1] to keep the Vandermonde system well scaled.
  const double mid = 0.5 * (s.field_t.front() + s.field_t.back());
  const double half = std::max(0.5 * (s.field_t.back() - s.field_t.front()), 1e-300);
  auto scaled = [&](double x) { return (x - mid) / half; };

  const auto rows = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd v(rows, degree + 1);
  Eigen::VectorXd y(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t i = support[static_cast<std::size_t>(r)];
    double xp = 1.0;
    for (int d = 0; d <= degree; ++d) {
      v(r, d) = xp;
      xp *= scaled(s.field_t[i]);
    }
    y[r] = s.signal[i];
  }
  const Eigen::VectorXd coef = v.colPivHouseholderQr().solve(y);

  Spectrum out = s;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double base = 0.0;
    for (int d = degree; d >= 0; --d) base = base * scaled(s.field_t[i]) + coef[d];
    out.signal[i] -= base;
  }
  return out;
}

double hyperfine_field_spacing(double splitting_hz, double g_factor) {
  return std::abs(splitting_hz) / constants::gyromagnetic_hz_per_tesla(g_factor);
}

double t2star_from_fwhm(double fwhm_t, double g_factor) {
  if (!(fwhm_t > 0.0)) throw std::invalid_argument("fwhm must be positive");
  return 1.0 / (constants::pi * fwhm_t * constants::gyromagnetic_hz_per_tesla(g_factor));
}

double fwhm_from_t2star(double t2star_s, double g_factor) {
  if (!(t2star_s > 0.0)) throw std::invalid_argument("T2* must be positive");
  return 1.0 / (constants::pi * t2star_s * constants::gyromagnetic_hz_per_tesla(g_factor));
}

}  // namespace nvkin
