#include "nvkin/peak_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace nvkin {

double FitResult::total_area() const {
  double a = 0.0;
  for (const auto& p : peaks) a += p.area();
  return a;
}

namespace {

// Parameter slots of one peak inside the packed vector.
struct PeakSlots {
  Eigen::Index center = -1;
  Eigen::Index fwhm = -1;
  Eigen::Index splitting = -1;      // -1 when not fitted
  Eigen::Index first_amplitude = -1;
  int amplitude_count = 1;
};

class PeakPacking {
 public:
  PeakPacking(const std::vector<PeakModel>& initial, bool equal_amplitude, bool fit_splitting)
      : templates_(initial), equal_(equal_amplitude) {
    Eigen::Index next = 0;
    for (const auto& p : initial) {
      PeakSlots s;
      s.center = next++;
      s.fwhm = next++;
      if (fit_splitting && p.n_hyperfine > 1) s.splitting = next++;
      s.first_amplitude = next;
      s.amplitude_count = equal_amplitude ? 1 : p.n_hyperfine;
      next += s.amplitude_count;
      slots_.push_back(s);
    }
    size_ = next;
  }

  Eigen::Index size() const { return size_; }
  const std::vector<PeakSlots>& slots() const { return slots_; }

  Eigen::VectorXd pack(const std::vector<PeakModel>& peaks) const {
    Eigen::VectorXd p(size_);
    for (std::size_t i = 0; i < peaks.size(); ++i) {
      const auto& s = slots_[i];
      const auto& pk = peaks[i];
      p[s.center] = pk.center_t;
      p[s.fwhm] = pk.fwhm_t;
      if (s.splitting >= 0) p[s.splitting] = pk.hyperfine_splitting_t;
      if (equal_) {
        double mean = 0.0;
        for (int k = 0; k < pk.n_hyperfine; ++k) mean += pk.component_amplitude(k);
        p[s.first_amplitude] = mean / pk.n_hyperfine;
      } else {
        for (int k = 0; k < pk.n_hyperfine; ++k) p[s.first_amplitude + k] = pk.component_amplitude(k);
      }
    }
    return p;
  }

  std::vector<PeakModel> unpack(const Eigen::VectorXd& p) const {
    std::vector<PeakModel> out = templates_;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto& s = slots_[i];
      auto& pk = out[i];
      pk.center_t = p[s.center];
      pk.fwhm_t = p[s.fwhm];
      if (s.splitting >= 0) pk.hyperfine_splitting_t = p[s.splitting];
      if (equal_) {
        pk.amplitude = p[s.first_amplitude];
        pk.component_amplitudes.clear();
      } else {
        pk.component_amplitudes.resize(static_cast<std::size_t>(pk.n_hyperfine));
        double mean = 0.0;
        for (int k = 0; k < pk.n_hyperfine; ++k) {
          pk.component_amplitudes[static_cast<std::size_t>(k)] = p[s.first_amplitude + k];
          mean += p[s.first_amplitude + k];
        }
        pk.amplitude = mean / pk.n_hyperfine;
      }
    }
    return out;
  }

  bool feasible(const Eigen::VectorXd& p) const {
    for (const auto& s : slots_) {
      if (!(p[s.fwhm] > 0.0)) return false;
    }
    return p.allFinite();
  }

 private:
  std::vector<PeakModel> templates_;
  std::vector<PeakSlots> slots_;
  bool equal_;
  Eigen::Index size_ = 0;
};

Eigen::VectorXd residuals(const Spectrum& s, const std::vector<PeakModel>& peaks) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    r[static_cast<Eigen::Index>(i)] = evaluate_peaks(peaks, s.field_t[i], s.kind) - s.signal[i];
  }
  return r;
}

// Analytic Jacobian of the absorption model.
Eigen::MatrixXd absorption_jacobian(const Spectrum& s, const PeakPacking& packing,
                                    const std::vector<PeakModel>& peaks) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s.size()), packing.size());
  for (std::size_t pi = 0; pi < peaks.size(); ++pi) {
    const auto& pk = peaks[pi];
    const auto& sl = packing.slots()[pi];
    const double hw = 0.5 * pk.fwhm_t;
    const double mid = 0.5 * (pk.n_hyperfine - 1);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      for (int k = 0; k < pk.n_hyperfine; ++k) {
        const double a = pk.component_amplitude(k);
        const double d = s.field_t[i] - pk.component_center(k);
        const double q = d * d + hw * hw;
        const double dc = 2.0 * a * hw * hw * d / (q * q);
        j(row, sl.center) += dc;
        j(row, sl.fwhm) += a * hw * d * d / (q * q);
        if (sl.splitting >= 0) j(row, sl.splitting) += dc * (k - mid);
        const Eigen::Index ai = sl.first_amplitude + (sl.amplitude_count == 1 ? 0 : k);
        j(row, ai) += hw * hw / q;
      }
    }
  }
  return j;
}

Eigen::MatrixXd numeric_jacobian(const Spectrum& s, const PeakPacking& packing,
                                 const Eigen::VectorXd& p) {
  Eigen::MatrixXd j(static_cast<Eigen::Index>(s.size()), packing.size());
  for (Eigen::Index c = 0; c < packing.size(); ++c) {
    const double h = 1e-6 * std::max(std::abs(p[c]), 1e-9);
    Eigen::VectorXd hi = p, lo = p;
    hi[c] += h;
    lo[c] -= h;
    j.col(c) = (residuals(s, packing.unpack(hi)) - residuals(s, packing.unpack(lo))) / (2.0 * h);
  }
  return j;
}

double gradient_cosine(const Eigen::MatrixXd& j, const Eigen::VectorXd& r) {
  const double rn = r.norm();
  if (rn == 0.0) return 0.0;
  double worst = 0.0;
  for (Eigen::Index c = 0; c < j.cols(); ++c) {
    const double cn = j.col(c).norm();
    if (cn == 0.0) continue;
    worst = std::max(worst, std::abs(j.col(c).dot(r)) / (cn * rn));
  }
  return worst;
}

}  // namespace

FitResult fit_multipeak(const Spectrum& s, const std::vector<PeakModel>& initial,
                        bool equal_amplitude, const FitOptions& opts) {
  s.validate();
  if (initial.empty()) throw std::invalid_argument("fit needs at least one initial peak");
  if (s.size() < 2) throw std::invalid_argument("fit needs at least two samples");
  for (const auto& p : initial) {
    p.validate();
    if (p.center_t < s.field_t.front() || p.center_t > s.field_t.back()) {
      throw std::invalid_argument("initial peak center lies outside the field axis");
    }
  }

  const PeakPacking packing(initial, equal_amplitude, opts.fit_splitting);
  if (static_cast<std::size_t>(packing.size()) > s.size()) {
    throw std::invalid_argument("more fit parameters than samples");
  }

  Eigen::VectorXd p = packing.pack(initial);
  std::vector<PeakModel> current = packing.unpack(p);
  Eigen::VectorXd r = residuals(s, current);
  double cost = r.squaredNorm();
  double lambda = 1e-3;

  FitResult result;
  auto finish = [&](bool converged, std::string message) {
    result.peaks = current;
    result.residual_norm = std::sqrt(cost);
    result.converged = converged;
    result.message = std::move(message);
    return result;
  };

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    const Eigen::MatrixXd j = s.kind == SpectrumKind::absorption
                                  ? absorption_jacobian(s, packing, current)
                                  : numeric_jacobian(s, packing, p);
    if (gradient_cosine(j, r) <= opts.gradient_tolerance) {
      return finish(true, "gradient tolerance reached");
    }
    result.iterations = iter + 1;

    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd g = j.transpose() * r;
    Eigen::VectorXd diag = jtj.diagonal();
    for (Eigen::Index c = 0; c < diag.size(); ++c) {
      if (!(diag[c] > 0.0)) diag[c] = 1e-30;
    }

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() += lambda * diag;
      const Eigen::VectorXd step = damped.ldlt().solve(-g);
      const Eigen::VectorXd trial = p + step;
      if (packing.feasible(trial)) {
        const auto trial_peaks = packing.unpack(trial);
        const Eigen::VectorXd trial_r = residuals(s, trial_peaks);
        const double trial_cost = trial_r.squaredNorm();
        if (trial_cost < cost) {
          double rel_step = 0.0;
          for (Eigen::Index c = 0; c < p.size(); ++c) {
            const double scale = std::max(std::abs(p[c]), std::numeric_limits<double>::min());
            rel_step = std::max(rel_step, std::abs(step[c]) / scale);
          }
          p = trial;
          current = trial_peaks;
          r = trial_r;
          cost = trial_cost;
          lambda = std::max(lambda * 0.3, 1e-12);
          accepted = true;
          if (rel_step <= opts.step_tolerance) return finish(true, "step tolerance reached");
          continue;
        }
      }
      lambda *= 10.0;
      if (lambda > 1e20) {
        // No descent direction left at working precision.
        return finish(true, "no further decrease at machine precision");
      }
    }
  }
  return finish(false, "maximum iterations reached");
}

std::vector<PeakModel> guess_peaks(const Spectrum& s, const GuessOptions& opts) {
  s.validate();
  if (s.kind != SpectrumKind::absorption) {
    throw std::invalid_argument("peak guessing expects an absorption spectrum");
  }
  const std::size_t n = s.size();
  if (n < 3) return {};

  const int half = std::max(opts.smoothing_window, 1) / 2;
  std::vector<double> smooth(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= static_cast<std::size_t>(half) ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + static_cast<std::size_t>(half));
    double acc = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) acc += s.signal[k];
    smooth[i] = acc / static_cast<double>(hi - lo + 1);
  }
  double peak_mag = 0.0;
  for (double v : smooth) peak_mag = std::max(peak_mag, std::abs(v));
  if (peak_mag == 0.0) return {};

  struct Extremum {
    std::size_t index;
    double value;
  };
  // An extremum dominates every same-signed sample within `reach`, so noise
  // ripple on a line top yields one candidate. Ties go to the first sample.
  const std::size_t reach = static_cast<std::size_t>(std::max(opts.smoothing_window, 1));
  std::vector<Extremum> extrema;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double v = smooth[i];
    if (std::abs(v) < opts.threshold_fraction * peak_mag) continue;
    const std::size_t lo = i >= reach ? i - reach : 0;
    const std::size_t hi = std::min(n - 1, i + reach);
    bool dominant = true;
    for (std::size_t k = lo; k <= hi && dominant; ++k) {
      if (k == i || (smooth[k] < 0) != (v < 0)) continue;
      dominant = k < i ? std::abs(v) > std::abs(smooth[k]) : std::abs(v) >= std::abs(smooth[k]);
    }
    if (dominant) extrema.push_back({i, v});
  }

  // Noise level of the smoothed curve: robust spread of first differences of
  // the raw signal, sqrt(2) sigma for white noise, reduced by the averaging.
  double noise = 0.0;
  {
    std::vector<double> diffs(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) diffs[i] = s.signal[i + 1] - s.signal[i];
    auto median = [](std::vector<double> v) {
      const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
      std::nth_element(v.begin(), mid, v.end());
      return *mid;
    };
    const double centre = median(diffs);
    for (double& d : diffs) d = std::abs(d - centre);
    const double sigma = 1.4826 * median(diffs) / std::sqrt(2.0);
    noise = sigma / std::sqrt(static_cast<double>(2 * half + 1));
  }
  const double min_prominence =
      std::max(opts.threshold_fraction * peak_mag, opts.noise_prominence * noise);

  // Walk outward until a larger same-signed sample, a sign change or the end;
  // the deepest |value| met is that side's saddle.
  auto saddle = [&](std::size_t i, int dir) {
    const double v = std::abs(smooth[i]);
    double deepest = v;
    for (std::size_t k = i;;) {
      if ((dir < 0 && k == 0) || (dir > 0 && k + 1 == n)) break;
      k = dir < 0 ? k - 1 : k + 1;
      if ((smooth[k] < 0) != (smooth[i] < 0)) return 0.0;
      const double a = std::abs(smooth[k]);
      if (a > v) break;
      deepest = std::min(deepest, a);
    }
    return deepest;
  };
  std::erase_if(extrema, [&](const Extremum& e) {
    const double prominence = std::abs(e.value) - std::max(saddle(e.index, -1), saddle(e.index, +1));
    return prominence < min_prominence;
  });

  auto local_spacing = [&](std::size_t i) {
    const std::size_t a = i > 0 ? i - 1 : i;
    const std::size_t b = std::min(n - 1, i + 1);
    return (s.field_t[b] - s.field_t[a]) / static_cast<double>(b - a);
  };
  auto single = [&](const Extremum& e) {
    PeakModel p;
    p.center_t = s.field_t[e.index];
    p.fwhm_t = 3.0 * local_spacing(e.index);
    p.amplitude = e.value;
    return p;
  };

  std::vector<PeakModel> out;
  for (std::size_t i = 0; i < extrema.size();) {
    std::size_t j = i + 1;
    while (j < extrema.size() &&
           s.field_t[extrema[j].index] - s.field_t[extrema[j - 1].index] <= opts.cluster_gap_t) {
      ++j;
    }
    const auto count = static_cast<int>(j - i);
    if (opts.n_hyperfine > 1 && count == opts.n_hyperfine) {
      const double first = s.field_t[extrema[i].index];
      const double last = s.field_t[extrema[j - 1].index];
      PeakModel p;
      p.center_t = 0.5 * (first + last);
      p.hyperfine_splitting_t = (last - first) / (count - 1);
      p.n_hyperfine = count;
      double mean = 0.0;
      for (std::size_t k = i; k < j; ++k) mean += extrema[k].value;
      p.amplitude = mean / count;
      p.fwhm_t = 3.0 * local_spacing(extrema[(i + j) / 2].index);
      out.push_back(p);
    } else {
      for (std::size_t k = i; k < j; ++k) out.push_back(single(extrema[k]));
    }
    i = j;
  }
  return out;
}

std::vector<FieldInterval> peak_windows(const std::vector<PeakModel>& peaks, double pad_fwhm) {
  std::vector<FieldInterval> out;
  for (const auto& p : peaks) {
    const double half_span = 0.5 * (p.n_hyperfine - 1) * std::abs(p.hyperfine_splitting_t);
    const double pad = pad_fwhm * p.fwhm_t;
    out.push_back({p.center_t - half_span - pad, p.center_t + half_span + pad});
  }
  return out;
}

PolarizationEstimate extract_polarization(double area, double coupling, double ref_area,
                                          double ref_pol) {
  if (!(coupling > 0.0)) throw std::invalid_argument("microwave coupling must be positive");
  if (ref_area == 0.0) throw std::invalid_argument("reference area must be non-zero");
  PolarizationEstimate e;
  e.area = area;
  e.coupling = coupling;
  e.reference_area = ref_area;
  e.reference_polarization = ref_pol;
  e.value = (area / coupling) * (ref_pol / ref_area);
  return e;
}

}  // namespace nvkin
