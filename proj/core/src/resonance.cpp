#include "nvkin/resonance.hpp"

#include <cmath>
#include <stdexcept>

namespace nvkin {

void TransitionSpec::validate() const {
  if (lower < 1 || upper > 3 || lower >= upper) {
    throw std::invalid_argument("transition must join ground labels 1 <= lower < upper <= 3");
  }
}

TransitionKind TransitionSpec::kind() const {
  return (lower == 1 && upper == 3) ? TransitionKind::dqt : TransitionKind::sqt;
}

std::string TransitionSpec::label() const {
  return std::to_string(lower) + "-" + std::to_string(upper);
}

double transition_frequency(const SpinSystemParams& params, const FieldVector& field,
                            const TransitionSpec& t) {
  t.validate();
  const EigenSystem eig = eigensolve(build_hamiltonian(params, field, Manifold::ground));
  return eig.energies_hz[t.upper - 1] - eig.energies_hz[t.lower - 1];
}

std::vector<ResonantField> resonant_fields(const SpinSystemParams& params, double f_mw_hz,
                                           double theta_rad, const TransitionSpec& t,
                                           const FieldWindow& window,
                                           const RootSearchOptions& opts) {
  t.validate();
  if (!(f_mw_hz > 0.0)) throw std::invalid_argument("microwave frequency must be positive");
  if (!(window.lo_t >= 0.0) || !(window.hi_t <= 1.0) || !(window.lo_t < window.hi_t)) {
    throw std::invalid_argument("field window must satisfy 0 <= lo < hi <= 1 T");
  }
  if (!(opts.grid_step_t > 0.0) || !(opts.tolerance_t > 0.0)) {
    throw std::invalid_argument("root search step and tolerance must be positive");
  }

  auto mismatch = [&](double b) {
    return transition_frequency(params, FieldVector{b, theta_rad, 0.0}, t) - f_mw_hz;
  };

  const double span = window.hi_t - window.lo_t;
  const auto cells = static_cast<int>(std::ceil(span / opts.grid_step_t - 1e-9));
  std::vector<double> roots;

  double b_prev = window.lo_t;
  double g_prev = mismatch(b_prev);
  if (g_prev == 0.0) roots.push_back(b_prev);
  for (int k = 1; k <= cells; ++k) {
    const double b = (k == cells) ? window.hi_t : window.lo_t + span * k / cells;
    const double g = mismatch(b);
    if (g == 0.0) {
      roots.push_back(b);
    } else if (g_prev != 0.0 && (g_prev < 0.0) != (g < 0.0)) {
      double lo = b_prev, hi = b, g_lo = g_prev, g_hi = g;
      while (hi - lo > opts.tolerance_t) {
        const double mid = 0.5 * (lo + hi);
        const double g_mid = mismatch(mid);
        if (g_mid == 0.0) {
          lo = hi = mid;
          g_lo = g_hi = 0.0;
          break;
        }
        if ((g_mid < 0.0) == (g_lo < 0.0)) {
          lo = mid;
          g_lo = g_mid;
        } else {
          hi = mid;
          g_hi = g_mid;
        }
      }
      // Secant point inside the final bracket.
      double root = 0.5 * (lo + hi);
      if (g_hi != g_lo) root = lo - g_lo * (hi - lo) / (g_hi - g_lo);
      roots.push_back(root);
    }
    b_prev = b;
    g_prev = g;
  }

  std::vector<ResonantField> out;
  for (std::size_t i = 0; i < roots.size();) {
    std::size_t j = i + 1;
    while (j < roots.size() && roots[j] - roots[j - 1] < opts.merge_distance_t) ++j;
    const int count = static_cast<int>(j - i);
    const double field = count == 1 ? roots[i] : 0.5 * (roots[i] + roots[j - 1]);
    out.push_back({field, count});
    i = j;
  }
  return out;
}

double dipole_matrix_element_sq(const EigenSystem& eig, int a, int c,
                                const Eigen::Vector3d& drive_axis) {
  if (eig.dim() != 3) throw std::invalid_argument("coupling needs an electron-only eigensystem");
  if (a < 1 || a > 3 || c < 1 || c > 3) throw std::out_of_range("state labels must be 1..3");
  const double norm = drive_axis.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("drive axis must be a non-zero vector");
  }
  const Eigen::Vector3d b = drive_axis / norm;
  const auto s = spin_operators(1.0);
  const Matrix3c op = b.x() * s.sx + b.y() * s.sy + b.z() * s.sz;
  const Complex amp = eig.vectors.col(a - 1).dot(op * eig.vectors.col(c - 1));
  return std::norm(amp);
}

double mw_coupling(const EigenSystem& eig, const TransitionSpec& t,
                   const Eigen::Vector3d& drive_axis) {
  t.validate();
  // |<m=0|Sx|m=-1>|^2
  constexpr double reference = 0.5;
  return dipole_matrix_element_sq(eig, t.lower, t.upper, drive_axis) / reference;
}

std::vector<ResonanceResult> find_resonances(const SpinSystemParams& params, double f_mw_hz,
                                             double theta_rad, const TransitionSpec& t,
                                             const FieldWindow& window,
                                             const Eigen::Vector3d& drive_axis,
                                             const RootSearchOptions& opts) {
  std::vector<ResonanceResult> out;
  for (const auto& root : resonant_fields(params, f_mw_hz, theta_rad, t, window, opts)) {
    const FieldVector field{root.field_t, theta_rad, 0.0};
    const EigenSystem eig = eigensolve(build_hamiltonian(params, field, Manifold::ground));
    ResonanceResult r;
    r.field_t = root.field_t;
    r.theta_rad = theta_rad;
    r.transition = t;
    r.coupling = mw_coupling(eig, t, drive_axis);
    r.frequency_hz = eig.energies_hz[t.upper - 1] - eig.energies_hz[t.lower - 1];
    r.multiplicity = root.multiplicity;
    out.push_back(r);
  }
  return out;
}

}  // namespace nvkin
