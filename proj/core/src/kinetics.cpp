#include "nvkin/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nvkin/constants.hpp"

namespace nvkin {

namespace {

// Zero-field layout of the 7 levels.
constexpr int kGs0 = 0, kGsMinus = 1, kGsPlus = 2;
constexpr int kEs0 = 3, kEsMinus = 4, kEsPlus = 5;
constexpr int kSinglet = 6;

// Fine-step horizon before the step map is composed by squaring.
constexpr double kFineHorizonS = 10e-6;

using Augmented = Eigen::Matrix<double, kLevelCount + 1, kLevelCount + 1>;

}  // namespace

void ZeroFieldRates::validate() const {
  const double all[] = {k_radiative_hz, k_isc_pm_hz, k_isc_0_hz, k_singlet_pm_hz,
                        k_singlet_0_hz, t1_s,        sigma_cm2,  wavelength_m};
  for (double v : all) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("zero-field rates, t1, sigma and wavelength must be positive");
    }
  }
  if (t1_dq_s && !(*t1_dq_s > 0.0)) {
    throw std::invalid_argument("double-quantum t1 must be positive");
  }
}

double pumping_beta(double laser_intensity_w_per_m2, const ZeroFieldRates& rates) {
  if (!(laser_intensity_w_per_m2 >= 0.0) || !std::isfinite(laser_intensity_w_per_m2)) {
    throw std::invalid_argument("laser intensity must be finite and >= 0");
  }
  rates.validate();
  const double sigma_m2 = rates.sigma_cm2 * 1e-4;
  const double photon_energy = constants::planck * constants::speed_of_light / rates.wavelength_m;
  // Only one of the four NV orientations is counted per pumped centre.
  return sigma_m2 * laser_intensity_w_per_m2 / (4.0 * rates.k_radiative_hz * photon_energy);
}

RateTable zero_field_rate_table(const ZeroFieldRates& rates, double beta) {
  rates.validate();
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("pumping strength must be finite and >= 0");
  }
  RateTable k0 = RateTable::Zero();

  const double kr = rates.k_radiative_hz;
  k0(kEs0, kGs0) = kr;
  k0(kEsMinus, kGsMinus) = kr;
  k0(kEsPlus, kGsPlus) = kr;

  k0(kGs0, kEs0) = beta * kr;
  k0(kGsMinus, kEsMinus) = beta * kr;
  k0(kGsPlus, kEsPlus) = beta * kr;

  k0(kEs0, kSinglet) = rates.k_isc_0_hz;
  k0(kEsMinus, kSinglet) = rates.k_isc_pm_hz;
  k0(kEsPlus, kSinglet) = rates.k_isc_pm_hz;

  k0(kSinglet, kGs0) = rates.k_singlet_0_hz;
  k0(kSinglet, kGsMinus) = rates.k_singlet_pm_hz;
  k0(kSinglet, kGsPlus) = rates.k_singlet_pm_hz;

  const double relax = 1.0 / (2.0 * rates.t1_s);
  k0(kGs0, kGsMinus) = k0(kGsMinus, kGs0) = relax;
  k0(kGs0, kGsPlus) = k0(kGsPlus, kGs0) = relax;
  if (rates.t1_dq_s) {
    const double dq = 1.0 / (2.0 * *rates.t1_dq_s);
    k0(kGsMinus, kGsPlus) = k0(kGsPlus, kGsMinus) = dq;
  }
  return k0;
}

double RateMatrix::max_rate() const { return k.rowwise().sum().maxCoeff(); }

RateTable extended_mixing(const MixingMatrix& ground, const MixingMatrix& excited) {
  if (ground.manifold != Manifold::ground || excited.manifold != Manifold::excited) {
    throw std::invalid_argument("rate assembly needs one ground and one excited mixing table");
  }
  RateTable a = RateTable::Zero();
  a.block<3, 3>(0, 0) = ground.alpha_sq;
  a.block<3, 3>(3, 3) = excited.alpha_sq;
  a(kSinglet, kSinglet) = 1.0;
  return a;
}

RateMatrix assemble_rate_matrix(const MixingMatrix& ground, const MixingMatrix& excited,
                                const ZeroFieldRates& rates, double beta) {
  const RateTable a = extended_mixing(ground, excited);
  // k_ij = sum_pq a_ip k0_pq a_jq
  auto mix = [&](const RateTable& k0) {
    RateTable k = a * k0 * a.transpose();
    k.diagonal().setZero();
    return k;
  };
  RateMatrix rm;
  rm.beta = beta;
  rm.k = mix(zero_field_rate_table(rates, beta));
  rm.dark = beta == 0.0 ? rm.k : mix(zero_field_rate_table(rates, 0.0));
  return rm;
}

RateTable generator(const RateTable& k) {
  RateTable g = k.transpose();
  g.diagonal().setZero();
  for (int i = 0; i < kLevelCount; ++i) {
    double out = 0.0;
    for (int j = 0; j < kLevelCount; ++j) {
      if (j != i) out += k(i, j);
    }
    g(i, i) = -out;
  }
  return g;
}

Populations thermal_populations(const Eigen::Vector3d& ground_energies_hz,
                                double temperature_k) {
  if (!(temperature_k > 0.0)) throw std::invalid_argument("temperature must be positive");
  const double e_min = ground_energies_hz.minCoeff();
  const double scale = constants::planck / (constants::boltzmann * temperature_k);
  Populations p;
  for (int i = 0; i < 3; ++i) {
    p.n[i] = std::exp(-scale * (ground_energies_hz[i] - e_min));
  }
  p.n /= p.n.sum();
  return p;
}

Populations steady_state(const RateMatrix& rm, const Populations& n_dark,
                         int normalization_row) {
  if (normalization_row < 0 || normalization_row >= kLevelCount) {
    throw std::invalid_argument("normalization row out of range");
  }
  RateTable a = generator(rm.k);
  PopulationVector b = generator(rm.dark) * n_dark.n;
  a.row(normalization_row).setOnes();
  b[normalization_row] = 1.0;

  Eigen::FullPivLU<RateTable> lu(a);
  if (!lu.isInvertible()) {
    throw SingularSystemError("rate equation system is singular");
  }
  PopulationVector n = lu.solve(b);
  // One step of iterative refinement; rates span six decades.
  n += lu.solve(b - a * n);
  if (!n.allFinite()) throw SingularSystemError("rate equation solution is not finite");
  return Populations{n};
}

namespace {

PopulationVector rk4_step(const RateTable& g, const PopulationVector& source,
                          const PopulationVector& n, double h) {
  const PopulationVector k1 = g * n + source;
  const PopulationVector k2 = g * (n + 0.5 * h * k1) + source;
  const PopulationVector k3 = g * (n + 0.5 * h * k2) + source;
  const PopulationVector k4 = g * (n + h * k3) + source;
  return n + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// The RK4 update of an affine system is n' = P n + q; embed it as an 8x8
// matrix acting on (n, 1).
Augmented rk4_step_map(const RateTable& g, const PopulationVector& source, double h) {
  const RateTable hg = h * g;
  const RateTable id = RateTable::Identity();
  const RateTable hg2 = hg * hg;
  const RateTable hg3 = hg2 * hg;
  const RateTable p = id + hg + hg2 / 2.0 + hg3 / 6.0 + hg3 * hg / 24.0;
  const RateTable qpoly = id + hg / 2.0 + hg2 / 6.0 + hg3 / 24.0;
  Augmented m = Augmented::Zero();
  m.topLeftCorner<kLevelCount, kLevelCount>() = p;
  m.topRightCorner<kLevelCount, 1>() = h * (qpoly * source);
  m(kLevelCount, kLevelCount) = 1.0;
  return m;
}

// Exact step maps conserve total population: population columns sum to 1 and
// the source column to 0. Rounding breaks this by ~eps per product, and the
// defect is amplified linearly in the number of composed steps, so it is
// removed after every product, in proportion to each entry's magnitude.
void restore_conservation(Augmented& m) {
  for (int c = 0; c <= kLevelCount; ++c) {
    const auto col = m.col(c).head<kLevelCount>();
    const double target = c < kLevelCount ? 1.0 : 0.0;
    const double defect = col.sum() - target;
    const double weight = col.cwiseAbs().sum();
    if (defect == 0.0 || weight == 0.0) continue;
    for (int r = 0; r < kLevelCount; ++r) m(r, c) -= defect * std::abs(m(r, c)) / weight;
  }
}

Augmented matrix_power(Augmented base, unsigned long long exponent) {
  Augmented result = Augmented::Identity();
  restore_conservation(base);
  while (exponent > 0) {
    if (exponent & 1ULL) {
      result = (result * base).eval();
      restore_conservation(result);
    }
    exponent >>= 1;
    if (exponent > 0) {
      base = (base * base).eval();
      restore_conservation(base);
    }
  }
  return result;
}

}  // namespace

Populations time_evolution(const RateMatrix& rm, const Populations& n0, double t_final_s,
                           double dt_s, const std::optional<Populations>& thermal_reference) {
  if (!(t_final_s >= 0.0) || !(dt_s > 0.0)) {
    throw std::invalid_argument("time evolution needs t_final >= 0 and dt > 0");
  }
  const double stiffness = dt_s * rm.max_rate();
  if (!(stiffness < 0.1)) {
    throw UnstableStepError("dt * max_rate = " + std::to_string(stiffness) +
                            " exceeds the explicit stability bound 0.1");
  }
  const RateTable g = generator(rm.k);
  PopulationVector source = PopulationVector::Zero();
  if (thermal_reference) source = -(generator(rm.dark) * thermal_reference->n);

  PopulationVector n = n0.n;
  double t = 0.0;
  const double fine_end = std::min(t_final_s, kFineHorizonS);
  while (t < fine_end) {
    const double h = std::min(dt_s, fine_end - t);
    n = rk4_step(g, source, n, h);
    t += h;
  }

  const double remaining = t_final_s - t;
  if (remaining > 0.0) {
    const auto steps = static_cast<unsigned long long>(std::floor(remaining / dt_s));
    if (steps > 0) {
      const Augmented m = matrix_power(rk4_step_map(g, source, dt_s), steps);
      Eigen::Matrix<double, kLevelCount + 1, 1> x;
      x << n, 1.0;
      n = (m * x).head<kLevelCount>();
    }
    const double tail = remaining - static_cast<double>(steps) * dt_s;
    if (tail > 0.0) n = rk4_step(g, source, n, tail);
  }
  return Populations{n};
}

double spin_polarization(const Populations& n, int i, int j) {
  if (i < 1 || i > kLevelCount || j < 1 || j > kLevelCount || i == j) {
    throw std::out_of_range("spin polarization needs distinct state labels in 1..7");
  }
  const double total = n.sum();
  if (total == 0.0) throw std::invalid_argument("populations sum to zero");
  return (n.n[i - 1] - n.n[j - 1]) / total;
}

double amplification(double optical_pol, double thermal_pol) {
  if (thermal_pol == 0.0) throw std::invalid_argument("thermal polarization is zero");
  return std::abs(optical_pol / thermal_pol);
}

PointSolution solve_point(const SpinSystemParams& params, const ZeroFieldRates& rates,
                          const FieldVector& field, double beta) {
  PointSolution sol;
  sol.ground = solve_manifold(params, field, Manifold::ground);
  sol.excited = solve_manifold(params, field, Manifold::excited);
  sol.rates = assemble_rate_matrix(sol.ground.mixing, sol.excited.mixing, rates, beta);
  sol.dark = thermal_populations(sol.ground.eig.energies_hz.head<3>(), params.temperature_k);
  sol.pumped = steady_state(sol.rates, sol.dark);
  return sol;
}

}  // namespace nvkin
