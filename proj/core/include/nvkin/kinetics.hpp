#pragma once

// Seven-level kinetic model between spin-mixed eigenstates.
//
// State indices are 0-based in code: 0..2 ground eigenstates |1>..|3>,
// 3..5 excited eigenstates |4>..|6>, 6 the metastable singlet |7>.
// The zero-field basis uses the same layout with each triplet ordered
// (m_s = 0, -1, +1).

#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "nvkin/spin_model.hpp"

namespace nvkin {

inline constexpr int kLevelCount = 7;
using RateTable = Eigen::Matrix<double, kLevelCount, kLevelCount>;
using PopulationVector = Eigen::Matrix<double, kLevelCount, 1>;

struct ZeroFieldRates {
  double k_radiative_hz = 62.7e6;    // excited -> ground, spin conserving
  double k_isc_pm_hz = 80.0e6;       // excited m_s = +-1 -> singlet
  double k_isc_0_hz = 12.97e6;       // excited m_s = 0 -> singlet
  double k_singlet_pm_hz = 1.08e6;   // singlet -> ground m_s = +-1
  double k_singlet_0_hz = 3.45e6;    // singlet -> ground m_s = 0
  double t1_s = 5.5e-3;
  double sigma_cm2 = 9.3e-17;
  double wavelength_m = 532e-9;
  // Optional m_s = -1 <-> +1 relaxation, rate 1/(2 t1_dq). Off by default.
  std::optional<double> t1_dq_s;

  void validate() const;
};

/// Dimensionless pumping strength for an intensity in W/m^2.
double pumping_beta(double laser_intensity_w_per_m2, const ZeroFieldRates& rates);

/// Zero-field rate table k0(p -> q) at pumping strength beta.
RateTable zero_field_rate_table(const ZeroFieldRates& rates, double beta);

/// k(i -> j) between mixed eigenstates. `dark` holds the same matrix at
/// beta = 0 assembled from the same mixing tables.
struct RateMatrix {
  RateTable k = RateTable::Zero();
  RateTable dark = RateTable::Zero();
  double beta = 0.0;

  /// Largest total out-rate of any level.
  double max_rate() const;
};

/// Block-diagonal 7x7 |alpha|^2 table (ground, excited, singlet = 1).
RateTable extended_mixing(const MixingMatrix& ground, const MixingMatrix& excited);

RateMatrix assemble_rate_matrix(const MixingMatrix& ground, const MixingMatrix& excited,
                                const ZeroFieldRates& rates, double beta);

/// Generator G with dn/dt = G n, G(i,j) = k(j -> i) for i != j and
/// G(i,i) = -sum_j k(i -> j).
RateTable generator(const RateTable& k);

struct Populations {
  PopulationVector n = PopulationVector::Zero();

  double sum() const { return n.sum(); }
  double operator[](int i) const { return n[i]; }
};

/// Boltzmann distribution over the three ground levels (Hz), singlet and
/// excited levels empty.
Populations thermal_populations(const Eigen::Vector3d& ground_energies_hz,
                                double temperature_k);

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solves A(beta) n = A(0) n_dark with row `normalization_row` replaced by the
/// constraint sum(n) = 1.
Populations steady_state(const RateMatrix& rm, const Populations& n_dark,
                         int normalization_row = kLevelCount - 1);

class UnstableStepError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Integrates dn/dt = G n with classical RK4 at fixed step dt. When a thermal
/// reference is given, the constant source -A(0) n_dark is added so the fixed
/// point matches steady_state(). Requires dt * max_rate < 0.1.
///
/// The first 10 us are integrated step by step. Beyond that the RK4 step map
/// (affine and time-independent) is composed by repeated squaring, which
/// yields the same iterates without walking every fine step.
Populations time_evolution(const RateMatrix& rm, const Populations& n0, double t_final_s,
                           double dt_s,
                           const std::optional<Populations>& thermal_reference = std::nullopt);

/// (n_i - n_j) / sum(n). Indices are 1-based state labels (1..7).
double spin_polarization(const Populations& n, int i, int j);

/// |optical / thermal|.
double amplification(double optical_pol, double thermal_pol);

/// Everything computed at one field point.
struct PointSolution {
  ManifoldSolution ground;
  ManifoldSolution excited;
  RateMatrix rates;
  Populations dark;
  Populations pumped;
};

PointSolution solve_point(const SpinSystemParams& params, const ZeroFieldRates& rates,
                          const FieldVector& field, double beta);

}  // namespace nvkin
