#pragma once

// Resonant fields at a fixed microwave frequency and microwave coupling
// factors for ground-state transitions.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nvkin/spin_model.hpp"

namespace nvkin {

enum class TransitionKind { sqt, dqt };

/// Ground-state transition between energy-ordered eigenstates |lower> and
/// |upper>, labels 1..3.
struct TransitionSpec {
  int lower = 1;
  int upper = 2;

  void validate() const;
  TransitionKind kind() const;
  std::string label() const;  // "1-2"

  static constexpr TransitionSpec sqt12() { return {1, 2}; }
  static constexpr TransitionSpec sqt23() { return {2, 3}; }
  static constexpr TransitionSpec dqt13() { return {1, 3}; }

  friend bool operator==(const TransitionSpec&, const TransitionSpec&) = default;
};

inline constexpr TransitionSpec kAllTransitions[] = {
    TransitionSpec::sqt12(), TransitionSpec::sqt23(), TransitionSpec::dqt13()};

struct FieldWindow {
  double lo_t = 0.05;
  double hi_t = 0.70;
};

struct RootSearchOptions {
  double grid_step_t = 0.5e-3;
  double tolerance_t = 1e-7;
  double merge_distance_t = 1e-3;
};

struct ResonantField {
  double field_t = 0.0;
  int multiplicity = 1;
};

/// E_upper - E_lower of the electron-only ground Hamiltonian, Hz.
double transition_frequency(const SpinSystemParams& params, const FieldVector& field,
                            const TransitionSpec& t);

/// Fields in `window` where the transition frequency equals f_mw. Sign
/// changes on a uniform grid are refined by bisection; roots closer than
/// merge_distance are reported once with a multiplicity.
std::vector<ResonantField> resonant_fields(const SpinSystemParams& params, double f_mw_hz,
                                           double theta_rad, const TransitionSpec& t,
                                           const FieldWindow& window,
                                           const RootSearchOptions& opts = {});

/// Default drive axis in the NV frame: normal to the plane holding the NV
/// axis and the static field.
inline Eigen::Vector3d default_drive_axis() { return Eigen::Vector3d::UnitY(); }

/// |<a|S.b|c>|^2 for eigenstates with 1-based labels a, c (any order).
double dipole_matrix_element_sq(const EigenSystem& eig, int a, int c,
                                const Eigen::Vector3d& drive_axis);

/// Coupling normalized to |<1_0|Sx|2_0>|^2 = 1/2, so the aligned |1>-|2>
/// transition driven perpendicular to the NV axis has C = 1.
double mw_coupling(const EigenSystem& eig, const TransitionSpec& t,
                   const Eigen::Vector3d& drive_axis = default_drive_axis());

struct ResonanceResult {
  double field_t = 0.0;
  double theta_rad = 0.0;
  TransitionSpec transition;
  double coupling = 0.0;
  double frequency_hz = 0.0;
  int multiplicity = 1;
};

/// resonant_fields() plus the coupling at each root.
std::vector<ResonanceResult> find_resonances(const SpinSystemParams& params, double f_mw_hz,
                                             double theta_rad, const TransitionSpec& t,
                                             const FieldWindow& window,
                                             const Eigen::Vector3d& drive_axis =
                                                 default_drive_axis(),
                                             const RootSearchOptions& opts = {});

}  // namespace nvkin
