#pragma once

// NV ground/excited spin Hamiltonians, diagonalization and spin-mixing tables.
//
// Frequencies are in Hz (energies divided by h), fields in tesla, angles in
// radians. The NV frame has z along the NV axis; the static field lies in the
// x-z plane unless an azimuth is given.

#include <array>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace nvkin {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Matrix3c = Eigen::Matrix3cd;

enum class Manifold { ground, excited };

const char* to_string(Manifold m);

struct SpinSystemParams {
  double d_gs_hz = 2.87e9;
  double d_es_hz = 1.42e9;
  double g_factor = 2.0;
  // 14N hyperfine tensor, axially symmetric about the NV axis.
  double hyperfine_par_hz = -2.16e6;
  double hyperfine_perp_hz = -2.70e6;
  double temperature_k = 298.0;

  /// Throws std::invalid_argument unless d_gs > d_es > 0, g > 0 and T > 0.
  void validate() const;

  double gyromagnetic_hz_per_tesla() const;
  double zero_field_splitting(Manifold m) const {
    return m == Manifold::ground ? d_gs_hz : d_es_hz;
  }
};

/// Static magnetic field in polar form relative to the NV axis.
struct FieldVector {
  double magnitude_t = 0.0;
  double polar_angle_rad = 0.0;
  double azimuth_rad = 0.0;

  static FieldVector from_degrees(double magnitude_t, double theta_deg);

  /// Magnitude must be >= 0 and theta in [0, pi/2].
  void validate() const;
  Eigen::Vector3d cartesian() const;
};

struct SpinOperators {
  Matrix3c sx;
  Matrix3c sy;
  Matrix3c sz;
};

/// Angular momentum matrices in the m = {+1, 0, -1} basis. Only spin 1 is
/// supported; anything else throws std::invalid_argument.
SpinOperators spin_operators(double spin_quantum_number = 1.0);

/// Position of m_s in the {+1, 0, -1} operator basis.
constexpr int sz_basis_index(int ms) { return 1 - ms; }

struct HamiltonianMatrix {
  ComplexMatrix entries;  // Hz

  Eigen::Index dim() const { return entries.rows(); }
  bool is_hermitian(double relative_tol = 1e-12) const;
};

HamiltonianMatrix build_hamiltonian(const SpinSystemParams& params,
                                    const FieldVector& field, Manifold manifold,
                                    bool include_nucleus = false);

struct EigenSystem {
  Eigen::VectorXd energies_hz;  // ascending
  ComplexMatrix vectors;        // column k belongs to energies_hz[k]

  Eigen::Index dim() const { return energies_hz.size(); }
};

class NonHermitianError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ascending eigenvalues and orthonormal eigenvectors. Each vector is
/// rotated so that its largest-magnitude component is real and positive.
EigenSystem eigensolve(const HamiltonianMatrix& h);

/// |alpha_ij|^2 = |<j0|i>|^2. Rows are eigenstates ordered by energy,
/// columns the zero-field states ordered (m_s = 0, -1, +1).
struct MixingMatrix {
  Manifold manifold = Manifold::ground;
  Eigen::Matrix3d alpha_sq = Eigen::Matrix3d::Identity();
};

/// m_s value of zero-field column j (0, -1, +1).
constexpr std::array<int, 3> kZeroFieldSpinProjection = {0, -1, +1};

MixingMatrix mixing_coefficients(const EigenSystem& eig, Manifold manifold);

/// Electron-only build + eigensolve + mixing in one call.
struct ManifoldSolution {
  EigenSystem eig;
  MixingMatrix mixing;
};
ManifoldSolution solve_manifold(const SpinSystemParams& params,
                                const FieldVector& field, Manifold manifold);

}  // namespace nvkin
