#include "nvkin/spin_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "nvkin/constants.hpp"

namespace nvkin {

const char* to_string(Manifold m) {
  return m == Manifold::ground ? "ground" : "excited";
}

void SpinSystemParams::validate() const {
  if (!(d_es_hz > 0.0) || !(d_gs_hz > d_es_hz)) {
    throw std::invalid_argument("zero-field splittings must satisfy d_gs > d_es > 0");
  }
  if (!(g_factor > 0.0)) throw std::invalid_argument("g factor must be positive");
  if (!(temperature_k > 0.0)) throw std::invalid_argument("temperature must be positive");
  if (!std::isfinite(hyperfine_par_hz) || !std::isfinite(hyperfine_perp_hz)) {
    throw std::invalid_argument("hyperfine constants must be finite");
  }
}

double SpinSystemParams::gyromagnetic_hz_per_tesla() const {
  return constants::gyromagnetic_hz_per_tesla(g_factor);
}

FieldVector FieldVector::from_degrees(double magnitude_t, double theta_deg) {
  return FieldVector{magnitude_t, constants::deg_to_rad(theta_deg), 0.0};
}

void FieldVector::validate() const {
  if (!(magnitude_t >= 0.0) || !std::isfinite(magnitude_t)) {
    throw std::invalid_argument("field magnitude must be finite and >= 0");
  }
  // Small slack so that deg_to_rad(90) passes.
  if (!(polar_angle_rad >= 0.0) || polar_angle_rad > constants::pi / 2 + 1e-12) {
    throw std::invalid_argument("polar angle must lie in [0, pi/2]");
  }
}

Eigen::Vector3d FieldVector::cartesian() const {
  const double st = std::sin(polar_angle_rad);
  return {magnitude_t * st * std::cos(azimuth_rad),
          magnitude_t * st * std::sin(azimuth_rad),
          magnitude_t * std::cos(polar_angle_rad)};
}

SpinOperators spin_operators(double spin_quantum_number) {
  if (spin_quantum_number != 1.0) {
    throw std::invalid_argument("only spin 1 operators are supported, got " +
                                std::to_string(spin_quantum_number));
  }
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i{0.0, 1.0};
  SpinOperators ops;
  ops.sx << 0, r, 0,
            r, 0, r,
            0, r, 0;
  ops.sy << 0, -i * r, 0,
            i * r, 0, -i * r,
            0, i * r, 0;
  ops.sz << 1, 0, 0,
            0, 0, 0,
            0, 0, -1;
  return ops;
}

bool HamiltonianMatrix::is_hermitian(double relative_tol) const {
  if (entries.rows() != entries.cols()) return false;
  const double scale = std::max(entries.cwiseAbs().maxCoeff(), 1e-300);
  const double dev = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  return dev <= relative_tol * scale;
}

namespace {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

bool is_diagonal(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != Complex{0.0, 0.0}) return false;
    }
  }
  return true;
}

void fix_phase(ComplexMatrix& vectors) {
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      // Ties resolved toward the lower index; the 1e-12 slack keeps the choice
      // stable under round-off.
      const double mag = std::abs(vectors(i, k));
      if (mag > best_mag * (1.0 + 1e-12)) {
        best = i;
        best_mag = mag;
      }
    }
    const Complex pivot = vectors(best, k);
    const Complex rot = std::conj(pivot) / std::abs(pivot);
    vectors.col(k) *= rot;
    vectors(best, k) = Complex{vectors(best, k).real(), 0.0};
  }
}

}  // namespace

HamiltonianMatrix build_hamiltonian(const SpinSystemParams& params,
                                    const FieldVector& field, Manifold manifold,
                                    bool include_nucleus) {
  params.validate();
  field.validate();
  if (include_nucleus && manifold != Manifold::ground) {
    throw std::invalid_argument("hyperfine term is only supported for the ground manifold");
  }

  const auto s = spin_operators(1.0);
  const Matrix3c id3 = Matrix3c::Identity();
  const double d = params.zero_field_splitting(manifold);
  const double gamma = params.gyromagnetic_hz_per_tesla();
  const Eigen::Vector3d b = field.cartesian();

  // The constant +2/3 shift follows the published form; it only offsets
  // all levels uniformly.
  Matrix3c electron = d * (s.sz * s.sz + (2.0 / 3.0) * id3) +
                      gamma * (b.x() * s.sx + b.y() * s.sy + b.z() * s.sz);

  HamiltonianMatrix h;
  if (!include_nucleus) {
    h.entries = electron;
  } else {
    const auto n = spin_operators(1.0);  // 14N, I = 1
    h.entries = kron(electron, id3);
    h.entries += params.hyperfine_perp_hz * (kron(s.sx, n.sx) + kron(s.sy, n.sy));
    h.entries += params.hyperfine_par_hz * kron(s.sz, n.sz);
  }
  // Enforce exact Hermiticity against round-off in the complex products.
  h.entries = 0.5 * (h.entries + h.entries.adjoint()).eval();
  return h;
}

EigenSystem eigensolve(const HamiltonianMatrix& h) {
  if (h.entries.rows() == 0 || h.entries.rows() != h.entries.cols()) {
    throw std::invalid_argument("eigensolve needs a non-empty square matrix");
  }
  if (!h.is_hermitian(1e-12)) {
    throw NonHermitianError("eigensolve input is not Hermitian");
  }

  const Eigen::Index n = h.dim();
  EigenSystem out;

  if (is_diagonal(h.entries)) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return h.entries(a, a).real() < h.entries(b, b).real();
    });
    out.energies_hz.resize(n);
    out.vectors = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto src = order[static_cast<std::size_t>(k)];
      out.energies_hz[k] = h.entries(src, src).real();
      out.vectors(src, k) = 1.0;
    }
    return out;
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.entries);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Hermitian eigensolver failed to converge");
  }
  out.energies_hz = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  fix_phase(out.vectors);
  return out;
}

MixingMatrix mixing_coefficients(const EigenSystem& eig, Manifold manifold) {
  if (eig.dim() != 3 || eig.vectors.rows() != 3 || eig.vectors.cols() != 3) {
    throw std::invalid_argument("mixing coefficients need an electron-only 3x3 eigensystem");
  }
  MixingMatrix mix;
  mix.manifold = manifold;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int row = sz_basis_index(kZeroFieldSpinProjection[static_cast<std::size_t>(j)]);
      mix.alpha_sq(i, j) = std::norm(eig.vectors(row, i));
    }
  }
  return mix;
}

ManifoldSolution solve_manifold(const SpinSystemParams& params,
                                const FieldVector& field, Manifold manifold) {
  ManifoldSolution sol;
  sol.eig = eigensolve(build_hamiltonian(params, field, manifold, false));
  sol.mixing = mixing_coefficients(sol.eig, manifold);
  return sol;
}

}  // namespace nvkin
