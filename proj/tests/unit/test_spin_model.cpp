#include <doctest.h>

#include <cmath>

#include "nvkin/spin_model.hpp"
#include "test_support.hpp"

using namespace nvkin;
using nvkin::test::Gen;

namespace {

const double kR2 = 1.0 / std::sqrt(2.0);

// Spin-1 matrices written out in the (+1, 0, -1) basis.
Matrix3c sx_ref() {
  Matrix3c m;
  m << 0, kR2, 0, kR2, 0, kR2, 0, kR2, 0;
  return m;
}
Matrix3c sy_ref() {
  const Complex i(0, 1);
  Matrix3c m;
  m << 0, -i * kR2, 0, i * kR2, 0, -i * kR2, 0, i * kR2, 0;
  return m;
}
Matrix3c sz_ref() { return Eigen::Vector3cd(1, 0, -1).asDiagonal(); }

Matrix3c electron_ref(double d, double gamma, const FieldVector& f) {
  const double st = std::sin(f.polar_angle_rad), ct = std::cos(f.polar_angle_rad);
  const double bx = f.magnitude_t * st * std::cos(f.azimuth_rad);
  const double by = f.magnitude_t * st * std::sin(f.azimuth_rad);
  const double bz = f.magnitude_t * ct;
  const Matrix3c sz = sz_ref();
  return d * (sz * sz + (2.0 / 3.0) * Matrix3c::Identity()) +
         gamma * (bx * sx_ref() + by * sy_ref() + bz * sz);
}

ComplexMatrix kron(const Matrix3c& a, const Matrix3c& b) {
  ComplexMatrix k(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) k(3 * i + p, 3 * j + q) = a(i, j) * b(p, q);
  return k;
}

// det(H - x) for a 3x3 Hermitian H, from its trace invariants.
double char_poly(const ComplexMatrix& h, double x) {
  const double t1 = h.trace().real();
  const double t2 = (h * h).trace().real();
  const double det = h.determinant().real();
  return -x * x * x + t1 * x * x - 0.5 * (t1 * t1 - t2) * x + det;
}

}  // namespace

TEST_CASE("spin operators satisfy the angular momentum algebra") {
  const auto s = spin_operators();
  const Complex i(0, 1);
  CHECK((s.sx * s.sy - s.sy * s.sx - i * s.sz).norm() < 1e-14);
  CHECK((s.sy * s.sz - s.sz * s.sy - i * s.sx).norm() < 1e-14);
  CHECK((s.sz * s.sx - s.sx * s.sz - i * s.sy).norm() < 1e-14);
  const Matrix3c s2 = s.sx * s.sx + s.sy * s.sy + s.sz * s.sz;
  CHECK((s2 - 2.0 * Matrix3c::Identity()).norm() < 1e-14);
  CHECK((s.sx - sx_ref()).norm() < 1e-15);
  CHECK((s.sy - sy_ref()).norm() < 1e-15);
  CHECK((s.sz - sz_ref()).norm() < 1e-15);
  CHECK_THROWS_AS(spin_operators(0.5), std::invalid_argument);
  CHECK(sz_basis_index(+1) == 0);
  CHECK(sz_basis_index(0) == 1);
  CHECK(sz_basis_index(-1) == 2);
}

TEST_CASE("parameters and fields reject unphysical input") {
  SpinSystemParams p;
  CHECK_NOTHROW(p.validate());
  p.g_factor = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.d_es_hz = p.d_gs_hz + 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.temperature_k = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  CHECK_THROWS(FieldVector{-0.1, 0.0, 0.0}.validate());
  CHECK_THROWS(FieldVector::from_degrees(0.1, 91.0).validate());
  CHECK_NOTHROW(FieldVector::from_degrees(0.1, 90.0).validate());
  const auto f = FieldVector::from_degrees(0.3, 60.0);
  CHECK(f.cartesian().x() == doctest::Approx(0.3 * std::sin(constants::pi / 3)));
  CHECK(f.cartesian().z() == doctest::Approx(0.15));
}

TEST_CASE("Hamiltonian matches a hand-built operator sum") {
  const SpinSystemParams p;
  const double g = p.gyromagnetic_hz_per_tesla();
  CHECK(g == doctest::Approx(27.99e9).epsilon(1e-3));
  Gen gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    FieldVector f = gen.field();
    f.azimuth_rad = gen.uniform(0.0, 2 * constants::pi);
    for (Manifold m : {Manifold::ground, Manifold::excited}) {
      const auto h = build_hamiltonian(p, f, m);
      const Matrix3c ref = electron_ref(p.zero_field_splitting(m), g, f);
      CHECK(h.dim() == 3);
      CHECK((h.entries - ref).norm() <= 1e-12 * ref.norm());
      CHECK(h.is_hermitian());
    }
  }
}

TEST_CASE("nuclear Hamiltonian adds the axial hyperfine tensor") {
  const SpinSystemParams p;
  const auto f = FieldVector::from_degrees(0.25, 33.0);
  const auto h = build_hamiltonian(p, f, Manifold::ground, true);
  REQUIRE(h.dim() == 9);
  CHECK(h.is_hermitian());
  const Matrix3c id = Matrix3c::Identity();
  const ComplexMatrix ref =
      kron(electron_ref(p.d_gs_hz, p.gyromagnetic_hz_per_tesla(), f), id) +
      p.hyperfine_par_hz * kron(sz_ref(), sz_ref()) +
      p.hyperfine_perp_hz * (kron(sx_ref(), sx_ref()) + kron(sy_ref(), sy_ref()));
  CHECK((h.entries - ref).norm() <= 1e-12 * ref.norm());
  CHECK_THROWS_AS(build_hamiltonian(p, f, Manifold::excited, true), std::invalid_argument);
}

TEST_CASE("aligned field gives closed-form diagonal energies") {
  const SpinSystemParams p;
  const double g = p.gyromagnetic_hz_per_tesla();
  const double b = 0.03;
  const auto eig = eigensolve(build_hamiltonian(p, {b, 0.0, 0.0}, Manifold::ground));
  const double d = p.d_gs_hz;
  CHECK(eig.energies_hz[0] == doctest::Approx(2.0 * d / 3.0));
  CHECK(eig.energies_hz[1] == doctest::Approx(5.0 * d / 3.0 - g * b));
  CHECK(eig.energies_hz[2] == doctest::Approx(5.0 * d / 3.0 + g * b));
  const auto mix = mixing_coefficients(eig, Manifold::ground);
  CHECK((mix.alpha_sq - Eigen::Matrix3d::Identity()).norm() < 1e-15);
}

TEST_CASE("eigensolve: residual, orthonormality, order and phase (property)") {
  const SpinSystemParams p;
  Gen gen(23);
  for (int trial = 0; trial < 200; ++trial) {
    CAPTURE(trial);
    FieldVector f = gen.field();
    f.azimuth_rad = gen.uniform(0.0, 2 * constants::pi);
    const Manifold m = trial % 2 ? Manifold::excited : Manifold::ground;
    const auto h = build_hamiltonian(p, f, m, trial % 5 == 0 && m == Manifold::ground);
    const auto e = eigensolve(h);
    const double scale = h.entries.norm();
    for (Eigen::Index k = 0; k < e.dim(); ++k) {
      const auto v = e.vectors.col(k);
      CHECK((h.entries * v - e.energies_hz[k] * v).norm() <= 1e-12 * scale);
      if (k > 0) CHECK(e.energies_hz[k] >= e.energies_hz[k - 1]);
      Eigen::Index arg = 0;
      v.cwiseAbs().maxCoeff(&arg);
      CHECK(std::abs(v[arg].imag()) <= 1e-12);
      CHECK(v[arg].real() > 0.0);
    }
    const ComplexMatrix gram = e.vectors.adjoint() * e.vectors;
    CHECK((gram - ComplexMatrix::Identity(e.dim(), e.dim())).norm() < 1e-12);
    if (e.dim() == 3) {
      // Independent check: each eigenvalue is a root of the characteristic polynomial.
      for (Eigen::Index k = 0; k < 3; ++k) {
        CHECK(std::abs(char_poly(h.entries, e.energies_hz[k])) <= 1e-10 * std::pow(scale, 3));
      }
    }
  }
}

TEST_CASE("eigensolve rejects non-Hermitian input") {
  HamiltonianMatrix h{ComplexMatrix::Identity(3, 3)};
  h.entries(0, 1) = 1.0;
  CHECK_THROWS_AS(eigensolve(h), NonHermitianError);
}

TEST_CASE("mixing table is doubly stochastic (property)") {
  const SpinSystemParams p;
  Gen gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = gen.field();
    for (Manifold m : {Manifold::ground, Manifold::excited}) {
      const auto s = solve_manifold(p, f, m);
      CHECK(s.mixing.manifold == m);
      const Eigen::Matrix3d& a = s.mixing.alpha_sq;
      CHECK(a.minCoeff() >= 0.0);
      CHECK((a.rowwise().sum() - Eigen::Vector3d::Ones()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((a.colwise().sum() - Eigen::RowVector3d::Ones()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("off-axis field mixes the zero-field states") {
  const SpinSystemParams p;
  const auto s = solve_manifold(p, FieldVector::from_degrees(0.23, 70.5), Manifold::ground);
  CHECK(s.mixing.alpha_sq.rowwise().maxCoeff().maxCoeff() < 0.95);
  // Above the crossing the lowest state is mostly m_s = -1 at theta = 0.
  const auto high = solve_manifold(p, {0.2, 0.0, 0.0}, Manifold::ground);
  CHECK(high.mixing.alpha_sq(0, 1) == doctest::Approx(1.0));
  CHECK(kZeroFieldSpinProjection[1] == -1);
}
