#include "nvkin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nvkin {

const std::array<Eigen::Vector3d, 4>& nv_axes() {
  static const std::array<Eigen::Vector3d, 4> axes = [] {
    const double r = 1.0 / std::sqrt(3.0);
    return std::array<Eigen::Vector3d, 4>{
        Eigen::Vector3d{r, r, r}, Eigen::Vector3d{r, -r, -r},
        Eigen::Vector3d{-r, r, -r}, Eigen::Vector3d{-r, -r, r}};
  }();
  return axes;
}

Eigen::Vector3d rotation_axis(const CrystalMount& mount) {
  return {std::cos(mount.mount_tilt_rad), std::sin(mount.mount_tilt_rad), 0.0};
}

Eigen::Vector3d static_field_direction(const CrystalMount& mount) {
  const Eigen::Vector3d normal{0.0, 0.0, 1.0};
  // In-plane direction perpendicular to the rotation axis.
  const Eigen::Vector3d w{std::sin(mount.mount_tilt_rad), -std::cos(mount.mount_tilt_rad), 0.0};
  return std::cos(mount.rotation_angle_rad) * normal + std::sin(mount.rotation_angle_rad) * w;
}

std::array<double, 4> nv_orientation_angles(const CrystalMount& mount) {
  const Eigen::Vector3d b = static_field_direction(mount);
  std::array<double, 4> out{};
  for (std::size_t k = 0; k < 4; ++k) {
    const double c = std::clamp(nv_axes()[k].dot(b), -1.0, 1.0);
    // Axis inversion leaves the Hamiltonian unchanged.
    out[k] = std::acos(std::abs(c));
  }
  return out;
}

double rotation_for_111() {
  const CrystalMount m{};
  const Eigen::Vector3d target = Eigen::Vector3d{1.0, -1.0, 1.0}.normalized();
  const Eigen::Vector3d normal{0.0, 0.0, 1.0};
  const Eigen::Vector3d w{std::sin(m.mount_tilt_rad), -std::cos(m.mount_tilt_rad), 0.0};
  return std::atan2(target.dot(w), target.dot(normal));
}

Eigen::Vector3d drive_axis_in_nv_frame(const Eigen::Vector3d& nv_axis,
                                       const Eigen::Vector3d& field_dir,
                                       const Eigen::Vector3d& drive_dir) {
  if (nv_axis.norm() == 0.0 || drive_dir.norm() == 0.0) {
    throw std::invalid_argument("NV axis and drive direction must be non-zero");
  }
  const Eigen::Vector3d z = nv_axis.normalized();
  Eigen::Vector3d x = field_dir - field_dir.dot(z) * z;
  if (x.norm() < 1e-12) {
    // Field along the axis: any transverse x works; pick one deterministically.
    x = std::abs(z.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    x -= x.dot(z) * z;
  }
  x.normalize();
  const Eigen::Vector3d y = z.cross(x);
  const Eigen::Vector3d d = drive_dir.normalized();
  return {d.dot(x), d.dot(y), d.dot(z)};
}

}  // namespace nvkin
