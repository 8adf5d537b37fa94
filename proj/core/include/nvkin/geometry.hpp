#pragma once

// Sample-rotation geometry for a (100)-type plate (normal [001] here) glued
// so that a <110> face diagonal lies along the rotation axis. Coordinates are
// the cubic crystal axes.

#include <array>

#include <Eigen/Dense>

namespace nvkin {

struct CrystalMount {
  double rotation_angle_rad = 0.0;
  // Angle between the plate edge [100] and the rotation axis; 45 deg puts
  // [110] on the axis.
  double mount_tilt_rad = 0.7853981633974483;
};

/// The four <111> NV axes, unit length.
const std::array<Eigen::Vector3d, 4>& nv_axes();

/// Rotation axis of the mount; the static field is always perpendicular to it.
Eigen::Vector3d rotation_axis(const CrystalMount& mount);

/// Static-field direction in crystal coordinates. Rotation 0 puts the field
/// along the plate normal [001].
Eigen::Vector3d static_field_direction(const CrystalMount& mount);

/// Angle from the field to each NV axis, folded into [0, pi/2].
std::array<double, 4> nv_orientation_angles(const CrystalMount& mount);

/// Rotation angle that puts the field on the [1,-1,1] axis at the 45 deg
/// mount tilt.
double rotation_for_111();

/// Components of a lab drive direction in the frame of one NV axis (z along
/// the axis, x toward the static field's transverse part).
Eigen::Vector3d drive_axis_in_nv_frame(const Eigen::Vector3d& nv_axis,
                                       const Eigen::Vector3d& field_dir,
                                       const Eigen::Vector3d& drive_dir);

}  // namespace nvkin
