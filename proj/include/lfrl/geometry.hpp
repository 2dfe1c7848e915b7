#pragma once

// Rigid camera poses and constant-velocity trajectories.
//
// Axes: z is the optical axis, x points right and y up. A Pose maps points
// from the moved (virtual) camera frame into the reference light-field
// frame: q' = R q + T.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "lfrl/errors.hpp"
#include "lfrl/light_field.hpp"

namespace lfrl {

// [Tx, Ty, Tz, Rx, Ry, Rz] per unit exposure.
struct Velocity6 {
  double tx = 0, ty = 0, tz = 0;
  double rx = 0, ry = 0, rz = 0;

  Eigen::Vector3d translation() const { return {tx, ty, tz}; }
  Eigen::Vector3d rotation() const { return {rx, ry, rz}; }
  bool is_zero() const { return tx == 0 && ty == 0 && tz == 0 && rx == 0 && ry == 0 && rz == 0; }
  bool finite() const {
    return std::isfinite(tx) && std::isfinite(ty) && std::isfinite(tz) && std::isfinite(rx) &&
           std::isfinite(ry) && std::isfinite(rz);
  }
  Velocity6 operator*(double k) const { return {tx * k, ty * k, tz * k, rx * k, ry * k, rz * k}; }
  bool operator==(const Velocity6&) const = default;
};

struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose identity() { return {}; }

  Eigen::Vector3d apply(const Eigen::Vector3d& q) const { return rotation * q + translation; }

  Pose inverse() const {
    Pose p;
    p.rotation = rotation.transpose();
    p.translation = -(p.rotation * translation);
    return p;
  }

  bool is_identity() const {
    return rotation == Eigen::Matrix3d::Identity() && translation == Eigen::Vector3d::Zero();
  }
};

// a * b applies b first, then a.
inline Pose operator*(const Pose& a, const Pose& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

// Rotation is the exponential of the skew matrix of the rotation vector.
inline Pose pose_from_rotation_vector(const Eigen::Vector3d& rotvec, const Eigen::Vector3d& translation) {
  Pose p;
  p.translation = translation;
  const double angle = rotvec.norm();
  if (angle > 0) p.rotation = Eigen::AngleAxisd(angle, rotvec / angle).toRotationMatrix();
  return p;
}

inline Pose pose_from_velocity(const Velocity6& v, double t) {
  if (t == 0) return Pose::identity();
  return pose_from_rotation_vector(t * v.rotation(), t * v.translation());
}

struct Trajectory {
  std::vector<Pose> poses;
  std::size_t size() const { return poses.size(); }
};

// Endpoint-inclusive sampling of t over [-0.5, 0.5]; N = 1 is the centre pose.
inline std::vector<double> trajectory_times(int n) {
  if (n <= 0) throw std::invalid_argument("trajectory needs at least one step");
  if (n == 1) return {0.0};
  std::vector<double> ts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ts[static_cast<std::size_t>(i)] = -0.5 + static_cast<double>(i) / (n - 1);
  // Keep the symmetric midpoint exact for odd N.
  if (n % 2 == 1) ts[static_cast<std::size_t>(n / 2)] = 0.0;
  return ts;
}

inline Trajectory discretize(const Velocity6& v, int n) {
  Trajectory traj;
  for (double t : trajectory_times(n)) traj.poses.push_back(pose_from_velocity(v, t));
  return traj;
}

inline Trajectory reverse(const Trajectory& traj) {
  Trajectory out;
  out.poses.reserve(traj.size());
  for (auto it = traj.poses.rbegin(); it != traj.poses.rend(); ++it) out.poses.push_back(it->inverse());
  return out;
}

inline Ray transform_ray(const Pose& p, const Ray& ray, double plane_sep) {
  if (p.is_identity()) return canonicalize(ray, plane_sep);
  return canonicalize(Ray{p.apply(ray.p0), p.apply(ray.p1)}, plane_sep);
}

inline Ray transform_ray(const Pose& p, const Ray& ray, const Intrinsics& in) {
  return transform_ray(p, ray, in.plane_sep);
}

inline Velocity6 parse_velocity(const std::string& text) {
  std::vector<double> xs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      xs.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("velocity component '" + item + "' is not a number");
    }
  }
  if (xs.size() == 1 && xs[0] == 0) return {};
  if (xs.size() != 6) throw ConfigError("velocity needs six comma-separated values, got '" + text + "'");
  Velocity6 v{xs[0], xs[1], xs[2], xs[3], xs[4], xs[5]};
  if (!v.finite()) throw ConfigError("velocity must be finite");
  return v;
}

// Explicit pose list: one pose per line as "tx ty tz rx ry rz" (translation,
// then rotation vector). Blank lines and '#' comments are ignored.
inline Trajectory read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  Trajectory traj;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    double x[6];
    int n = 0;
    while (n < 6 && ls >> x[n]) ++n;
    if (n == 0 && ls.eof()) continue;
    std::string rest;
    if (n != 6 || (ls >> rest)) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected six numbers");
    }
    traj.poses.push_back(pose_from_rotation_vector({x[3], x[4], x[5]}, {x[0], x[1], x[2]}));
  }
  if (traj.poses.empty()) throw ConfigError(path + ": no poses");
  return traj;
}

}  // namespace lfrl
