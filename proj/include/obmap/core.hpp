// Copyright 2026 the obmap authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "obmap/errors.hpp"

namespace obmap {

/// 3D point / vector, meters. Plain value type; finiteness is enforced at
/// the PointCloud boundary, not here, so intermediate arithmetic stays free.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Point3 operator+(const Point3& a, const Point3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Point3 operator-(const Point3& a, const Point3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Point3 operator*(double s, const Point3& p) { return {s * p.x, s * p.y, s * p.z}; }
  friend bool operator==(const Point3& a, const Point3& b) {
    return a.x == b.x && a.y == b.y && a.z == b.z;
  }
};

inline bool is_finite(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

inline double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Point3 cross(const Point3& a, const Point3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double squared_norm(const Point3& p) { return dot(p, p); }
inline double norm(const Point3& p) { return std::sqrt(squared_norm(p)); }

/// 2D point for floor-plane work (projections, grids, rasters).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

/// Rotate v counter-clockwise by angle (radians).
inline Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Ordered list of finite 3D points tagged with a frame of reference and a
/// timestamp. Insertion order is preserved; indices are stable.
///
/// Non-finite coordinates are rejected with InvalidArgument at insertion so
/// that sensor glitches surface to the caller instead of propagating NaNs.
class PointCloud {
 public:
  std::string frame_id;
  std::uint64_t stamp = 0;  ///< nanoseconds since epoch

  PointCloud() = default;
  PointCloud(std::string frame, std::uint64_t stamp_ns)
      : frame_id(std::move(frame)), stamp(stamp_ns) {}
  PointCloud(std::vector<Point3> points, std::string frame, std::uint64_t stamp_ns)
      : frame_id(std::move(frame)), stamp(stamp_ns), points_(std::move(points)) {
    for (const Point3& p : points_) {
      if (!is_finite(p)) throw InvalidArgument("PointCloud: non-finite point rejected");
    }
  }

  void push_back(const Point3& p) {
    if (!is_finite(p)) throw InvalidArgument("PointCloud: non-finite point rejected");
    points_.push_back(p);
  }

  void reserve(std::size_t n) { points_.reserve(n); }
  void clear() { points_.clear(); }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point3& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<Point3>& points() const { return points_; }

  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  /// New cloud with the same frame and stamp but no points.
  PointCloud empty_like() const { return PointCloud(frame_id, stamp); }

 private:
  std::vector<Point3> points_;
};

/// Unit quaternion, Hamilton convention (w + xi + yj + zk).
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

  Quaternion normalized() const {
    const double n = norm();
    if (n < 1e-300) throw InvalidArgument("Quaternion: cannot normalize zero quaternion");
    return {w / n, x / n, y / n, z / n};
  }

  Quaternion conjugate() const { return {w, -x, -y, -z}; }

  friend Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }

  /// Rotate a vector; assumes *this is unit length.
  Point3 rotate(const Point3& v) const {
    // q * (0, v) * q^-1, expanded.
    const Point3 u{x, y, z};
    const Point3 t = 2.0 * cross(u, v);
    return v + w * t + cross(u, t);
  }

  /// Row-major 3x3 rotation matrix; assumes unit length.
  std::array<double, 9> to_matrix() const {
    const double xx = x * x, yy = y * y, zz = z * z;
    const double xy = x * y, xz = x * z, yz = y * z;
    const double wx = w * x, wy = w * y, wz = w * z;
    return {1 - 2 * (yy + zz), 2 * (xy - wz),     2 * (xz + wy),
            2 * (xy + wz),     1 - 2 * (xx + zz), 2 * (yz - wx),
            2 * (xz - wy),     2 * (yz + wx),     1 - 2 * (xx + yy)};
  }

  static Quaternion from_yaw(double yaw) {
    return {std::cos(yaw / 2.0), 0.0, 0.0, std::sin(yaw / 2.0)};
  }

  static Quaternion from_axis_angle(const Point3& axis, double angle) {
    const double n = obmap::norm(axis);
    if (n < 1e-300) throw InvalidArgument("Quaternion: zero rotation axis");
    const double s = std::sin(angle / 2.0) / n;
    return {std::cos(angle / 2.0), s * axis.x, s * axis.y, s * axis.z};
  }
};

/// Rigid motion mapping points from child_frame into parent_frame.
/// The rotation is normalized on construction.
struct RigidTransform {
  Quaternion rotation;
  Point3 translation;
  std::string parent_frame;
  std::string child_frame;

  RigidTransform() = default;
  RigidTransform(const Quaternion& q, const Point3& t, std::string parent, std::string child)
      : rotation(q.normalized()),
        translation(t),
        parent_frame(std::move(parent)),
        child_frame(std::move(child)) {}

  static RigidTransform identity(std::string parent, std::string child) {
    return RigidTransform(Quaternion{}, Point3{}, std::move(parent), std::move(child));
  }

  Point3 apply(const Point3& p) const { return rotation.rotate(p) + translation; }
};

/// Inverse motion: maps parent_frame back into child_frame.
inline RigidTransform inverse(const RigidTransform& tf) {
  const Quaternion r = tf.rotation.conjugate();
  const Point3 t = r.rotate(tf.translation);
  return RigidTransform(r, {-t.x, -t.y, -t.z}, tf.child_frame, tf.parent_frame);
}

/// compose(a, b) applies b first, then a; requires a.child_frame == b.parent_frame.
inline RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  if (a.child_frame != b.parent_frame) {
    throw FrameMismatch("compose: chain break, '" + a.child_frame + "' vs '" + b.parent_frame +
                        "'");
  }
  return RigidTransform(a.rotation * b.rotation, a.rotation.rotate(b.translation) + a.translation,
                        a.parent_frame, b.child_frame);
}

/// Transform every point of a cloud into tf.parent_frame. Order and stamp
/// are preserved. Throws FrameMismatch unless cloud.frame_id == tf.child_frame.
inline PointCloud transform_cloud(const PointCloud& cloud, const RigidTransform& tf) {
  if (cloud.frame_id != tf.child_frame) {
    throw FrameMismatch("transform_cloud: cloud frame '" + cloud.frame_id +
                        "' does not match transform child frame '" + tf.child_frame + "'");
  }
  const std::array<double, 9> m = tf.rotation.to_matrix();
  PointCloud out(tf.parent_frame, cloud.stamp);
  out.reserve(cloud.size());
  for (const Point3& p : cloud) {
    out.push_back({m[0] * p.x + m[1] * p.y + m[2] * p.z + tf.translation.x,
                   m[3] * p.x + m[4] * p.y + m[5] * p.z + tf.translation.y,
                   m[6] * p.x + m[7] * p.y + m[8] * p.z + tf.translation.z});
  }
  return out;
}

/// Plane {p : normal . p + d = 0} with |normal| == 1 and a deterministic sign:
/// normal.z >= 0, ties broken toward positive x then positive y.
struct Plane {
  Point3 normal{0.0, 0.0, 1.0};
  double d = 0.0;

  static Plane make(const Point3& n, double d) {
    const double len = norm(n);
    if (len < 1e-300) throw InvalidArgument("Plane: zero normal");
    Point3 u = (1.0 / len) * n;
    double dd = d / len;
    const bool flip = u.z < 0.0 || (u.z == 0.0 && (u.x < 0.0 || (u.x == 0.0 && u.y < 0.0)));
    if (flip) {
      u = {-u.x, -u.y, -u.z};
      dd = -dd;
    }
    return Plane{u, dd};
  }

  /// Through three points; throws DegenerateInput when they are collinear.
  static Plane through(const Point3& a, const Point3& b, const Point3& c) {
    const Point3 n = cross(b - a, c - a);
    if (norm(n) < 1e-12) throw DegenerateInput("Plane: collinear points");
    return make(n, -dot(n, a));
  }

  double signed_distance(const Point3& p) const { return dot(normal, p) + d; }
  double distance(const Point3& p) const { return std::abs(signed_distance(p)); }
  /// Angle between the plane normal and the vertical axis, radians.
  double tilt() const { return std::acos(std::clamp(normal.z, -1.0, 1.0)); }
};

/// Oriented 3D box on the floor plane: yaw-only rotation about the vertical axis.
///
/// Footprint convention: `length` spans the axis (cos yaw, sin yaw) and
/// `width` spans the perpendicular (-sin yaw, cos yaw). The constructor
/// canonicalizes any input yaw into [0, pi/2) by reducing modulo pi and, when
/// the reduction crosses an odd multiple of pi/2, swapping length and width,
/// so the footprint a Detection describes never changes under normalization.
class Detection {
 public:
  Detection(const Point3& center, double length, double width, double height, double yaw,
            std::size_t point_count, std::uint32_t cluster_id)
      : center_(center),
        length_(length),
        width_(width),
        height_(height),
        point_count_(point_count),
        cluster_id_(cluster_id) {
    if (!is_finite(center)) throw InvalidArgument("Detection: non-finite center");
    if (!(length > 0.0) || !(width > 0.0) || !(height > 0.0)) {
      throw InvalidArgument("Detection: extents must be strictly positive");
    }
    if (!std::isfinite(yaw)) throw InvalidArgument("Detection: non-finite yaw");
    if (point_count == 0) throw InvalidArgument("Detection: point_count must be positive");
    constexpr double half_pi = std::numbers::pi / 2.0;
    double a = std::fmod(yaw, std::numbers::pi);
    if (a < 0.0) a += std::numbers::pi;
    if (a >= half_pi) {
      a -= half_pi;
      std::swap(length_, width_);
    }
    if (a >= half_pi) a = 0.0;  // guard fmod edge at exactly pi/2
    yaw_ = a;
  }

  const Point3& center() const { return center_; }
  double length() const { return length_; }
  double width() const { return width_; }
  double height() const { return height_; }
  double yaw() const { return yaw_; }
  std::size_t point_count() const { return point_count_; }
  std::uint32_t cluster_id() const { return cluster_id_; }

  /// Footprint corners in the floor plane, counter-clockwise.
  std::array<Vec2, 4> footprint_corners() const {
    const Vec2 u{std::cos(yaw_), std::sin(yaw_)};
    const Vec2 v{-u.y, u.x};
    const Vec2 c{center_.x, center_.y};
    const Vec2 du = (length_ / 2.0) * u;
    const Vec2 dv = (width_ / 2.0) * v;
    return {c + du + dv, c - du + dv, c - du - dv, c + du - dv};
  }

  /// Closed point-in-footprint test (boundary counts as inside).
  bool footprint_contains(const Vec2& p, double slack = 0.0) const {
    const Vec2 u{std::cos(yaw_), std::sin(yaw_)};
    const Vec2 v{-u.y, u.x};
    const Vec2 r = p - Vec2{center_.x, center_.y};
    return std::abs(dot(r, u)) <= length_ / 2.0 + slack &&
           std::abs(dot(r, v)) <= width_ / 2.0 + slack;
  }

 private:
  Point3 center_;
  double length_;
  double width_;
  double height_;
  double yaw_ = 0.0;
  std::size_t point_count_;
  std::uint32_t cluster_id_;
};

}  // namespace obmap
