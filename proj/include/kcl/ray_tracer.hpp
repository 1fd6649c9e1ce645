#ifndef KCL_RAY_TRACER_HPP_
#define KCL_RAY_TRACER_HPP_

// Linear ray theory in the plane: a front moves along its normal with speed
// m(x, y) and each point follows the characteristic system
//   x' = m cos(theta), y' = m sin(theta),
//   theta' = -(-sin(theta) d/dx + cos(theta) d/dy) m
// so rays bend towards slower regions and theta_t = -m_xi / g on the front.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kcl/exec.hpp"
#include "kcl/geometry.hpp"

namespace kcl::rays {

struct SpeedField2 {
  std::function<double(double, double)> speed;
  std::function<Point2(double, double)> gradient;

  static SpeedField2 constant(double m0);
  /// m = 1 + epsilon * r
  static SpeedField2 radial(double epsilon);
  /// m = m0 + gx * x + gy * y
  static SpeedField2 linear(double m0, double gx, double gy);
};

/// A point on the front with the direction theta of its ray (normal).
struct RayPoint {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// Front sampled at uniform xi; the tangent in the direction of increasing
/// xi is (-sin(theta), cos(theta)).
struct Front2 {
  std::vector<RayPoint> points;
  double xi_min = 0.0;
  double xi_spacing = 1.0;
  bool closed = false;

  std::size_t size() const { return points.size(); }
  void validate() const;
};

struct TimedFront {
  double time = 0.0;
  Front2 front;
};

/// Fixed-step RK4 on every ray. Entry k of the result is the front at
/// min(k dt, t_end); point i of every entry lies on the same ray.
std::vector<TimedFront> trace_rays(const Front2& front0, const SpeedField2& field, double t_end,
                                   double dt, Exec exec = Exec::parallel);

/// Huygens construction for a constant speed. Vertices where the segment
/// direction turns by more than corner_angle are replaced by an arc of
/// radius m dt centred on the vertex.
Front2 huygens_step(const Front2& front, double m_const, double dt, double corner_angle = 0.05);

struct ConsistencyReport {
  double g_residual = 0.0;      // max |g_t - m theta_xi|
  double theta_residual = 0.0;  // max |theta_t + m_xi / g|
};

/// Checks the ray-coordinate forms g_t = m theta_xi and theta_t = -m_xi / g on
/// a history with uniform time spacing, using central differences. The speed
/// m is taken from the ray displacement between snapshots.
ConsistencyReport check_ray_kcl_consistency(std::span<const TimedFront> history);

struct RayCrossing {
  double time = 0.0;
  std::size_t index = 0;  // rays index and index + 1 crossed
};

/// First snapshot in which neighbouring rays have swapped order along the front.
std::optional<RayCrossing> first_ray_crossing(std::span<const TimedFront> history);

/// Circle of radius r with outward normals, xi = polar angle.
Front2 circle_front(Point2 center, double radius, std::size_t n);

}  // namespace kcl::rays

#endif  // KCL_RAY_TRACER_HPP_
