#ifndef KCL_GEOMETRY_HPP_
#define KCL_GEOMETRY_HPP_

#include <cmath>
#include <numbers>
#include <span>

namespace kcl {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }

/// Maps an angle to (-pi, pi].
inline double normalize_angle(double angle) {
  constexpr double pi = std::numbers::pi;
  double r = std::remainder(angle, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

/// Least-squares slope of y against x. Needs at least two distinct x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

}  // namespace kcl

#endif  // KCL_GEOMETRY_HPP_
