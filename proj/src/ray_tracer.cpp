#include "kcl/ray_tracer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kcl/error.hpp"

namespace kcl::rays {

namespace {

constexpr const char* kModule = "ray_tracer";

struct RayDerivative {
  double dx, dy, dtheta;
};

RayDerivative ray_rhs(const SpeedField2& field, double x, double y, double theta) {
  const double m = field.speed(x, y);
  if (!(m > 0.0)) throw Error(kModule, "invalid speed along ray");
  const Point2 grad = field.gradient(x, y);
  const double c = std::cos(theta), s = std::sin(theta);
  return {m * c, m * s, s * grad.x - c * grad.y};
}

RayPoint rk4_step(const SpeedField2& field, const RayPoint& p, double h) {
  const auto k1 = ray_rhs(field, p.x, p.y, p.theta);
  const auto k2 = ray_rhs(field, p.x + 0.5 * h * k1.dx, p.y + 0.5 * h * k1.dy,
                          p.theta + 0.5 * h * k1.dtheta);
  const auto k3 = ray_rhs(field, p.x + 0.5 * h * k2.dx, p.y + 0.5 * h * k2.dy,
                          p.theta + 0.5 * h * k2.dtheta);
  const auto k4 = ray_rhs(field, p.x + h * k3.dx, p.y + h * k3.dy, p.theta + h * k3.dtheta);
  RayPoint out;
  out.x = p.x + h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  out.y = p.y + h / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
  out.theta = normalize_angle(p.theta + h / 6.0 * (k1.dtheta + 2.0 * k2.dtheta +
                                                   2.0 * k3.dtheta + k4.dtheta));
  return out;
}

Point2 position(const RayPoint& p) { return {p.x, p.y}; }

Point2 tangent(double theta) { return {-std::sin(theta), std::cos(theta)}; }

// Normal angle of the segment a -> b, for a front traversed in increasing xi.
double segment_normal_angle(Point2 a, Point2 b) {
  const Point2 d = b - a;
  return std::atan2(-d.x, d.y);
}

}  // namespace

SpeedField2 SpeedField2::constant(double m0) {
  return {[m0](double, double) { return m0; }, [](double, double) { return Point2{}; }};
}

SpeedField2 SpeedField2::radial(double epsilon) {
  return {[epsilon](double x, double y) { return 1.0 + epsilon * std::hypot(x, y); },
          [epsilon](double x, double y) {
            const double r = std::hypot(x, y);
            if (r == 0.0) return Point2{};
            return Point2{epsilon * x / r, epsilon * y / r};
          }};
}

SpeedField2 SpeedField2::linear(double m0, double gx, double gy) {
  return {[=](double x, double y) { return m0 + gx * x + gy * y; },
          [=](double, double) { return Point2{gx, gy}; }};
}

void Front2::validate() const {
  if (points.size() < 3) throw Error(kModule, "front needs at least 3 points");
  if (!(xi_spacing > 0.0)) throw Error(kModule, "front needs positive xi spacing");
}

std::vector<TimedFront> trace_rays(const Front2& front0, const SpeedField2& field, double t_end,
                                   double dt, Exec exec) {
  front0.validate();
  if (!(dt > 0.0)) throw Error(kModule, "time step must be positive");
  if (t_end < 0.0) throw Error(kModule, "t_end must be non-negative");

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  std::vector<TimedFront> history;
  history.reserve(steps + 1);
  Front2 start = front0;
  for (auto& p : start.points) p.theta = normalize_angle(p.theta);
  history.push_back({0.0, std::move(start)});

  for (std::size_t k = 0; k < steps; ++k) {
    const TimedFront& prev = history.back();
    const double t_next = std::min(t_end, static_cast<double>(k + 1) * dt);
    const double h = t_next - prev.time;
    TimedFront next{t_next, prev.front};
    for_each_index(exec, next.front.size(), [&](std::size_t i) {
      next.front.points[i] = rk4_step(field, prev.front.points[i], h);
    });
    history.push_back(std::move(next));
  }
  return history;
}

Front2 huygens_step(const Front2& front, double m_const, double dt, double corner_angle) {
  front.validate();
  const double r = m_const * dt;
  const std::size_t n = front.size();
  Front2 out;
  out.xi_min = front.xi_min;
  out.xi_spacing = front.xi_spacing;
  out.closed = front.closed;

  auto displaced = [&](const RayPoint& p, double angle) {
    return RayPoint{p.x + r * std::cos(angle), p.y + r * std::sin(angle), normalize_angle(angle)};
  };

  for (std::size_t i = 0; i < n; ++i) {
    const RayPoint& p = front.points[i];
    const bool has_prev = front.closed || i > 0;
    const bool has_next = front.closed || i + 1 < n;
    if (!has_prev || !has_next) {
      out.points.push_back(displaced(p, p.theta));
      continue;
    }
    const RayPoint& prev = front.points[(i + n - 1) % n];
    const RayPoint& next = front.points[(i + 1) % n];
    const double in = segment_normal_angle(position(prev), position(p));
    const double turn = normalize_angle(segment_normal_angle(position(p), position(next)) - in);
    if (std::abs(turn) <= corner_angle) {
      out.points.push_back(displaced(p, p.theta));
      continue;
    }
    const auto pieces = static_cast<std::size_t>(std::ceil(std::abs(turn) / corner_angle));
    for (std::size_t k = 0; k <= pieces; ++k) {
      out.points.push_back(displaced(p, in + turn * static_cast<double>(k) / static_cast<double>(pieces)));
    }
  }
  return out;
}

ConsistencyReport check_ray_kcl_consistency(std::span<const TimedFront> history) {
  if (history.size() < 3) throw Error(kModule, "consistency check needs at least 3 snapshots");
  const Front2& f0 = history.front().front;
  f0.validate();
  const std::size_t n = f0.size();
  const bool closed = f0.closed;
  const double dxi = f0.xi_spacing;
  for (const auto& h : history) {
    if (h.front.size() != n) throw Error(kModule, "snapshots disagree on the number of rays");
  }

  const std::size_t i_begin = closed ? 0 : 1;
  const std::size_t i_end = closed ? n : n - 1;
  auto at = [&](std::size_t k, std::size_t i) -> const RayPoint& {
    return history[k].front.points[i % n];
  };
  auto left = [&](std::size_t i) { return (i + n - 1) % n; };

  auto metric = [&](std::size_t k, std::size_t i) {
    const Point2 d = position(at(k, i + 1)) - position(at(k, left(i)));
    const double along = dot(d, tangent(at(k, i).theta));
    if (!(along > 0.0)) throw Error(kModule, "front is singular, consistency undefined");
    return norm(d) / (2.0 * dxi);
  };
  auto speed = [&](std::size_t k, std::size_t i) {
    const Point2 d = position(at(k + 1, i)) - position(at(k - 1, i));
    return norm(d) / (history[k + 1].time - history[k - 1].time);
  };

  ConsistencyReport report;
  for (std::size_t k = 1; k + 1 < history.size(); ++k) {
    const double span_t = history[k + 1].time - history[k - 1].time;
    for (std::size_t i = i_begin; i < i_end; ++i) {
      const double g = metric(k, i);
      const double g_t = (metric(k + 1, i) - metric(k - 1, i)) / span_t;
      const double m = speed(k, i);
      const double theta_xi =
          normalize_angle(at(k, i + 1).theta - at(k, left(i)).theta) / (2.0 * dxi);
      const double theta_t = normalize_angle(at(k + 1, i).theta - at(k - 1, i).theta) / span_t;
      double m_xi = 0.0;
      if (closed || (i >= 1 && i + 1 < n)) {
        m_xi = (speed(k, (i + 1) % n) - speed(k, left(i))) / (2.0 * dxi);
      }
      report.g_residual = std::max(report.g_residual, std::abs(g_t - m * theta_xi));
      report.theta_residual = std::max(report.theta_residual, std::abs(theta_t + m_xi / g));
    }
  }
  return report;
}

std::optional<RayCrossing> first_ray_crossing(std::span<const TimedFront> history) {
  for (const auto& snap : history) {
    const auto& pts = snap.front.points;
    const std::size_t n = pts.size();
    const std::size_t pairs = snap.front.closed ? n : n - 1;
    for (std::size_t i = 0; i < pairs; ++i) {
      const RayPoint& a = pts[i];
      const RayPoint& b = pts[(i + 1) % n];
      const double mean = a.theta + 0.5 * normalize_angle(b.theta - a.theta);
      if (dot(position(b) - position(a), tangent(mean)) <= 0.0) {
        return RayCrossing{snap.time, i};
      }
    }
  }
  return std::nullopt;
}

Front2 circle_front(Point2 center, double radius, std::size_t n) {
  Front2 f;
  f.closed = true;
  f.xi_min = 0.0;
  f.xi_spacing = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = f.xi_spacing * static_cast<double>(i);
    f.points.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a),
                        normalize_angle(a)});
  }
  return f;
}

}  // namespace kcl::rays
