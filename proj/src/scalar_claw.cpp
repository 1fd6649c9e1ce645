#include "kcl/scalar_claw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kcl/error.hpp"
#include "kcl/geometry.hpp"

namespace kcl::scalar {

namespace {

constexpr const char* kModule = "scalar_claw";

double godunov_flux(const ScalarClaw& claw, double u_l, double u_r) {
  if (u_l > u_r) return std::max(claw.flux(u_l), claw.flux(u_r));
  // Minimum of a convex flux over [u_l, u_r]: an endpoint unless a(u)
  // changes sign inside, in which case the sonic point.
  if (claw.char_speed(u_l) >= 0.0) return claw.flux(u_l);
  if (claw.char_speed(u_r) <= 0.0) return claw.flux(u_r);
  double lo = u_l, hi = u_r;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (claw.char_speed(mid) < 0.0 ? lo : hi) = mid;
  }
  return claw.flux(0.5 * (lo + hi));
}

double rusanov_flux(const ScalarClaw& claw, double u_l, double u_r) {
  const double alpha = std::max(std::abs(claw.char_speed(u_l)), std::abs(claw.char_speed(u_r)));
  return 0.5 * (claw.flux(u_l) + claw.flux(u_r)) -
         0.5 * alpha * (claw.density(u_r) - claw.density(u_l));
}

}  // namespace

double ScalarClaw::invert_density(double w, double guess) const {
  if (density_inverse) return density_inverse(w);
  double u = guess;
  for (int it = 0; it < 60; ++it) {
    const double r = density(u) - w;
    if (std::abs(r) <= 1e-14 * (1.0 + std::abs(w))) return u;
    const double d = density_deriv(u);
    if (d == 0.0) break;
    u -= r / d;
  }
  throw Error(kModule, "density inversion failed");
}

ScalarClaw ScalarClaw::burgers() {
  ScalarClaw c;
  c.density = [](double u) { return u; };
  c.flux = [](double u) { return 0.5 * u * u; };
  c.density_deriv = [](double) { return 1.0; };
  c.flux_deriv = [](double u) { return u; };
  c.density_inverse = [](double w) { return w; };
  c.shape = FluxShape::convex;
  return c;
}

ScalarClaw ScalarClaw::linear_advection(double speed) {
  ScalarClaw c;
  c.density = [](double u) { return u; };
  c.flux = [speed](double u) { return speed * u; };
  c.density_deriv = [](double) { return 1.0; };
  c.flux_deriv = [speed](double) { return speed; };
  c.density_inverse = [](double w) { return w; };
  c.shape = FluxShape::convex;
  return c;
}

ScalarClaw ScalarClaw::cubic() {
  ScalarClaw c;
  c.density = [](double u) { return u; };
  c.flux = [](double u) { return u * u * u / 3.0; };
  c.density_deriv = [](double) { return 1.0; };
  c.flux_deriv = [](double u) { return u * u; };
  c.density_inverse = [](double w) { return w; };
  c.shape = FluxShape::general;
  return c;
}

void Grid1::validate() const {
  if (!(x_min < x_max)) throw Error(kModule, "grid needs x_min < x_max");
  if (n_cells < 2) throw Error(kModule, "grid needs at least 2 cells");
}

double rh_speed(const ScalarClaw& claw, double u_l, double u_r) {
  const double jump_h = claw.density(u_l) - claw.density(u_r);
  if (jump_h == 0.0) throw Error(kModule, "no jump in conserved density");
  return (claw.flux(u_l) - claw.flux(u_r)) / jump_h;
}

bool lax_admissible(const ScalarClaw& claw, double u_l, double u_r, double s) {
  return claw.char_speed(u_r) < s && s < claw.char_speed(u_l);
}

double numerical_flux(const ScalarClaw& claw, double u_l, double u_r) {
  return claw.shape == FluxShape::convex ? godunov_flux(claw, u_l, u_r)
                                         : rusanov_flux(claw, u_l, u_r);
}

std::vector<ScalarSnapshot> evolve_scalar(const ScalarClaw& claw, const Grid1& grid,
                                          std::vector<double> u0, double t_end,
                                          const ScalarOptions& options) {
  grid.validate();
  if (u0.size() != grid.n_cells) throw Error(kModule, "initial data size does not match grid");
  if (!(options.cfl > 0.0 && options.cfl < 1.0)) throw Error(kModule, "cfl must lie in (0, 1)");
  for (double v : u0) {
    if (!std::isfinite(v)) throw Error(kModule, "initial data must be finite");
  }

  const std::size_t n = grid.n_cells;
  const double dx = grid.dx();
  const bool periodic = grid.boundary == Boundary1::periodic;
  auto cell = [&](const std::vector<double>& u, std::ptrdiff_t i) {
    const auto count = static_cast<std::ptrdiff_t>(n);
    if (periodic) return u[static_cast<std::size_t>(((i % count) + count) % count)];
    return u[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, count - 1))];
  };

  std::vector<ScalarSnapshot> out;
  out.push_back({0.0, u0});
  std::vector<double> u = std::move(u0), next(n), flux(n + 1), conserved(n);
  double t = 0.0;
  double next_snap = options.snap_every > 0.0 ? options.snap_every : t_end;

  while (t < t_end) {
    const double amax =
        max_over(options.exec, n, [&](std::size_t i) { return std::abs(claw.char_speed(u[i])); });
    const double target = std::min(t_end, next_snap);
    double dt = amax > 0.0 ? options.cfl * dx / amax : target - t;
    bool reached = false;
    if (t + dt >= target) {
      dt = target - t;
      reached = true;
    }
    if (dt < options.dt_floor) throw Error(kModule, "time step underflow");

    for_each_index(options.exec, n + 1, [&](std::size_t k) {
      const auto ik = static_cast<std::ptrdiff_t>(k);
      flux[k] = numerical_flux(claw, cell(u, ik - 1), cell(u, ik));
    });
    for_each_index(options.exec, n, [&](std::size_t i) {
      const double w = claw.density(u[i]) - dt / dx * (flux[i + 1] - flux[i]);
      next[i] = claw.invert_density(w, u[i]);
    });
    for (double v : next) {
      if (!std::isfinite(v)) throw Error(kModule, "non-finite state");
    }
    u.swap(next);
    t = reached ? target : t + dt;
    if (reached && target == next_snap) next_snap = std::min(t_end, next_snap + options.snap_every);

    if (options.snap_every <= 0.0 || reached) out.push_back({t, u});
  }
  if (out.back().time != t_end) out.push_back({t_end, u});
  return out;
}

double total_density(const ScalarClaw& claw, const Grid1& grid, std::span<const double> u) {
  double sum = 0.0;
  for (double v : u) sum += claw.density(v);
  return sum * grid.dx();
}

double steepest_interface(const Grid1& grid, std::span<const double> u) {
  std::size_t best = 1;
  double steepest = -1.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double d = std::abs(u[i + 1] - u[i]);
    if (d > steepest) {
      steepest = d;
      best = i + 1;
    }
  }
  return grid.interface(best);
}

double measure_shock_speed(const Grid1& grid, std::span<const ScalarSnapshot> snapshots) {
  if (snapshots.size() < 4) throw Error(kModule, "too few snapshots to fit a shock speed");
  const double t_half = 0.5 * snapshots.back().time;
  std::vector<double> times, positions;
  for (const auto& s : snapshots) {
    if (s.time < t_half) continue;
    times.push_back(s.time);
    positions.push_back(steepest_interface(grid, s.u));
  }
  return least_squares_slope(times, positions);
}

EulerSpeeds euler_char_speeds(double rho, double q, double p, double gamma) {
  if (!(rho > 0.0) || !(p > 0.0) || !(gamma > 0.0)) {
    throw Error(kModule, "invalid thermodynamic state");
  }
  const double a = std::sqrt(gamma * p / rho);
  return {q - a, q, q + a};
}

}  // namespace kcl::scalar
