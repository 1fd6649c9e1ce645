#ifndef KCL_SCALAR_CLAW_HPP_
#define KCL_SCALAR_CLAW_HPP_

// One-dimensional scalar conservation law H(u)_t + F(u)_x = 0: jump speeds,
// Lax admissibility, a first-order monotone finite-volume solver, and the
// characteristic speeds of the polytropic Euler equations.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "kcl/exec.hpp"

namespace kcl::scalar {

/// convex: a(u) = F'(u)/H'(u) is increasing and H' > 0, so the exact
/// Godunov flux is used. general: local Lax-Friedrichs.
enum class FluxShape { convex, general };

struct ScalarClaw {
  std::function<double(double)> density;        // H
  std::function<double(double)> flux;           // F
  std::function<double(double)> density_deriv;  // H'
  std::function<double(double)> flux_deriv;     // F'
  FluxShape shape = FluxShape::general;
  // Optional closed-form inverse of H; Newton on H otherwise.
  std::function<double(double)> density_inverse;

  double char_speed(double u) const { return flux_deriv(u) / density_deriv(u); }
  double invert_density(double w, double guess) const;

  static ScalarClaw burgers();
  static ScalarClaw linear_advection(double c);
  static ScalarClaw cubic();  // H = u, F = u^3 / 3
};

enum class Boundary1 { periodic, outflow };

struct Grid1 {
  double x_min = 0.0;
  double x_max = 1.0;
  std::size_t n_cells = 2;
  Boundary1 boundary = Boundary1::outflow;

  double dx() const { return (x_max - x_min) / static_cast<double>(n_cells); }
  double center(std::size_t i) const { return x_min + (static_cast<double>(i) + 0.5) * dx(); }
  double interface(std::size_t k) const { return x_min + static_cast<double>(k) * dx(); }
  void validate() const;
};

struct ScalarSnapshot {
  double time = 0.0;
  std::vector<double> u;
};

/// Rankine-Hugoniot speed ([F] / [H]).
double rh_speed(const ScalarClaw& claw, double u_l, double u_r);

/// Lax condition a(u_r) < S < a(u_l). Only meaningful when a(u) is increasing
/// between the two states; that is the caller's responsibility.
bool lax_admissible(const ScalarClaw& claw, double u_l, double u_r, double s);

/// Interface flux used by evolve_scalar.
double numerical_flux(const ScalarClaw& claw, double u_l, double u_r);

struct ScalarOptions {
  double cfl = 0.45;
  // Snapshot spacing in time; 0 records every step.
  double snap_every = 0.0;
  double dt_floor = 1e-12;
  Exec exec = Exec::parallel;
};

/// Returns snapshots starting with the initial data and ending at t_end.
std::vector<ScalarSnapshot> evolve_scalar(const ScalarClaw& claw, const Grid1& grid,
                                          std::vector<double> u0, double t_end,
                                          const ScalarOptions& options = {});

/// sum_i H(u_i) dx
double total_density(const ScalarClaw& claw, const Grid1& grid, std::span<const double> u);

/// Interface position carrying the largest |u_{i+1} - u_i|.
double steepest_interface(const Grid1& grid, std::span<const double> u);

/// Shock speed from a least-squares fit of steepest_interface over the last
/// half of the run.
double measure_shock_speed(const Grid1& grid, std::span<const ScalarSnapshot> snapshots);

struct EulerSpeeds {
  double c1, c2, c3;
};

/// (q - a, q, q + a) with a^2 = gamma p / rho.
EulerSpeeds euler_char_speeds(double rho, double q, double p, double gamma);

}  // namespace kcl::scalar

#endif  // KCL_SCALAR_CLAW_HPP_
