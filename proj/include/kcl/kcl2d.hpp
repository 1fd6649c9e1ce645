#ifndef KCL_KCL2D_HPP_
#define KCL_KCL2D_HPP_

// Two-dimensional kinematical conservation laws in ray coordinates (xi, t):
//
//   (g sin(theta))_t + (m cos(theta))_xi = 0
//   (g cos(theta))_t - (m sin(theta))_xi = 0
//
// solved by a conservative finite-volume scheme with the Rusanov (local
// Lax-Friedrichs) flux. A closure supplies m.

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "kcl/closure.hpp"
#include "kcl/exec.hpp"
#include "kcl/geometry.hpp"
#include "kcl/kinks.hpp"
#include "kcl/ray_tracer.hpp"

namespace kcl {

enum class Boundary2 { periodic, extrapolate };

struct XiGrid {
  double xi_min = 0.0;
  double spacing = 1.0;
  std::size_t cells = 0;
  Boundary2 boundary = Boundary2::periodic;

  double xi_max() const { return xi_min + spacing * static_cast<double>(cells); }
  double center(std::size_t i) const { return xi_min + (static_cast<double>(i) + 0.5) * spacing; }
  double interface(std::size_t k) const { return xi_min + static_cast<double>(k) * spacing; }
  double period() const { return spacing * static_cast<double>(cells); }
};

/// Cell averages of the front speed m, ray angle theta and metric g. theta is
/// stored unwrapped along xi.
struct KclState2 {
  XiGrid grid;
  std::vector<double> m;
  std::vector<double> theta;
  std::vector<double> g;
  double time = 0.0;

  std::size_t size() const { return g.size(); }
  void validate() const;
};

/// h1 = g sin(theta), h2 = g cos(theta)
struct ConservedPair {
  std::vector<double> h1;
  std::vector<double> h2;
};

/// f1 = m cos(theta), f2 = -m sin(theta); the laws read h_t + f_xi = 0.
struct FluxPair {
  std::vector<double> f1;
  std::vector<double> f2;
};

ConservedPair to_conserved(const KclState2& state);

/// Polar inversion g = |h|, theta = atan2(h1, h2). theta of the first cell is
/// taken on the branch nearest theta_reference and the rest are unwrapped.
KclState2 from_conserved(const ConservedPair& pair, std::vector<double> m, const XiGrid& grid,
                         double time = 0.0, double theta_reference = 0.0);

FluxPair kcl_flux(const KclState2& state);

Closure init_closure(ClosureKind kind, const KclState2& state0);
std::vector<double> update_m(const Closure& closure, const KclState2& state);

enum class Reconstruction { first_order, muscl };

struct StepOptions {
  double cfl = 0.45;
  Reconstruction reconstruction = Reconstruction::first_order;
  Exec exec = Exec::parallel;
  double max_dt = std::numeric_limits<double>::infinity();
};

struct StepResult {
  KclState2 state;
  double dt = 0.0;
  // Largest cell wave speed before the safety factor.
  double lambda_max = 0.0;
  // Time-averaged numerical ray velocity (x_t, y_t) at the xi_min interface.
  Point2 anchor_velocity;
};

/// Largest singular value of the numerical flux Jacobian d f / d h of one cell.
double cell_wave_speed(const Closure& closure, std::size_t cell, double h1, double h2, double m);

StepResult advance(const KclState2& state, const Closure& closure, const StepOptions& options = {});
KclState2 step(const KclState2& state, const Closure& closure, double cfl);

struct EvolveOptions {
  double cfl = 0.45;
  // Snapshot spacing; 0 keeps only the initial and final states.
  double snap_every = 0.0;
  Reconstruction reconstruction = Reconstruction::first_order;
  Exec exec = Exec::parallel;
  double kink_threshold = 0.05;
  // Physical position of the xi_min end of the initial front.
  Point2 anchor;
  std::size_t max_steps = 100'000'000;
};

struct Snapshot2 {
  KclState2 state;
  Point2 anchor;
  std::size_t step = 0;
};

struct EvolveResult {
  std::vector<Snapshot2> snapshots;
  std::vector<KinkRecord> kinks;
  std::vector<KinkTrack> tracks;
  std::size_t steps = 0;
};

EvolveResult evolve(const KclState2& state0, const Closure& closure, double t_end,
                    const EvolveOptions& options = {});

struct Pair {
  double first = 0.0;
  double second = 0.0;
};

/// (int h1 dxi, int h2 dxi) over [xi_l, xi_r], partial cells pro-rated.
Pair conserved_integral(const KclState2& state, double xi_l, double xi_r);

/// Front through the cell interfaces: starts at the anchor (xi_min) and adds
/// (-h1, h2) dxi per cell, the exact integral of the cell averages of x_xi.
rays::Front2 reconstruct_front(const KclState2& state, Point2 anchor);

}  // namespace kcl

#endif  // KCL_KCL2D_HPP_
