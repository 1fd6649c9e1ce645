#ifndef KCL_KCL3D_HPP_
#define KCL_KCL3D_HPP_

// Three-dimensional kinematical conservation laws for smooth surfaces
//
//   U_t - (m n)_xi1 = 0,   V_t - (m n)_xi2 = 0,   n = U x V / |U x V|
//
// with U = g1 u and V = g2 v the tangent vectors along the two ray
// coordinate families. Smooth regime only: no kink-line capturing.

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kcl/closure.hpp"
#include "kcl/exec.hpp"

namespace kcl {

using Vec3 = Eigen::Vector3d;

enum class Boundary3 { periodic, extrapolate };

struct Grid3 {
  double xi1_min = 0.0;
  double xi2_min = 0.0;
  double spacing1 = 1.0;
  double spacing2 = 1.0;
  std::size_t cells1 = 0;
  std::size_t cells2 = 0;
  Boundary3 boundary1 = Boundary3::periodic;
  Boundary3 boundary2 = Boundary3::periodic;

  double center1(std::size_t i) const { return xi1_min + (static_cast<double>(i) + 0.5) * spacing1; }
  double center2(std::size_t j) const { return xi2_min + (static_cast<double>(j) + 0.5) * spacing2; }
  std::size_t index(std::size_t i, std::size_t j) const { return j * cells1 + i; }
  std::size_t size() const { return cells1 * cells2; }
  double cell_area() const { return spacing1 * spacing2; }
};

/// Point values at cell centres, stored row-major in xi1.
struct KclState3 {
  Grid3 grid;
  std::vector<Vec3> U;
  std::vector<Vec3> V;
  std::vector<double> m;
  double time = 0.0;

  std::size_t size() const { return U.size(); }
  void validate() const;
  Vec3 normal(std::size_t cell) const;
};

/// u x v / |u x v|
Vec3 normal3(const Vec3& u, const Vec3& v);

/// |U x V|, the front area per unit xi1 xi2.
std::vector<double> ray_tube_area(const KclState3& state);

/// The wnlrt closure uses the ray tube area in place of the 2-D metric.
Closure init_closure(ClosureKind kind, const KclState3& state0);

struct Step3Options {
  double cfl = 0.45;
  Exec exec = Exec::parallel;
  double max_dt = std::numeric_limits<double>::infinity();
};

struct Step3Result {
  KclState3 state;
  double dt = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

/// Largest singular value of d(m n)/dU, or of d(m n)/dV when along_v is set.
double cell_wave_speed3(const Closure& closure, std::size_t cell, const Vec3& U, const Vec3& V,
                        double m, bool along_v);

/// One forward Euler step; U takes Rusanov fluxes across xi1 faces and V
/// across xi2 faces.
Step3Result advance3(const KclState3& state, const Closure& closure, const Step3Options& options = {});
KclState3 step3(const KclState3& state, const Closure& closure, double cfl);

struct SolenoidalResidual {
  std::vector<Vec3> field;
  double max_norm = 0.0;
};

/// Central differences of V_xi1 - U_xi2. Extrapolated edges use one-sided
/// differences.
SolenoidalResidual solenoidal_residual(const KclState3& state, Exec exec = Exec::parallel);

/// Largest angle between the normals of two cells at most three apart along
/// either grid direction.
double max_normal_turn(const KclState3& state, Exec exec = Exec::parallel);

struct Evolve3Options {
  double cfl = 0.45;
  double snap_every = 0.0;
  Exec exec = Exec::parallel;
  // Physical position of the centre of cell (0, 0).
  Vec3 anchor = Vec3::Zero();
  double max_normal_turn = 0.5;
  std::size_t max_steps = 100'000'000;
};

struct Snapshot3 {
  KclState3 state;
  Vec3 anchor = Vec3::Zero();
  std::size_t step = 0;
  double residual_max = 0.0;
};

struct Evolve3Result {
  std::vector<Snapshot3> snapshots;
  std::size_t steps = 0;
  bool stopped = false;
  std::string diagnostic;
};

/// Runs to t_end unless normals turn by more than max_normal_turn, in which
/// case the run stops, keeps the last state as a snapshot and explains why.
Evolve3Result evolve3(const KclState3& state0, const Closure& closure, double t_end,
                      const Evolve3Options& options = {});

struct Surface {
  std::size_t cells1 = 0;
  std::size_t cells2 = 0;
  std::vector<Vec3> points;  // at cell centres, same layout as the state
  // Largest gap between row-then-column and column-then-row integration.
  double loop_defect = 0.0;
  // Cell area times the summed staggered solenoidal residual.
  double defect_bound = 0.0;
};

/// Trapezoid integration of U along the first row, then of V up each column.
Surface reconstruct_surface(const KclState3& state, const Vec3& anchor);

struct SpeedField3 {
  std::function<double(const Vec3&)> speed;
  std::function<Vec3(const Vec3&)> gradient;

  static SpeedField3 constant(double m0);
  static SpeedField3 linear(double m0, const Vec3& slope);
};

struct RayState3 {
  Vec3 x = Vec3::Zero();
  Vec3 n = Vec3::UnitZ();
};

/// RK4 step of x_t = m n, n_t = -(grad m - n (n . grad m)); n renormalised.
RayState3 ray_step3(const RayState3& ray, const SpeedField3& field, double dt);

}  // namespace kcl

#endif  // KCL_KCL3D_HPP_
