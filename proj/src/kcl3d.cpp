#include "kcl/kcl3d.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/Dense>

#include "kcl/error.hpp"

namespace kcl {

namespace {

constexpr const char* kModule = "kcl3d";
constexpr double kSafety = 1.2;
constexpr double kSpeedFloor = 1e-12;
constexpr double kFrameTolerance = 1e-10;

// Cell values, or linearly extrapolated ghosts one cell past an
// extrapolated edge.
class Lattice {
 public:
  explicit Lattice(const Grid3& grid) : grid_(grid) {}

  // Returns the owning cell of (i, j) and, for a ghost, the inner neighbour
  // used for the extrapolation.
  struct Site {
    std::size_t cell;
    std::optional<std::size_t> mirror;
  };

  Site site(std::ptrdiff_t i, std::ptrdiff_t j) const {
    std::optional<std::ptrdiff_t> mi, mj;
    const std::ptrdiff_t ci = resolve(i, grid_.cells1, grid_.boundary1, mi);
    const std::ptrdiff_t cj = resolve(j, grid_.cells2, grid_.boundary2, mj);
    Site s{grid_.index(static_cast<std::size_t>(ci), static_cast<std::size_t>(cj)), std::nullopt};
    if (mi || mj) {
      s.mirror = grid_.index(static_cast<std::size_t>(mi.value_or(ci)),
                             static_cast<std::size_t>(mj.value_or(cj)));
    }
    return s;
  }

  template <class T>
  T value(const std::vector<T>& field, const Site& s) const {
    if (!s.mirror) return field[s.cell];
    return T(2.0 * field[s.cell] - field[*s.mirror]);
  }

 private:
  static std::ptrdiff_t resolve(std::ptrdiff_t i, std::size_t cells, Boundary3 boundary,
                                std::optional<std::ptrdiff_t>& mirror) {
    const auto n = static_cast<std::ptrdiff_t>(cells);
    if (boundary == Boundary3::periodic) return ((i % n) + n) % n;
    if (i < 0) {
      mirror = std::min<std::ptrdiff_t>(1, n - 1);
      return 0;
    }
    if (i >= n) {
      mirror = std::max<std::ptrdiff_t>(n - 2, 0);
      return n - 1;
    }
    return i;
  }

  const Grid3& grid_;
};

Vec3 speed_normal(const Closure& closure, std::size_t cell, const Vec3& U, const Vec3& V, double guess,
                  double* m_out = nullptr) {
  const Vec3 c = U.cross(V);
  const double area = c.norm();
  if (!(area > kFrameTolerance * U.norm() * V.norm()) || !std::isfinite(area)) {
    throw Error(kModule, "degenerate tangent frame");
  }
  const double m = closure.speed(cell, area, guess);
  if (m_out) *m_out = m;
  return (m / area) * c;
}

void check_metrics(const Vec3& U, const Vec3& V) {
  const double gu = U.norm(), gv = V.norm();
  if (!(gu > 0.0) || !(gv > 0.0) || !std::isfinite(gu) || !std::isfinite(gv)) {
    throw Error(kModule, "metric collapse");
  }
}

}  // namespace

void KclState3::validate() const {
  const std::size_t n = grid.size();
  if (grid.cells1 < 2 || grid.cells2 < 2) throw Error(kModule, "state needs at least 2x2 cells");
  if (!(grid.spacing1 > 0.0) || !(grid.spacing2 > 0.0)) throw Error(kModule, "xi spacing must be positive");
  if (U.size() != n || V.size() != n || m.size() != n) throw Error(kModule, "state arrays do not match the grid");
  for (std::size_t c = 0; c < n; ++c) {
    check_metrics(U[c], V[c]);
    if (!(m[c] > 0.0) || !std::isfinite(m[c])) throw Error(kModule, "front speed must be positive");
    const Vec3 u = U[c].normalized(), v = V[c].normalized();
    if (!(u.cross(v).norm() > kFrameTolerance)) throw Error(kModule, "degenerate tangent frame");
  }
}

Vec3 KclState3::normal(std::size_t cell) const { return normal3(U[cell], V[cell]); }

Vec3 normal3(const Vec3& u, const Vec3& v) {
  const Vec3 c = u.cross(v);
  const double norm = c.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(kModule, "degenerate tangent frame");
  return c / norm;
}

std::vector<double> ray_tube_area(const KclState3& state) {
  std::vector<double> a(state.size());
  for (std::size_t c = 0; c < state.size(); ++c) a[c] = state.U[c].cross(state.V[c]).norm();
  return a;
}

Closure init_closure(ClosureKind kind, const KclState3& state0) {
  state0.validate();
  if (kind == ClosureKind::wnlrt) return Closure::wnlrt(ray_tube_area(state0), state0.m);
  const double m0 = state0.m.front();
  for (double m : state0.m) {
    if (std::abs(m - m0) > 1e-12 * m0) throw Error("closure", "constant_m closure needs uniform m");
  }
  return Closure::constant(m0);
}

double cell_wave_speed3(const Closure& closure, std::size_t cell, const Vec3& U, const Vec3& V,
                        double m, bool along_v) {
  const Vec3& W = along_v ? V : U;
  const double g = W.norm();
  const double delta = 1e-3 * g;
  Eigen::Matrix3d frame;
  frame.col(0) = W / g;
  frame.col(2) = normal3(U, V);
  frame.col(1) = frame.col(2).cross(frame.col(0));
  Eigen::Matrix3d J;
  for (int k = 0; k < 3; ++k) {
    const Vec3 d = delta * frame.col(k);
    const Vec3 plus = along_v ? speed_normal(closure, cell, U, V + d, m) : speed_normal(closure, cell, U + d, V, m);
    const Vec3 minus = along_v ? speed_normal(closure, cell, U, V - d, m) : speed_normal(closure, cell, U - d, V, m);
    J.col(k) = (plus - minus) / (2.0 * delta);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig;
  eig.computeDirect(J.transpose() * J, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(eig.eigenvalues()(2), 0.0));
}

Step3Result advance3(const KclState3& state, const Closure& closure, const Step3Options& options) {
  if (!(options.cfl > 0.0 && options.cfl < 1.0)) throw Error(kModule, "cfl must lie in (0, 1)");
  const Grid3& grid = state.grid;
  const std::size_t n1 = grid.cells1, n2 = grid.cells2, n = grid.size();
  const Lattice lattice(grid);

  std::vector<Vec3> mn(n);
  std::vector<double> lambda1(n), lambda2(n);
  for_each_index(options.exec, n, [&](std::size_t c) {
    mn[c] = speed_normal(closure, c, state.U[c], state.V[c], state.m[c]);
    lambda1[c] = cell_wave_speed3(closure, c, state.U[c], state.V[c], state.m[c], false);
    lambda2[c] = cell_wave_speed3(closure, c, state.U[c], state.V[c], state.m[c], true);
  });
  double l1 = 0.0, l2 = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    l1 = std::max(l1, lambda1[c]);
    l2 = std::max(l2, lambda2[c]);
  }
  if (!(l1 > 0.0 || l2 > 0.0)) throw Error(kModule, "degenerate system");
  const double rate = kSafety * (l1 / grid.spacing1 + l2 / grid.spacing2);
  const double dt = std::min(options.cfl / std::max(rate, kSpeedFloor), options.max_dt);
  if (!(dt > 0.0)) throw Error(kModule, "non-positive time step");

  // Flux-carrying state at a site: ghosts get their own m n.
  auto site_flux = [&](const Lattice::Site& s) -> Vec3 {
    if (!s.mirror) return mn[s.cell];
    return speed_normal(closure, s.cell, lattice.value(state.U, s), lattice.value(state.V, s),
                        state.m[s.cell]);
  };

  // Rusanov face values P with U_t = dP/dxi1 and V_t = dQ/dxi2: U is
  // updated across xi1 faces only and V across xi2 faces only.
  auto face = [&](std::ptrdiff_t i, std::ptrdiff_t j, int dir) -> Vec3 {
    const Lattice::Site l = dir == 1 ? lattice.site(i - 1, j) : lattice.site(i, j - 1);
    const Lattice::Site r = lattice.site(i, j);
    const std::vector<double>& lam = dir == 1 ? lambda1 : lambda2;
    const std::vector<Vec3>& W = dir == 1 ? state.U : state.V;
    const double lambda = std::max(lam[l.cell], lam[r.cell]);
    return 0.5 * (site_flux(l) + site_flux(r)) + 0.5 * lambda * (lattice.value(W, r) - lattice.value(W, l));
  };

  // Faces are stored per direction: (n1 + 1) x n2 and n1 x (n2 + 1).
  std::vector<Vec3> faces1((n1 + 1) * n2), faces2(n1 * (n2 + 1));
  for_each_index(options.exec, n2, [&](std::size_t j) {
    for (std::size_t i = 0; i <= n1; ++i) {
      faces1[j * (n1 + 1) + i] = face(static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(j), 1);
    }
  });
  for_each_index(options.exec, n2 + 1, [&](std::size_t j) {
    for (std::size_t i = 0; i < n1; ++i) {
      faces2[j * n1 + i] = face(static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(j), 2);
    }
  });

  Step3Result result;
  KclState3& next = result.state;
  next.grid = grid;
  next.time = state.time + dt;
  next.U.resize(n);
  next.V.resize(n);
  next.m.resize(n);
  const double r1 = dt / grid.spacing1, r2 = dt / grid.spacing2;
  for_each_index(options.exec, n, [&](std::size_t c) {
    const std::size_t i = c % n1, j = c / n1;
    next.U[c] = state.U[c] + r1 * (faces1[j * (n1 + 1) + i + 1] - faces1[j * (n1 + 1) + i]);
    next.V[c] = state.V[c] + r2 * (faces2[(j + 1) * n1 + i] - faces2[j * n1 + i]);
    check_metrics(next.U[c], next.V[c]);
    const double area = next.U[c].cross(next.V[c]).norm();
    if (!(area > 0.0)) throw Error(kModule, "degenerate tangent frame");
    next.m[c] = closure.speed(c, area, state.m[c]);
  });
  result.dt = dt;
  result.lambda1 = l1;
  result.lambda2 = l2;
  return result;
}

KclState3 step3(const KclState3& state, const Closure& closure, double cfl) {
  Step3Options options;
  options.cfl = cfl;
  return advance3(state, closure, options).state;
}

SolenoidalResidual solenoidal_residual(const KclState3& state, Exec exec) {
  const Grid3& grid = state.grid;
  const Lattice lattice(grid);
  SolenoidalResidual out;
  out.field.resize(grid.size());
  for_each_index(exec, grid.size(), [&](std::size_t c) {
    const auto i = static_cast<std::ptrdiff_t>(c % grid.cells1);
    const auto j = static_cast<std::ptrdiff_t>(c / grid.cells1);
    const Vec3 dv = (lattice.value(state.V, lattice.site(i + 1, j)) -
                     lattice.value(state.V, lattice.site(i - 1, j))) /
                    (2.0 * grid.spacing1);
    const Vec3 du = (lattice.value(state.U, lattice.site(i, j + 1)) -
                     lattice.value(state.U, lattice.site(i, j - 1))) /
                    (2.0 * grid.spacing2);
    out.field[c] = dv - du;
  });
  for (const Vec3& r : out.field) out.max_norm = std::max(out.max_norm, r.norm());
  return out;
}

double max_normal_turn(const KclState3& state, Exec exec) {
  const Grid3& grid = state.grid;
  std::vector<Vec3> normals(grid.size());
  for_each_index(exec, grid.size(), [&](std::size_t c) { normals[c] = state.normal(c); });
  auto angle = [](const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); };
  return max_over(exec, grid.size(), [&](std::size_t c) {
    const std::size_t i = c % grid.cells1, j = c / grid.cells1;
    double worst = 0.0;
    for (std::size_t k = 1; k <= 3; ++k) {
      std::size_t ii = i + k, jj = j + k;
      if (ii >= grid.cells1) {
        if (grid.boundary1 == Boundary3::periodic) ii %= grid.cells1;
        else ii = grid.cells1;
      }
      if (jj >= grid.cells2) {
        if (grid.boundary2 == Boundary3::periodic) jj %= grid.cells2;
        else jj = grid.cells2;
      }
      if (ii < grid.cells1) worst = std::max(worst, angle(normals[c], normals[grid.index(ii, j)]));
      if (jj < grid.cells2) worst = std::max(worst, angle(normals[c], normals[grid.index(i, jj)]));
    }
    return worst;
  });
}

Evolve3Result evolve3(const KclState3& state0, const Closure& closure, double t_end,
                      const Evolve3Options& options) {
  state0.validate();
  if (!(t_end > state0.time)) throw Error(kModule, "t_end must exceed the initial time");
  Evolve3Result result;
  KclState3 state = state0;
  Vec3 anchor = options.anchor;

  auto record = [&]() {
    result.snapshots.push_back(
        {state, anchor, result.steps, solenoidal_residual(state, options.exec).max_norm});
  };
  auto smooth = [&]() {
    const double turn = max_normal_turn(state, options.exec);
    if (turn <= options.max_normal_turn) return true;
    std::ostringstream msg;
    msg << "normals turn by " << turn << " rad within 3 cells at t = " << state.time
        << ": kink formation, outside the smooth regime";
    result.stopped = true;
    result.diagnostic = msg.str();
    return false;
  };

  record();
  if (!smooth()) return result;

  std::size_t snap_index = 1;
  auto snap_time = [&](std::size_t k) {
    return options.snap_every > 0.0 ? state0.time + options.snap_every * static_cast<double>(k) : t_end;
  };
  Step3Options step_options;
  step_options.cfl = options.cfl;
  step_options.exec = options.exec;
  while (state.time < t_end) {
    if (result.steps >= options.max_steps) throw Error(kModule, "step limit exceeded");
    const double target = std::min(snap_time(snap_index), t_end);
    step_options.max_dt = target - state.time;
    const Vec3 velocity = state.m[0] * state.normal(0);
    Step3Result r = advance3(state, closure, step_options);
    anchor += r.dt * velocity;
    const bool reached = r.dt >= step_options.max_dt;
    state = std::move(r.state);
    ++result.steps;
    if (reached) state.time = target;
    if (!smooth()) {
      record();
      return result;
    }
    if (reached) {
      record();
      ++snap_index;
    }
  }
  return result;
}

Surface reconstruct_surface(const KclState3& state, const Vec3& anchor) {
  const Grid3& grid = state.grid;
  const std::size_t n1 = grid.cells1, n2 = grid.cells2;
  const double d1 = grid.spacing1, d2 = grid.spacing2;
  auto U = [&](std::size_t i, std::size_t j) -> const Vec3& { return state.U[grid.index(i, j)]; };
  auto V = [&](std::size_t i, std::size_t j) -> const Vec3& { return state.V[grid.index(i, j)]; };

  Surface s;
  s.cells1 = n1;
  s.cells2 = n2;
  s.points.resize(grid.size());
  std::vector<Vec3> other(grid.size());
  s.points[0] = other[0] = anchor;
  for (std::size_t i = 1; i < n1; ++i) {
    s.points[grid.index(i, 0)] = s.points[grid.index(i - 1, 0)] + 0.5 * d1 * (U(i - 1, 0) + U(i, 0));
  }
  for (std::size_t j = 1; j < n2; ++j) {
    for (std::size_t i = 0; i < n1; ++i) {
      s.points[grid.index(i, j)] = s.points[grid.index(i, j - 1)] + 0.5 * d2 * (V(i, j - 1) + V(i, j));
    }
  }
  for (std::size_t j = 1; j < n2; ++j) {
    other[grid.index(0, j)] = other[grid.index(0, j - 1)] + 0.5 * d2 * (V(0, j - 1) + V(0, j));
  }
  for (std::size_t j = 0; j < n2; ++j) {
    for (std::size_t i = 1; i < n1; ++i) {
      other[grid.index(i, j)] = other[grid.index(i - 1, j)] + 0.5 * d1 * (U(i - 1, j) + U(i, j));
    }
  }
  for (std::size_t c = 0; c < grid.size(); ++c) {
    s.loop_defect = std::max(s.loop_defect, (s.points[c] - other[c]).norm());
  }
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < n2; ++j) {
    for (std::size_t i = 0; i + 1 < n1; ++i) {
      const Vec3 dv = (V(i + 1, j) + V(i + 1, j + 1) - V(i, j) - V(i, j + 1)) / (2.0 * d1);
      const Vec3 du = (U(i, j + 1) + U(i + 1, j + 1) - U(i, j) - U(i + 1, j)) / (2.0 * d2);
      sum += (dv - du).norm();
    }
  }
  s.defect_bound = grid.cell_area() * sum;
  return s;
}

SpeedField3 SpeedField3::constant(double m0) {
  return {[m0](const Vec3&) { return m0; }, [](const Vec3&) { return Vec3::Zero().eval(); }};
}

SpeedField3 SpeedField3::linear(double m0, const Vec3& slope) {
  return {[m0, slope](const Vec3& x) { return m0 + slope.dot(x); }, [slope](const Vec3&) { return slope; }};
}

RayState3 ray_step3(const RayState3& ray, const SpeedField3& field, double dt) {
  struct Rate {
    Vec3 dx, dn;
  };
  auto rate = [&](const Vec3& x, const Vec3& n) {
    const double m = field.speed(x);
    const Vec3 grad = field.gradient(x);
    return Rate{m * n, -(grad - n * n.dot(grad))};
  };
  const Rate k1 = rate(ray.x, ray.n);
  const Rate k2 = rate(ray.x + 0.5 * dt * k1.dx, ray.n + 0.5 * dt * k1.dn);
  const Rate k3 = rate(ray.x + 0.5 * dt * k2.dx, ray.n + 0.5 * dt * k2.dn);
  const Rate k4 = rate(ray.x + dt * k3.dx, ray.n + dt * k3.dn);
  RayState3 out;
  out.x = ray.x + dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  out.n = (ray.n + dt / 6.0 * (k1.dn + 2.0 * k2.dn + 2.0 * k3.dn + k4.dn)).normalized();
  return out;
}

}  // namespace kcl
