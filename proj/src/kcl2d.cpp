#include "kcl/kcl2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "kcl/error.hpp"

namespace kcl {

namespace {

constexpr const char* kModule = "kcl2d";
constexpr double kSafety = 1.2;
constexpr double kSpeedFloor = 1e-12;

struct CellFlux {
  double f1, f2, m;
};

CellFlux flux_of(const Closure& closure, std::size_t cell, double h1, double h2, double guess) {
  const double g = std::hypot(h1, h2);
  if (!(g > 0.0)) throw Error(kModule, "metric collapse");
  const double m = closure.speed(cell, g, guess);
  return {m * h2 / g, -m * h1 / g, m};
}

// Largest singular value of [[a, b], [c, d]].
double sigma_max(double a, double b, double c, double d) {
  return 0.5 * (std::hypot(a + d, c - b) + std::hypot(a - d, b + c));
}

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// Right-hand side -dF/dxi of the semi-discrete scheme.
struct Operator {
  std::vector<double> rhs1, rhs2, m, lambda;
  double boundary_f1 = 0.0, boundary_f2 = 0.0;
  double lambda_max = 0.0;
};

class Discretization {
 public:
  Discretization(const XiGrid& grid, const Closure& closure, Reconstruction recon, Exec exec)
      : grid_(grid), closure_(closure), recon_(recon), exec_(exec), n_(grid.cells) {}

  std::size_t wrap(std::ptrdiff_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(n_);
    if (grid_.boundary == Boundary2::periodic) return static_cast<std::size_t>(((i % n) + n) % n);
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, n - 1));
  }

  Operator evaluate(std::span<const double> h1, std::span<const double> h2,
                    std::span<const double> m_guess) const {
    Operator op;
    op.rhs1.resize(n_);
    op.rhs2.resize(n_);
    op.m.resize(n_);
    op.lambda.resize(n_);
    std::vector<double> f1(n_), f2(n_), s1(n_, 0.0), s2(n_, 0.0);

    for_each_index(exec_, n_, [&](std::size_t i) {
      const CellFlux f = flux_of(closure_, i, h1[i], h2[i], m_guess[i]);
      f1[i] = f.f1;
      f2[i] = f.f2;
      op.m[i] = f.m;
      op.lambda[i] = cell_wave_speed(closure_, i, h1[i], h2[i], f.m);
    });
    op.lambda_max = 0.0;
    for (double l : op.lambda) op.lambda_max = std::max(op.lambda_max, l);

    const bool muscl = recon_ == Reconstruction::muscl;
    if (muscl) {
      for_each_index(exec_, n_, [&](std::size_t i) {
        const auto ii = static_cast<std::ptrdiff_t>(i);
        const std::size_t l = wrap(ii - 1), r = wrap(ii + 1);
        // Ghost cells of an extrapolated boundary are copies, so the edge
        // slope is zero there.
        const bool edge = grid_.boundary == Boundary2::extrapolate && (i == 0 || i + 1 == n_);
        if (edge) return;
        s1[i] = minmod(h1[i] - h1[l], h1[r] - h1[i]);
        s2[i] = minmod(h2[i] - h2[l], h2[r] - h2[i]);
      });
    }

    std::vector<double> F1(n_ + 1), F2(n_ + 1);
    for_each_index(exec_, n_ + 1, [&](std::size_t k) {
      const auto kk = static_cast<std::ptrdiff_t>(k);
      const std::size_t l = wrap(kk - 1), r = wrap(kk);
      double hl1 = h1[l], hl2 = h2[l], hr1 = h1[r], hr2 = h2[r];
      double fl1 = f1[l], fl2 = f2[l], fr1 = f1[r], fr2 = f2[r];
      if (muscl) {
        const bool ghost_l = k == 0 && grid_.boundary == Boundary2::extrapolate;
        const bool ghost_r = k == n_ && grid_.boundary == Boundary2::extrapolate;
        if (!ghost_l) {
          hl1 += 0.5 * s1[l];
          hl2 += 0.5 * s2[l];
          const CellFlux fl = flux_of(closure_, l, hl1, hl2, op.m[l]);
          fl1 = fl.f1;
          fl2 = fl.f2;
        }
        if (!ghost_r) {
          hr1 -= 0.5 * s1[r];
          hr2 -= 0.5 * s2[r];
          const CellFlux fr = flux_of(closure_, r, hr1, hr2, op.m[r]);
          fr1 = fr.f1;
          fr2 = fr.f2;
        }
      }
      const double lambda = std::max(op.lambda[l], op.lambda[r]);
      F1[k] = 0.5 * (fl1 + fr1) - 0.5 * lambda * (hr1 - hl1);
      F2[k] = 0.5 * (fl2 + fr2) - 0.5 * lambda * (hr2 - hl2);
    });

    const double inv_dxi = 1.0 / grid_.spacing;
    for_each_index(exec_, n_, [&](std::size_t i) {
      op.rhs1[i] = -(F1[i + 1] - F1[i]) * inv_dxi;
      op.rhs2[i] = -(F2[i + 1] - F2[i]) * inv_dxi;
    });
    op.boundary_f1 = F1[0];
    op.boundary_f2 = F2[0];
    return op;
  }

 private:
  const XiGrid& grid_;
  const Closure& closure_;
  Reconstruction recon_;
  Exec exec_;
  std::size_t n_;
};

KclState2 assemble(std::span<const double> h1, std::span<const double> h2, const Closure& closure,
                   std::span<const double> m_guess, const XiGrid& grid, double time,
                   double theta_reference, Exec exec) {
  const std::size_t n = h1.size();
  KclState2 s;
  s.grid = grid;
  s.time = time;
  s.g.resize(n);
  s.m.resize(n);
  s.theta.resize(n);
  double mean_g = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s.g[i] = std::hypot(h1[i], h2[i]);
    mean_g += s.g[i];
  }
  mean_g /= static_cast<double>(n);
  for (double g : s.g) {
    if (!std::isfinite(g) || !(g > 1e-12 * mean_g)) throw Error(kModule, "metric collapse");
  }
  for_each_index(exec, n, [&](std::size_t i) { s.m[i] = closure.speed(i, s.g[i], m_guess[i]); });
  double previous = theta_reference;
  for (std::size_t i = 0; i < n; ++i) {
    const double raw = std::atan2(h1[i], h2[i]);
    s.theta[i] = previous + normalize_angle(raw - previous);
    previous = s.theta[i];
  }
  return s;
}

}  // namespace

void KclState2::validate() const {
  const std::size_t n = grid.cells;
  if (n < 2) throw Error(kModule, "state needs at least 2 cells");
  if (!(grid.spacing > 0.0)) throw Error(kModule, "xi spacing must be positive");
  if (m.size() != n || theta.size() != n || g.size() != n) {
    throw Error(kModule, "state arrays do not match the grid");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(g[i] > 0.0) || !std::isfinite(g[i])) throw Error(kModule, "metric must be positive");
    if (!(m[i] > 0.0) || !std::isfinite(m[i])) throw Error(kModule, "front speed must be positive");
    if (!std::isfinite(theta[i])) throw Error(kModule, "theta must be finite");
    if (i > 0 && std::abs(theta[i] - theta[i - 1]) >= std::numbers::pi) {
      throw Error(kModule, "theta must be stored unwrapped");
    }
  }
}

ConservedPair to_conserved(const KclState2& state) {
  ConservedPair p;
  p.h1.resize(state.size());
  p.h2.resize(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    p.h1[i] = state.g[i] * std::sin(state.theta[i]);
    p.h2[i] = state.g[i] * std::cos(state.theta[i]);
  }
  return p;
}

KclState2 from_conserved(const ConservedPair& pair, std::vector<double> m, const XiGrid& grid,
                         double time, double theta_reference) {
  const std::size_t n = pair.h1.size();
  if (pair.h2.size() != n || m.size() != n) throw Error(kModule, "conserved arrays differ in size");
  KclState2 s;
  s.grid = grid;
  s.grid.cells = n;
  s.time = time;
  s.m = std::move(m);
  s.g.resize(n);
  s.theta.resize(n);
  double previous = theta_reference;
  for (std::size_t i = 0; i < n; ++i) {
    s.g[i] = std::hypot(pair.h1[i], pair.h2[i]);
    if (!(s.g[i] > 0.0)) throw Error(kModule, "metric collapse");
    const double raw = std::atan2(pair.h1[i], pair.h2[i]);
    s.theta[i] = previous + normalize_angle(raw - previous);
    previous = s.theta[i];
  }
  return s;
}

FluxPair kcl_flux(const KclState2& state) {
  FluxPair f;
  f.f1.resize(state.size());
  f.f2.resize(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    f.f1[i] = state.m[i] * std::cos(state.theta[i]);
    f.f2[i] = -state.m[i] * std::sin(state.theta[i]);
  }
  return f;
}

Closure init_closure(ClosureKind kind, const KclState2& state0) {
  state0.validate();
  if (kind == ClosureKind::wnlrt) return Closure::wnlrt(state0.g, state0.m);
  const double m0 = state0.m.front();
  for (double m : state0.m) {
    if (std::abs(m - m0) > 1e-12 * m0) throw Error("closure", "constant_m closure needs uniform m");
  }
  return Closure::constant(m0);
}

std::vector<double> update_m(const Closure& closure, const KclState2& state) {
  if (closure.kind() == ClosureKind::constant_m) return std::vector<double>(state.size(), closure.m0());
  std::vector<double> m(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) m[i] = closure.speed(i, state.g[i], state.m[i]);
  return m;
}

double cell_wave_speed(const Closure& closure, std::size_t cell, double h1, double h2, double m) {
  // Directional differences along the local (metric, angle) frame, which
  // rotates with the state; a step of 1e-3 g is ample for a speed bound.
  const double g = std::hypot(h1, h2);
  const double delta = 1e-3 * g;
  const double eg1 = h1 / g, eg2 = h2 / g;
  const double et1 = h2 / g, et2 = -h1 / g;
  const CellFlux gp = flux_of(closure, cell, h1 + delta * eg1, h2 + delta * eg2, m);
  const CellFlux gm = flux_of(closure, cell, h1 - delta * eg1, h2 - delta * eg2, m);
  const CellFlux tp = flux_of(closure, cell, h1 + delta * et1, h2 + delta * et2, m);
  const CellFlux tm = flux_of(closure, cell, h1 - delta * et1, h2 - delta * et2, m);
  const double inv = 0.5 / delta;
  return sigma_max((gp.f1 - gm.f1) * inv, (tp.f1 - tm.f1) * inv, (gp.f2 - gm.f2) * inv,
                   (tp.f2 - tm.f2) * inv);
}

StepResult advance(const KclState2& state, const Closure& closure, const StepOptions& options) {
  if (!(options.cfl > 0.0 && options.cfl < 1.0)) throw Error(kModule, "cfl must lie in (0, 1)");
  const std::size_t n = state.size();
  const Discretization disc(state.grid, closure, options.reconstruction, options.exec);
  const ConservedPair h = to_conserved(state);

  const Operator op = disc.evaluate(h.h1, h.h2, state.m);
  if (!(op.lambda_max > 0.0)) throw Error(kModule, "degenerate system");
  const double lambda = std::max(kSafety * op.lambda_max, kSpeedFloor);
  const double dt = std::min(options.cfl * state.grid.spacing / lambda, options.max_dt);
  if (!(dt > 0.0)) throw Error(kModule, "non-positive time step");

  std::vector<double> h1(n), h2(n);
  for_each_index(options.exec, n, [&](std::size_t i) {
    h1[i] = h.h1[i] + dt * op.rhs1[i];
    h2[i] = h.h2[i] + dt * op.rhs2[i];
  });
  Point2 velocity{op.boundary_f1, -op.boundary_f2};

  if (options.reconstruction == Reconstruction::muscl) {
    // Heun's method (SSP RK2).
    std::vector<double> m_stage(n);
    for_each_index(options.exec, n, [&](std::size_t i) {
      m_stage[i] = closure.speed(i, std::hypot(h1[i], h2[i]), op.m[i]);
    });
    const Operator op2 = disc.evaluate(h1, h2, m_stage);
    for_each_index(options.exec, n, [&](std::size_t i) {
      h1[i] = 0.5 * (h.h1[i] + h1[i] + dt * op2.rhs1[i]);
      h2[i] = 0.5 * (h.h2[i] + h2[i] + dt * op2.rhs2[i]);
    });
    velocity = 0.5 * (velocity + Point2{op2.boundary_f1, -op2.boundary_f2});
  }

  StepResult result;
  result.state = assemble(h1, h2, closure, op.m, state.grid, state.time + dt, state.theta.front(),
                          options.exec);
  result.dt = dt;
  result.lambda_max = op.lambda_max;
  result.anchor_velocity = velocity;
  return result;
}

KclState2 step(const KclState2& state, const Closure& closure, double cfl) {
  StepOptions options;
  options.cfl = cfl;
  return advance(state, closure, options).state;
}

EvolveResult evolve(const KclState2& state0, const Closure& closure, double t_end,
                    const EvolveOptions& options) {
  state0.validate();
  if (!(t_end > state0.time)) throw Error(kModule, "t_end must exceed the initial time");

  EvolveResult result;
  std::optional<double> period;
  if (state0.grid.boundary == Boundary2::periodic) period = state0.grid.period();
  KinkTracker tracker(period);

  KclState2 state = state0;
  Point2 anchor = options.anchor;
  double lambda_seen = 0.0;
  double last_snap_time = state.time;

  auto record = [&]() {
    auto kinks = detect_kinks(state, options.kink_threshold);
    const double gate = std::max(6.0 * state.grid.spacing,
                                 1.5 * kSafety * lambda_seen * (state.time - last_snap_time));
    tracker.add(state.time, kinks, gate);
    result.kinks.insert(result.kinks.end(), kinks.begin(), kinks.end());
    result.snapshots.push_back({state, anchor, result.steps});
    last_snap_time = state.time;
  };
  record();

  std::size_t snap_index = 1;
  auto snap_time = [&](std::size_t k) {
    return options.snap_every > 0.0 ? state0.time + options.snap_every * static_cast<double>(k)
                                    : t_end;
  };
  StepOptions step_options;
  step_options.cfl = options.cfl;
  step_options.reconstruction = options.reconstruction;
  step_options.exec = options.exec;

  while (state.time < t_end) {
    if (result.steps >= options.max_steps) throw Error(kModule, "step limit exceeded");
    const double target = std::min(snap_time(snap_index), t_end);
    step_options.max_dt = target - state.time;
    StepResult r = advance(state, closure, step_options);
    anchor = anchor + r.dt * r.anchor_velocity;
    lambda_seen = std::max(lambda_seen, r.lambda_max);
    const bool reached = r.dt >= step_options.max_dt;
    state = std::move(r.state);
    ++result.steps;
    if (reached) {
      state.time = target;
      record();
      ++snap_index;
    }
  }

  tracker.finish(result.kinks);
  result.tracks = tracker.tracks();
  return result;
}

Pair conserved_integral(const KclState2& state, double xi_l, double xi_r) {
  const XiGrid& grid = state.grid;
  const double tol = 1e-12 * (1.0 + std::abs(grid.xi_max()));
  if (!(xi_l < xi_r)) throw Error(kModule, "empty integration range");
  if (xi_l < grid.xi_min - tol || xi_r > grid.xi_max() + tol) {
    throw Error(kModule, "integration range outside the grid");
  }
  Pair sum;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double a = std::max(grid.interface(i), xi_l);
    const double b = std::min(grid.interface(i + 1), xi_r);
    if (b <= a) continue;
    const double w = b - a;
    sum.first += w * state.g[i] * std::sin(state.theta[i]);
    sum.second += w * state.g[i] * std::cos(state.theta[i]);
  }
  return sum;
}

rays::Front2 reconstruct_front(const KclState2& state, Point2 anchor) {
  const std::size_t n = state.size();
  const ConservedPair h = to_conserved(state);
  const bool periodic = state.grid.boundary == Boundary2::periodic;
  rays::Front2 front;
  front.xi_min = state.grid.xi_min;
  front.xi_spacing = state.grid.spacing;
  front.points.resize(n + 1);
  Point2 p = anchor;
  for (std::size_t k = 0; k <= n; ++k) {
    std::size_t l = k == 0 ? (periodic ? n - 1 : 0) : k - 1;
    std::size_t r = k == n ? (periodic ? 0 : n - 1) : k;
    const double theta = std::atan2(h.h1[l] + h.h1[r], h.h2[l] + h.h2[r]);
    front.points[k] = {p.x, p.y, normalize_angle(theta)};
    if (k < n) p = p + state.grid.spacing * Point2{-h.h1[k], h.h2[k]};
  }
  return front;
}

}  // namespace kcl
