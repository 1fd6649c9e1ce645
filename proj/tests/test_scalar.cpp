#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "kcl/error.hpp"
#include "kcl/scalar_claw.hpp"
#include "oracles.hpp"

using namespace kcl::scalar;

namespace {

std::vector<double> riemann_data(const Grid1& grid, double u_l, double u_r) {
  std::vector<double> u(grid.n_cells);
  for (std::size_t i = 0; i < grid.n_cells; ++i) u[i] = grid.center(i) < 0.0 ? u_l : u_r;
  return u;
}

double total_variation(const std::vector<double>& u) {
  double tv = 0.0;
  for (std::size_t i = 1; i < u.size(); ++i) tv += std::abs(u[i] - u[i - 1]);
  return tv;
}

double l1_error(const Grid1& grid, const std::vector<double>& u, double u_l, double u_r, double t) {
  double e = 0.0;
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    e += std::abs(u[i] - oracle::burgers_riemann(u_l, u_r, grid.center(i), t)) * grid.dx();
  }
  return e;
}

}  // namespace

TEST_CASE("rh_speed examples") {
  CHECK(rh_speed(ScalarClaw::burgers(), 1.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  for (double ul : {-2.0, 0.3, 5.0}) {
    CHECK(rh_speed(ScalarClaw::linear_advection(1.7), ul, ul + 1.25) ==
          doctest::Approx(1.7).epsilon(1e-14));
  }
  CHECK(rh_speed(ScalarClaw::cubic(), 2.0, 1.0) == doctest::Approx(7.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("lax_admissible examples") {
  const auto b = ScalarClaw::burgers();
  CHECK(lax_admissible(b, 1.0, 0.0, 0.5));
  CHECK_FALSE(lax_admissible(b, 0.0, 1.0, 0.5));
  CHECK_FALSE(lax_admissible(b, 1.0, 0.0, 1.0));
}

TEST_CASE("Burgers: RH speed is admissible exactly when u_l > u_r") {
  const auto b = ScalarClaw::burgers();
  for (int i = -10; i <= 10; ++i) {
    for (int j = -10; j <= 10; ++j) {
      if (i == j) continue;
      const double ul = 0.3 * i, ur = 0.3 * j;
      CHECK(lax_admissible(b, ul, ur, rh_speed(b, ul, ur)) == (ul > ur));
    }
  }
}

TEST_CASE("derivative fields match central differences") {
  for (const auto& claw : {ScalarClaw::burgers(), ScalarClaw::linear_advection(-0.7), ScalarClaw::cubic()}) {
    for (double u = -2.0; u <= 2.0; u += 0.37) {
      const double h = 1e-5;
      const double dH = (claw.density(u + h) - claw.density(u - h)) / (2 * h);
      const double dF = (claw.flux(u + h) - claw.flux(u - h)) / (2 * h);
      CHECK(claw.density_deriv(u) == doctest::Approx(dH).epsilon(1e-6));
      CHECK(claw.flux_deriv(u) == doctest::Approx(dF).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("Burgers shock is captured at x = 0.5 at t = 1") {
  const Grid1 grid{-1.0, 1.0, 400, Boundary1::outflow};
  const auto snaps = evolve_scalar(ScalarClaw::burgers(), grid, riemann_data(grid, 1.0, 0.0), 1.0);
  REQUIRE(snaps.back().time == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(steepest_interface(grid, snaps.back().u) - 0.5) <= grid.dx());
}

TEST_CASE("Burgers rarefaction has L1 error O(dx)") {
  double previous = 0.0;
  for (std::size_t n : {100, 200, 400, 800}) {
    const Grid1 grid{-1.0, 1.0, n, Boundary1::outflow};
    const auto snaps = evolve_scalar(ScalarClaw::burgers(), grid, riemann_data(grid, 0.0, 1.0), 0.5);
    const double e = l1_error(grid, snaps.back().u, 0.0, 1.0, 0.5);
    CHECK(e <= 3.0 * grid.dx());
    if (previous > 0.0) CHECK(previous / e >= 1.6);
    previous = e;
  }
}

TEST_CASE("constant data is a fixed point") {
  const Grid1 grid{0.0, 1.0, 64, Boundary1::periodic};
  const std::vector<double> u0(64, 0.8125);
  const auto snaps = evolve_scalar(ScalarClaw::burgers(), grid, u0, 0.3);
  for (const auto& s : snaps) CHECK(s.u == u0);
}

TEST_CASE("measured shock speed converges to the RH speed") {
  double previous = 1.0;
  for (std::size_t n : {100, 200, 400}) {
    const Grid1 grid{-1.0, 1.0, n, Boundary1::outflow};
    ScalarOptions opt;
    opt.snap_every = 0.02;
    const auto snaps = evolve_scalar(ScalarClaw::burgers(), grid, riemann_data(grid, 2.0, -1.0), 0.5, opt);
    const double err = std::abs(measure_shock_speed(grid, snaps) - rh_speed(ScalarClaw::burgers(), 2.0, -1.0));
    CHECK(err <= 2.0 * grid.dx());
    CHECK(err <= std::max(previous, 1e-12));
    previous = err;
  }
}

TEST_CASE("total variation never increases on Burgers data") {
  const Grid1 grid{-1.0, 1.0, 200, Boundary1::outflow};
  std::vector<std::vector<double>> cases{riemann_data(grid, 1.0, 0.0), riemann_data(grid, 0.0, 1.0),
                                         riemann_data(grid, -1.0, 0.5)};
  std::vector<double> bump(grid.n_cells);
  for (std::size_t i = 0; i < grid.n_cells; ++i) bump[i] = std::sin(oracle::pi * grid.center(i)) + 0.2;
  cases.push_back(bump);
  for (const auto& u0 : cases) {
    const auto snaps = evolve_scalar(ScalarClaw::burgers(), grid, u0, 0.6);
    for (std::size_t k = 1; k < snaps.size(); ++k) {
      CHECK(total_variation(snaps[k].u) <= total_variation(snaps[k - 1].u) + 1e-13);
    }
  }
}

TEST_CASE("periodic runs conserve total density") {
  const Grid1 grid{0.0, 2.0, 128, Boundary1::periodic};
  std::vector<double> u0(grid.n_cells);
  for (std::size_t i = 0; i < grid.n_cells; ++i) u0[i] = 1.0 + 0.5 * std::sin(oracle::pi * grid.center(i));
  const auto claw = ScalarClaw::cubic();
  const auto snaps = evolve_scalar(claw, grid, u0, 1.0);
  const double d0 = total_density(claw, grid, u0);
  CHECK(total_density(claw, grid, snaps.back().u) == doctest::Approx(d0).epsilon(1e-13));
}

TEST_CASE("serial and parallel paths agree bit for bit") {
  const Grid1 grid{-1.0, 1.0, 300, Boundary1::outflow};
  ScalarOptions opt;
  opt.exec = kcl::Exec::serial;
  const auto a = evolve_scalar(ScalarClaw::burgers(), grid, riemann_data(grid, 1.0, -0.5), 0.5, opt);
  opt.exec = kcl::Exec::parallel;
  const auto b = evolve_scalar(ScalarClaw::burgers(), grid, riemann_data(grid, 1.0, -0.5), 0.5, opt);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].u == b[k].u);
}

TEST_CASE("Euler characteristic speeds") {
  auto s = euler_char_speeds(1.4, 0.0, 1.0, 1.4);
  CHECK(s.c1 == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(s.c2 == 0.0);
  CHECK(s.c3 == doctest::Approx(1.0).epsilon(1e-15));
  s = euler_char_speeds(1.0, 5.0, 1.0, 1.0);
  CHECK(s.c1 == 4.0);
  CHECK(s.c2 == 5.0);
  CHECK(s.c3 == 6.0);
  s = euler_char_speeds(2.0, 0.0, 2.0, 2.0);
  CHECK(s.c1 == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-15));
  CHECK(s.c3 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("Euler speeds are strictly ordered and forward shocks are supersonic") {
  for (double rho : {0.2, 1.0, 7.5}) {
    for (double q : {-3.0, 0.0, 2.5}) {
      for (double p : {0.1, 1.0, 40.0}) {
        for (double gamma : {1.1, 1.4, 5.0 / 3.0}) {
          const auto s = euler_char_speeds(rho, q, p, gamma);
          CHECK(s.c1 < s.c2);
          CHECK(s.c2 < s.c3);
          for (double mach : {1.05, 1.5, 3.0, 10.0}) {
            const auto shock = oracle::forward_shock({rho, q, p}, mach, gamma);
            const auto left = euler_char_speeds(shock.behind.rho, shock.behind.q, shock.behind.p, gamma);
            CHECK(s.c3 < shock.speed);
            CHECK(shock.speed < left.c3);
          }
        }
      }
    }
  }
}

TEST_CASE("invalid inputs raise errors") {
  CHECK_THROWS_AS(rh_speed(ScalarClaw::burgers(), 1.0, 1.0), kcl::Error);
  CHECK_THROWS_AS(euler_char_speeds(-1.0, 0.0, 1.0, 1.4), kcl::Error);
  const Grid1 bad{1.0, 0.0, 10, Boundary1::outflow};
  CHECK_THROWS_AS(bad.validate(), kcl::Error);
}
