#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "kcl/error.hpp"
#include "kcl/kcl2d.hpp"
#include "kcl/kinks.hpp"
#include "kcl/scenario.hpp"
#include "oracles.hpp"

using namespace kcl;

namespace {

KclState2 step_state(std::size_t n, double theta_l, double theta_r) {
  KclState2 s;
  s.grid = {-1.0, 2.0 / static_cast<double>(n), n, Boundary2::extrapolate};
  for (std::size_t i = 0; i < n; ++i) {
    s.m.push_back(1.2);
    s.g.push_back(1.0);
    s.theta.push_back(s.grid.center(i) < 0.0 ? theta_l : theta_r);
  }
  return s;
}

}  // namespace

TEST_CASE("smooth data has no kinks") {
  ScenarioConfig c = default_config(Scenario::sinusoidal_shock);
  c.cells = 256;
  CHECK(detect_kinks(build_front(c).state).empty());
  CHECK(detect_kinks(oracle::circle_state(128, 1.0, 1.0)).empty());
}

TEST_CASE("a step of 0.6 rad is one kink") {
  const auto kinks = detect_kinks(step_state(100, -0.3, 0.3));
  REQUIRE(kinks.size() == 1);
  CHECK(kinks[0].theta_jump == doctest::Approx(0.6).epsilon(0.05 / 0.6));
  CHECK(std::abs(kinks[0].xi_location) <= 0.02);
  CHECK(kinks[0].left.theta == doctest::Approx(-0.3));
  CHECK(kinks[0].right.theta == doctest::Approx(0.3));
}

TEST_CASE("kink_speed on symmetric states") {
  const double th = 0.3;
  const auto ks = kink_speed({1.0, th, 1.0}, {1.0, -th, 1.0});
  CHECK(ks.speed == 0.0);
  // [g cos] = 0 but [m sin] does not vanish, so the second relation is left
  // with |[f2]| = 2 sin(0.3).
  CHECK(ks.residual == doctest::Approx(2.0 * std::sin(th)).epsilon(1e-14));
  for (double m : {1.0, 1.5}) {
    for (double g : {0.5, 2.0}) CHECK(kink_speed({m, 0.4, g}, {m, -0.4, g}).speed == 0.0);
  }
}

TEST_CASE("kink_speed recovers K from brute-force RH partners") {
  const std::vector<PlateauState> lefts{{1.2, 0.2, 1.0}, {1.05, -0.5, 0.7}, {1.4, 1.0, 2.0}};
  for (const auto& left : lefts) {
    for (double K : {-0.8, -0.3, 0.5, 1.1}) {
      const double reach = std::hypot(K * left.g, left.m);
      const double m_r = 0.8 * reach;
      const PlateauState right = oracle::rh_partner(left, K, m_r, -oracle::pi, oracle::pi, 1e-3, 10.0);
      const auto ks = kink_speed(left, right);
      CHECK(std::abs(ks.speed - K) <= 1e-6);
      CHECK(ks.residual <= 1e-6);
      CHECK(rh_defect(K, left, right) <= 1e-9);
    }
  }
}

TEST_CASE("tracker links detections and fits their speeds") {
  KinkTracker tracker;
  std::vector<KinkRecord> all;
  for (int k = 0; k <= 10; ++k) {
    const double t = 0.1 * k;
    std::vector<KinkRecord> snap(2);
    snap[0].xi_location = -0.2 - 0.5 * t;
    snap[1].xi_location = 0.3 + 0.25 * t;
    for (auto& r : snap) r.time = t;
    tracker.add(t, snap, 0.1);
    all.insert(all.end(), snap.begin(), snap.end());
  }
  tracker.finish(all);
  REQUIRE(tracker.tracks().size() == 2);
  CHECK(tracker.persistent(11).size() == 2);
  CHECK(tracker.persistent(12).empty());
  for (const auto& r : all) {
    CHECK(r.speed_K == doctest::Approx(r.xi_location < 0.0 ? -0.5 : 0.25).epsilon(1e-9));
  }
}

TEST_CASE("tracker unwraps periodic crossings") {
  KinkTracker tracker(2.0);
  std::vector<KinkRecord> all;
  for (int k = 0; k <= 8; ++k) {
    const double t = 0.1 * k;
    double xi = 0.8 + 0.5 * t;
    if (xi >= 1.0) xi -= 2.0;
    std::vector<KinkRecord> snap(1);
    snap[0].xi_location = xi;
    snap[0].time = t;
    tracker.add(t, snap, 0.1);
    all.push_back(snap[0]);
  }
  tracker.finish(all);
  REQUIRE(tracker.tracks().size() == 1);
  CHECK(tracker.tracks()[0].speed == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("wedge forms two symmetric kinks") {
  ScenarioConfig c = default_config(Scenario::wedge);
  c.cells = 200;
  const FrontSetup f = build_front(c);
  EvolveOptions opt;
  opt.reconstruction = Reconstruction::muscl;
  opt.snap_every = 0.1;
  const auto r = evolve(f.state, init_closure(ClosureKind::wnlrt, f.state), 1.0, opt);
  const auto kinks = detect_kinks(r.snapshots.back().state);
  REQUIRE(kinks.size() == 2);
  CHECK(kinks[0].xi_location == doctest::Approx(-kinks[1].xi_location).epsilon(1e-9));
  CHECK(kinks[0].theta_jump == doctest::Approx(kinks[1].theta_jump).epsilon(1e-9));
}

TEST_CASE("sinusoidal kinks satisfy the jump relations on their plateaus") {
  const double C = 6.0;
  double previous = 0.0;
  for (std::size_t n : {256, 512}) {
    ScenarioConfig c = default_config(Scenario::sinusoidal_shock);
    c.cells = n;
    const FrontSetup f = build_front(c);
    EvolveOptions opt;
    opt.reconstruction = Reconstruction::muscl;
    opt.snap_every = 0.1;
    opt.anchor = f.anchor;
    const auto r = evolve(f.state, init_closure(ClosureKind::wnlrt, f.state), 5.0, opt);
    std::vector<std::size_t> length(r.tracks.size());
    for (const auto& t : r.tracks) length[t.id] = t.times.size();
    double worst = 0.0;
    std::size_t checked = 0;
    for (const auto& k : r.kinks) {
      if (length.at(k.track) < 5) continue;
      worst = std::max(worst, kink_speed(k.left, k.right).residual);
      ++checked;
    }
    CHECK(checked >= 20);
    CHECK(worst <= C * f.state.grid.spacing);
    if (previous > 0.0) CHECK(previous / worst >= 1.6);
    previous = worst;
  }
}

TEST_CASE("kink errors") {
  CHECK_THROWS_AS(detect_kinks(step_state(40, 0.0, 0.3), 0.0), Error);
  CHECK_THROWS_AS(kink_speed({1.0, 0.2, 1.0}, {1.0, 0.2, 1.0}), Error);
}
