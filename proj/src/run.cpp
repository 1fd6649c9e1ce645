#include "kcl/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>

#include "kcl/csv.hpp"
#include "kcl/error.hpp"

namespace kcl {

namespace {

namespace fs = std::filesystem;
constexpr const char* kModule = "harness";

std::string numbered(const char* stem, std::size_t index) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%s_%04zu.csv", stem, index);
  return buffer;
}

bool written(const ScenarioConfig& config, std::size_t index, std::size_t count) {
  return index % config.output_stride == 0 || index + 1 == count;
}

// Non-finite values have no JSON representation.
nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

void run_front(const ScenarioConfig& config, Exec exec, const fs::path& dir, RunReport& report) {
  const FrontSetup setup = build_front(config);
  const Closure closure = init_closure(config.closure, setup.state);
  EvolveOptions options;
  options.cfl = config.cfl;
  options.snap_every = config.snap_every;
  options.reconstruction = config.reconstruction;
  options.exec = exec;
  options.kink_threshold = config.kink_threshold;
  options.anchor = setup.anchor;
  const EvolveResult result = evolve(setup.state, closure, config.t_end, options);

  const KclState2& s0 = setup.state;
  const std::size_t n = s0.size();
  const std::size_t count = result.snapshots.size();
  CsvWriter metrics(dir / "metrics.csv", {"t", "step", "int_h1", "int_h2", "arc_length", "g_ratio_min",
                                          "g_ratio_max", "max_abs_theta", "kinks"});
  double theta_window = 0.0, theta_final = 0.0;
  double drift1 = 0.0, drift2 = 0.0, radial = 0.0;
  const Pair integral0 = conserved_integral(s0, s0.grid.xi_min, s0.grid.xi_max());
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale += s0.g[i] * s0.grid.spacing;
  std::size_t kink_cursor = 0;

  for (std::size_t k = 0; k < count; ++k) {
    const Snapshot2& snap = result.snapshots[k];
    const KclState2& s = snap.state;
    const Pair integral = conserved_integral(s, s.grid.xi_min, s.grid.xi_max());
    double arc = 0.0, gmin = std::numeric_limits<double>::infinity(), gmax = 0.0, theta_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      arc += s.g[i] * s.grid.spacing;
      gmin = std::min(gmin, s.g[i] / s0.g[i]);
      gmax = std::max(gmax, s.g[i] / s0.g[i]);
      theta_max = std::max(theta_max, std::abs(normalize_angle(s.theta[i])));
    }
    std::size_t kinks = 0;
    while (kink_cursor < result.kinks.size() && result.kinks[kink_cursor].time == s.time) {
      ++kinks;
      ++kink_cursor;
    }
    metrics.row({s.time, static_cast<double>(snap.step), integral.first, integral.second, arc, gmin, gmax,
                 theta_max, static_cast<double>(kinks)});
    if (s.time <= 5.0) theta_window = std::max(theta_window, theta_max);
    theta_final = theta_max;
    drift1 = std::max(drift1, std::abs(integral.first - integral0.first) / scale);
    drift2 = std::max(drift2, std::abs(integral.second - integral0.second) / scale);

    const rays::Front2 front = reconstruct_front(s, snap.anchor);
    if (config.scenario == Scenario::expanding_circle && k + 1 == count) {
      const double r = config.params.r0 + config.m0 * s.time;
      for (const rays::RayPoint& p : front.points) radial = std::max(radial, std::abs(std::hypot(p.x, p.y) - r));
    }
    if (!written(config, k, count)) continue;
    const std::string name = numbered("front", k);
    CsvWriter out(dir / name, {"t", "xi", "x", "y", "m", "theta", "g"});
    for (std::size_t i = 0; i < n; ++i) {
      const rays::RayPoint& a = front.points[i];
      const rays::RayPoint& b = front.points[i + 1];
      out.row({s.time, s.grid.center(i), 0.5 * (a.x + b.x), 0.5 * (a.y + b.y), s.m[i], s.theta[i], s.g[i]});
    }
    out.close();
    report.files.push_back(name);
  }
  metrics.close();

  CsvWriter kinks(dir / "kinks.csv", {"time", "xi", "theta_jump", "m_jump", "g_jump", "speed_K"});
  for (const KinkRecord& r : result.kinks) {
    kinks.row({r.time, r.xi_location, r.theta_jump, r.m_jump, r.g_jump, r.speed_K});
  }
  kinks.close();
  report.files.push_back("kinks.csv");
  report.files.push_back("metrics.csv");

  const KclState2& last = result.snapshots.back().state;
  double gmean = 0.0;
  for (std::size_t i = 0; i < n; ++i) gmean += last.g[i] / s0.g[i];
  nlohmann::json& r = report.results;
  r["steps"] = result.steps;
  r["snapshots"] = count;
  r["g_ratio_mean"] = gmean / static_cast<double>(n);
  // Open ends exchange flux, so drift only measures conservation on closed grids.
  if (s0.grid.boundary == Boundary2::periodic) r["conservation_drift"] = {drift1, drift2};
  r["max_abs_theta_t_le_5"] = theta_window;
  r["max_abs_theta_final"] = theta_final;
  r["first_kink_time"] = result.kinks.empty() ? nlohmann::json() : nlohmann::json(result.kinks.front().time);
  nlohmann::json tracks = nlohmann::json::array();
  for (const KinkTrack& t : result.tracks) {
    tracks.push_back({{"id", t.id},
                      {"snapshots", t.times.size()},
                      {"first_time", t.times.front()},
                      {"last_time", t.times.back()},
                      {"speed", number(t.speed)}});
  }
  r["kink_tracks"] = tracks;
  if (config.scenario == Scenario::expanding_circle) r["max_radial_error"] = radial;
}

void run_surface(const ScenarioConfig& config, Exec exec, const fs::path& dir, RunReport& report) {
  const SurfaceSetup setup = build_surface(config);
  const Closure closure = init_closure(config.closure, setup.state);
  Evolve3Options options;
  options.cfl = config.cfl;
  options.snap_every = config.snap_every;
  options.exec = exec;
  options.anchor = setup.anchor;
  const Evolve3Result result = evolve3(setup.state, closure, config.t_end, options);

  const std::size_t count = result.snapshots.size();
  CsvWriter metrics(dir / "metrics.csv",
                    {"t", "step", "sum_U1", "sum_U2", "sum_U3", "sum_V1", "sum_V2", "sum_V3", "sol_res_max",
                     "loop_defect", "defect_bound", "max_normal_tilt"});
  double loop_ok = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const Snapshot3& snap = result.snapshots[k];
    const KclState3& s = snap.state;
    const Grid3& g = s.grid;
    Vec3 su = Vec3::Zero(), sv = Vec3::Zero();
    double tilt = 0.0;
    for (std::size_t c = 0; c < s.size(); ++c) {
      su += s.U[c] * g.cell_area();
      sv += s.V[c] * g.cell_area();
      tilt = std::max(tilt, (s.normal(c) - Vec3::UnitZ()).norm());
    }
    const Surface surface = reconstruct_surface(s, snap.anchor);
    loop_ok = std::max(loop_ok, surface.loop_defect - surface.defect_bound);
    metrics.row({s.time, static_cast<double>(snap.step), su.x(), su.y(), su.z(), sv.x(), sv.y(), sv.z(),
                 snap.residual_max, surface.loop_defect, surface.defect_bound, tilt});
    if (!written(config, k, count)) continue;
    const SolenoidalResidual res = solenoidal_residual(s, exec);
    const std::string name = numbered("surface", k);
    CsvWriter out(dir / name, {"t", "xi1", "xi2", "x", "y", "z", "m", "n1", "n2", "n3", "sol_res"});
    for (std::size_t j = 0; j < g.cells2; ++j) {
      for (std::size_t i = 0; i < g.cells1; ++i) {
        const std::size_t c = g.index(i, j);
        const Vec3& p = surface.points[c];
        const Vec3 nrm = s.normal(c);
        out.row({s.time, g.center1(i), g.center2(j), p.x(), p.y(), p.z(), s.m[c], nrm.x(), nrm.y(), nrm.z(),
                 res.field[c].norm()});
      }
    }
    out.close();
    report.files.push_back(name);
  }
  metrics.close();
  report.files.push_back("metrics.csv");

  nlohmann::json& r = report.results;
  r["steps"] = result.steps;
  r["snapshots"] = count;
  r["sol_res_initial"] = result.snapshots.front().residual_max;
  r["sol_res_final"] = result.snapshots.back().residual_max;
  r["sol_res_increase"] = result.snapshots.back().residual_max - result.snapshots.front().residual_max;
  r["loop_defect_within_bound"] = loop_ok <= 0.0;
  r["stopped"] = result.stopped;
  if (result.stopped) r["diagnostic"] = result.diagnostic;
  report.stopped = result.stopped;
  report.diagnostic = result.diagnostic;
}

void run_scalar(const ScenarioConfig& config, Exec exec, const fs::path& dir, RunReport& report) {
  const ScalarSetup setup = build_scalar(config);
  scalar::ScalarOptions options;
  options.cfl = config.cfl;
  options.snap_every = config.snap_every;
  options.exec = exec;
  const std::vector<scalar::ScalarSnapshot> snaps =
      scalar::evolve_scalar(setup.claw, setup.grid, setup.u, config.t_end, options);

  const std::size_t count = snaps.size();
  CsvWriter metrics(dir / "metrics.csv", {"t", "total_density", "shock_x"});
  CsvWriter shock(dir / "shock.csv", {"t", "x"});
  for (std::size_t k = 0; k < count; ++k) {
    const scalar::ScalarSnapshot& s = snaps[k];
    const double x_shock = scalar::steepest_interface(setup.grid, s.u);
    metrics.row({s.time, scalar::total_density(setup.claw, setup.grid, s.u), x_shock});
    shock.row({s.time, x_shock});
    if (!written(config, k, count)) continue;
    const std::string name = numbered("scalar", k);
    CsvWriter out(dir / name, {"t", "x", "u"});
    for (std::size_t i = 0; i < setup.grid.n_cells; ++i) out.row({s.time, setup.grid.center(i), s.u[i]});
    out.close();
    report.files.push_back(name);
  }
  metrics.close();
  shock.close();
  report.files.push_back("shock.csv");
  report.files.push_back("metrics.csv");

  const double ul = config.params.u_left, ur = config.params.u_right;
  nlohmann::json& r = report.results;
  r["snapshots"] = count;
  if (ul != ur) {
    const double s = scalar::rh_speed(setup.claw, ul, ur);
    r["rh_speed"] = s;
    r["lax_admissible"] = scalar::lax_admissible(setup.claw, ul, ur, s);
  }
  r["measured_shock_speed"] = count >= 4 ? number(scalar::measure_shock_speed(setup.grid, snaps)) : nlohmann::json();
}

}  // namespace

std::string version() { return KCL_VERSION; }

RunReport run(const ScenarioConfig& config, Exec exec) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(kModule, "cannot create output directory " + dir.string() + ": " + ec.message());

  RunReport report;
  report.results = nlohmann::json::object();
  switch (config.scenario) {
    case Scenario::expanding_circle:
    case Scenario::wedge:
    case Scenario::sinusoidal_shock:
      run_front(config, exec, dir, report);
      break;
    case Scenario::periodic_pulse3d:
      run_surface(config, exec, dir, report);
      break;
    case Scenario::burgers_riemann:
      run_scalar(config, exec, dir, report);
      break;
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  nlohmann::json manifest;
  manifest["config"] = to_json(config);
  manifest["version"] = version();
  manifest["wall_time_s"] = wall;
  manifest["results"] = report.results;
  manifest["files"] = report.files;
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << '\n';
  out.close();
  if (out.fail()) throw Error(kModule, "cannot write " + (dir / "manifest.json").string());
  report.files.push_back("manifest.json");
  return report;
}

}  // namespace kcl
