#include "kcl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "kcl/error.hpp"

namespace kcl {

namespace {

constexpr const char* kModule = "config";
constexpr double kPi = std::numbers::pi;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw Error(kModule, "field '" + field + "': " + what);
}

template <class T>
T read(const nlohmann::json& doc, const std::string& key, const std::string& field, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    field_error(field, "wrong type");
  }
}

void reject_unknown(const nlohmann::json& doc, const std::set<std::string>& known, const std::string& prefix) {
  if (!doc.is_object()) field_error(prefix.empty() ? "<root>" : prefix, "expected an object");
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) field_error(prefix + item.key(), "unknown field");
  }
}

// Cell averages of g (sin theta, cos theta) for a piecewise constant theta
// that switches from +angle to -angle at xi = 0.
ConservedPair wedge_pair(const XiGrid& grid, double angle) {
  ConservedPair h;
  for (std::size_t i = 0; i < grid.cells; ++i) {
    const double a = grid.interface(i), b = grid.interface(i + 1);
    const double left = std::clamp(-a, 0.0, b - a) / (b - a);
    const double right = 1.0 - left;
    h.h1.push_back(left * std::sin(angle) - right * std::sin(angle));
    h.h2.push_back(std::cos(angle));
  }
  return h;
}

}  // namespace

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::expanding_circle: return "expanding_circle";
    case Scenario::wedge: return "wedge";
    case Scenario::sinusoidal_shock: return "sinusoidal_shock";
    case Scenario::periodic_pulse3d: return "periodic_pulse3d";
    case Scenario::burgers_riemann: return "burgers_riemann";
  }
  return "unknown";
}

Scenario scenario_from_string(const std::string& name) {
  for (Scenario s : {Scenario::expanding_circle, Scenario::wedge, Scenario::sinusoidal_shock,
                     Scenario::periodic_pulse3d, Scenario::burgers_riemann}) {
    if (to_string(s) == name) return s;
  }
  field_error("scenario", "unknown scenario '" + name + "'");
}

std::string to_string(Reconstruction reconstruction) {
  return reconstruction == Reconstruction::muscl ? "muscl" : "first_order";
}

Reconstruction reconstruction_from_string(const std::string& name) {
  if (name == "first_order") return Reconstruction::first_order;
  if (name == "muscl") return Reconstruction::muscl;
  field_error("reconstruction", "unknown reconstruction '" + name + "'");
}

void ScenarioConfig::validate() const {
  const std::size_t min_cells = scenario == Scenario::periodic_pulse3d ? 32 : 16;
  if (cells < min_cells) field_error("cells", "need at least 16 cells per period");
  if (!(cfl > 0.0 && cfl < 1.0)) field_error("cfl", "must lie in (0, 1)");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) field_error("t_end", "must be positive");
  if (!(snap_every >= 0.0) || !std::isfinite(snap_every)) field_error("snap_every", "must be non-negative");
  if (output_stride < 1) field_error("output_stride", "must be at least 1");
  if (!(m0 > 0.0) || !std::isfinite(m0)) field_error("closure.m0", "must be positive");
  if (closure == ClosureKind::wnlrt && !(m0 > 1.0)) field_error("closure.m0", "wnlrt needs m0 > 1");
  if (!(kink_threshold > 0.0)) field_error("kink_threshold", "must be positive");
  if (out_dir.empty()) field_error("out_dir", "must not be empty");
  if (!(params.r0 > 0.0)) field_error("params.r0", "must be positive");
  if (!(params.wedge_angle > 0.0 && params.wedge_angle < kPi / 2)) {
    field_error("params.wedge_angle", "must lie in (0, pi/2)");
  }
  if (!(params.kappa >= 0.0) || !std::isfinite(params.kappa)) field_error("params.kappa", "must be non-negative");
  if (!(params.a > 0.0)) field_error("params.a", "must be positive");
  if (!(params.b > 0.0)) field_error("params.b", "must be positive");
  if (!std::isfinite(params.u_left)) field_error("params.u_left", "must be finite");
  if (!std::isfinite(params.u_right)) field_error("params.u_right", "must be finite");
}

ScenarioConfig default_config(Scenario scenario) {
  ScenarioConfig c;
  c.scenario = scenario;
  switch (scenario) {
    case Scenario::expanding_circle:
      c.closure = ClosureKind::constant_m;
      c.m0 = 1.0;
      c.cells = 512;
      c.t_end = 1.0;
      c.snap_every = 0.1;
      break;
    case Scenario::wedge:
      c.cells = 400;
      c.t_end = 1.0;
      c.snap_every = 0.05;
      c.reconstruction = Reconstruction::muscl;
      break;
    case Scenario::sinusoidal_shock:
      c.cells = 512;
      c.t_end = 40.0;
      c.snap_every = 0.1;
      c.output_stride = 10;
      c.reconstruction = Reconstruction::muscl;
      break;
    case Scenario::periodic_pulse3d:
      c.cells = 64;
      c.t_end = 1.0;
      c.snap_every = 0.25;
      break;
    case Scenario::burgers_riemann:
      c.closure = ClosureKind::constant_m;
      c.m0 = 1.0;
      c.cells = 400;
      c.t_end = 1.0;
      c.snap_every = 0.05;
      break;
  }
  return c;
}

nlohmann::json to_json(const ScenarioConfig& c) {
  nlohmann::json doc;
  doc["scenario"] = to_string(c.scenario);
  doc["closure"] = {{"kind", to_string(c.closure)}, {"m0", c.m0}};
  doc["cells"] = c.cells;
  doc["cfl"] = c.cfl;
  doc["t_end"] = c.t_end;
  doc["snap_every"] = c.snap_every;
  doc["output_stride"] = c.output_stride;
  doc["out_dir"] = c.out_dir;
  doc["seed"] = c.seed;
  doc["reconstruction"] = to_string(c.reconstruction);
  doc["kink_threshold"] = c.kink_threshold;
  doc["params"] = {{"r0", c.params.r0},         {"wedge_angle", c.params.wedge_angle},
                   {"kappa", c.params.kappa},   {"a", c.params.a},
                   {"b", c.params.b},           {"u_left", c.params.u_left},
                   {"u_right", c.params.u_right}};
  return doc;
}

ScenarioConfig config_from_json(const nlohmann::json& doc) {
  reject_unknown(doc,
                 {"scenario", "closure", "cells", "cfl", "t_end", "snap_every", "output_stride", "out_dir",
                  "seed", "reconstruction", "kink_threshold", "params"},
                 "");
  const std::string name = read<std::string>(doc, "scenario", "scenario", "sinusoidal_shock");
  ScenarioConfig c = default_config(scenario_from_string(name));

  if (doc.contains("closure")) {
    const nlohmann::json& closure = doc.at("closure");
    reject_unknown(closure, {"kind", "m0"}, "closure.");
    if (closure.contains("kind")) {
      const std::string kind = read<std::string>(closure, "kind", "closure.kind", "");
      try {
        c.closure = closure_kind_from_string(kind);
      } catch (const Error&) {
        field_error("closure.kind", "unknown closure '" + kind + "'");
      }
    }
    c.m0 = read<double>(closure, "m0", "closure.m0", c.m0);
  }
  const auto cells = read<std::int64_t>(doc, "cells", "cells", static_cast<std::int64_t>(c.cells));
  if (cells < 0) field_error("cells", "must be positive");
  c.cells = static_cast<std::size_t>(cells);
  c.cfl = read<double>(doc, "cfl", "cfl", c.cfl);
  c.t_end = read<double>(doc, "t_end", "t_end", c.t_end);
  c.snap_every = read<double>(doc, "snap_every", "snap_every", c.snap_every);
  const auto stride = read<std::int64_t>(doc, "output_stride", "output_stride",
                                         static_cast<std::int64_t>(c.output_stride));
  if (stride < 1) field_error("output_stride", "must be at least 1");
  c.output_stride = static_cast<std::size_t>(stride);
  c.out_dir = read<std::string>(doc, "out_dir", "out_dir", c.out_dir);
  c.seed = read<std::uint64_t>(doc, "seed", "seed", c.seed);
  if (doc.contains("reconstruction")) {
    c.reconstruction = reconstruction_from_string(read<std::string>(doc, "reconstruction", "reconstruction", ""));
  }
  c.kink_threshold = read<double>(doc, "kink_threshold", "kink_threshold", c.kink_threshold);
  if (doc.contains("params")) {
    const nlohmann::json& p = doc.at("params");
    reject_unknown(p, {"r0", "wedge_angle", "kappa", "a", "b", "u_left", "u_right"}, "params.");
    c.params.r0 = read<double>(p, "r0", "params.r0", c.params.r0);
    c.params.wedge_angle = read<double>(p, "wedge_angle", "params.wedge_angle", c.params.wedge_angle);
    c.params.kappa = read<double>(p, "kappa", "params.kappa", c.params.kappa);
    c.params.a = read<double>(p, "a", "params.a", c.params.a);
    c.params.b = read<double>(p, "b", "params.b", c.params.b);
    c.params.u_left = read<double>(p, "u_left", "params.u_left", c.params.u_left);
    c.params.u_right = read<double>(p, "u_right", "params.u_right", c.params.u_right);
  }
  c.validate();
  return c;
}

double sinusoidal_profile(double y) { return 0.2 - 0.2 * std::cos(kPi * y / 2.0); }

double pulse_height(const ScenarioParams& p, double x1, double x2) {
  return p.kappa * (2.0 - std::cos(kPi * x1 / p.a) - std::cos(kPi * x2 / p.b));
}

FrontSetup build_front(const ScenarioConfig& config) {
  config.validate();
  const std::size_t n = config.cells;
  FrontSetup setup;
  XiGrid grid;
  grid.cells = n;
  ConservedPair h;
  switch (config.scenario) {
    case Scenario::expanding_circle: {
      const double r0 = config.params.r0;
      grid = {0.0, 2.0 * kPi / static_cast<double>(n), n, Boundary2::periodic};
      for (std::size_t i = 0; i < n; ++i) {
        const double a = grid.interface(i), b = grid.interface(i + 1);
        h.h1.push_back(r0 * (std::cos(a) - std::cos(b)) / grid.spacing);
        h.h2.push_back(r0 * (std::sin(b) - std::sin(a)) / grid.spacing);
      }
      setup.anchor = {r0, 0.0};
      break;
    }
    case Scenario::sinusoidal_shock: {
      grid = {-2.0, 4.0 / static_cast<double>(n), n, Boundary2::periodic};
      for (std::size_t i = 0; i < n; ++i) {
        const double a = grid.interface(i), b = grid.interface(i + 1);
        h.h1.push_back(-(sinusoidal_profile(b) - sinusoidal_profile(a)) / grid.spacing);
        h.h2.push_back(1.0);
      }
      setup.anchor = {sinusoidal_profile(-2.0), -2.0};
      break;
    }
    case Scenario::wedge: {
      const double angle = config.params.wedge_angle;
      grid = {-1.0, 2.0 / static_cast<double>(n), n, Boundary2::extrapolate};
      h = wedge_pair(grid, angle);
      setup.anchor = {std::sin(angle), -std::cos(angle)};
      break;
    }
    default:
      throw Error(kModule, "scenario '" + to_string(config.scenario) + "' has no 2-D front");
  }
  setup.state = from_conserved(h, std::vector<double>(n, config.m0), grid);
  return setup;
}

SurfaceSetup build_surface(const ScenarioConfig& config) {
  config.validate();
  if (config.scenario != Scenario::periodic_pulse3d) {
    throw Error(kModule, "scenario '" + to_string(config.scenario) + "' has no surface");
  }
  const ScenarioParams& p = config.params;
  const std::size_t n = config.cells;
  SurfaceSetup setup;
  Grid3& g = setup.state.grid;
  g.xi1_min = -2.0 * p.a;
  g.xi2_min = -2.0 * p.b;
  g.spacing1 = 4.0 * p.a / static_cast<double>(n);
  g.spacing2 = 4.0 * p.b / static_cast<double>(n);
  g.cells1 = g.cells2 = n;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x1 = g.center1(i), x2 = g.center2(j);
      setup.state.U.emplace_back(1.0, 0.0, p.kappa * kPi / p.a * std::sin(kPi * x1 / p.a));
      setup.state.V.emplace_back(0.0, 1.0, p.kappa * kPi / p.b * std::sin(kPi * x2 / p.b));
      setup.state.m.push_back(config.m0);
    }
  }
  const double c1 = g.center1(0), c2 = g.center2(0);
  setup.anchor = Vec3(c1, c2, pulse_height(p, c1, c2));
  return setup;
}

ScalarSetup build_scalar(const ScenarioConfig& config) {
  config.validate();
  if (config.scenario != Scenario::burgers_riemann) {
    throw Error(kModule, "scenario '" + to_string(config.scenario) + "' has no scalar field");
  }
  ScalarSetup setup;
  setup.claw = scalar::ScalarClaw::burgers();
  setup.grid = {-1.0, 1.0, config.cells, scalar::Boundary1::outflow};
  for (std::size_t i = 0; i < config.cells; ++i) {
    setup.u.push_back(setup.grid.center(i) < 0.0 ? config.params.u_left : config.params.u_right);
  }
  return setup;
}

}  // namespace kcl
