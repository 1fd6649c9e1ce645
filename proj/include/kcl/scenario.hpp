#ifndef KCL_SCENARIO_HPP_
#define KCL_SCENARIO_HPP_

// Scenario catalogue and run configuration.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "kcl/closure.hpp"
#include "kcl/kcl2d.hpp"
#include "kcl/kcl3d.hpp"
#include "kcl/scalar_claw.hpp"

namespace kcl {

enum class Scenario { expanding_circle, wedge, sinusoidal_shock, periodic_pulse3d, burgers_riemann };

std::string to_string(Scenario scenario);
Scenario scenario_from_string(const std::string& name);
std::string to_string(Reconstruction reconstruction);
Reconstruction reconstruction_from_string(const std::string& name);

struct ScenarioParams {
  double r0 = 1.0;           // expanding_circle radius
  double wedge_angle = 0.3;  // wedge: theta = +angle left of the corner, -angle right
  double kappa = 0.1;        // periodic_pulse3d amplitude
  double a = 2.0;            // periodic_pulse3d half-periods
  double b = 2.0;
  double u_left = 1.0;  // burgers_riemann states
  double u_right = 0.0;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::sinusoidal_shock;
  ClosureKind closure = ClosureKind::wnlrt;
  // Initial front speed; also the constant of the constant_m closure.
  double m0 = 1.2;
  // Cells along xi (per direction in 3-D, along x for burgers_riemann).
  std::size_t cells = 512;
  double cfl = 0.45;
  double t_end = 1.0;
  // Spacing of snapshots, kink detection and metrics rows; 0 keeps only the
  // initial and final states.
  double snap_every = 0.0;
  // Every output_stride-th snapshot is written to a file; the last always is.
  std::size_t output_stride = 1;
  std::string out_dir = "out";
  std::uint64_t seed = 0;  // reserved; every scenario is deterministic
  Reconstruction reconstruction = Reconstruction::first_order;
  double kink_threshold = 0.05;
  ScenarioParams params;

  /// Throws kcl::Error("config", ...) naming the offending field.
  void validate() const;
};

/// Defaults of each scenario, reproducing its reference setup.
ScenarioConfig default_config(Scenario scenario);

nlohmann::json to_json(const ScenarioConfig& config);
/// Fields missing from the document keep the scenario defaults; unknown
/// fields are rejected.
ScenarioConfig config_from_json(const nlohmann::json& doc);

struct FrontSetup {
  KclState2 state;
  Point2 anchor;  // physical position of the xi_min end
};

struct SurfaceSetup {
  KclState3 state;
  Vec3 anchor;  // physical position of the centre of cell (0, 0)
};

struct ScalarSetup {
  scalar::ScalarClaw claw;
  scalar::Grid1 grid;
  std::vector<double> u;
};

/// Cell averages of the exact tangent x_xi of each front.
FrontSetup build_front(const ScenarioConfig& config);
/// Point values of the exact tangents at cell centres.
SurfaceSetup build_surface(const ScenarioConfig& config);
ScalarSetup build_scalar(const ScenarioConfig& config);

/// x = 0.2 - 0.2 cos(pi y / 2)
double sinusoidal_profile(double y);
/// x3 = kappa (2 - cos(pi x1 / a) - cos(pi x2 / b))
double pulse_height(const ScenarioParams& p, double x1, double x2);

}  // namespace kcl

#endif  // KCL_SCENARIO_HPP_
