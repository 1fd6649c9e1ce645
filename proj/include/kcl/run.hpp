#ifndef KCL_RUN_HPP_
#define KCL_RUN_HPP_

// Runs one scenario and writes its outputs to config.out_dir:
//
//   manifest.json      config echo, code version, wall time, results
//   front_NNNN.csv     t, xi, x, y, m, theta, g            (2-D fronts)
//   surface_NNNN.csv   t, xi1, xi2, x, y, z, m, n1, n2, n3, sol_res
//   scalar_NNNN.csv    t, x, u                             (burgers_riemann)
//   kinks.csv          time, xi, theta_jump, m_jump, g_jump, speed_K
//   shock.csv          t, x                                (burgers_riemann)
//   metrics.csv        one row per snapshot
//
// NNNN is the snapshot index. Everything except the wall time in the
// manifest is reproduced byte for byte by a repeat run.

#include <string>
#include <vector>

#include "json.hpp"
#include "kcl/exec.hpp"
#include "kcl/scenario.hpp"

namespace kcl {

std::string version();

struct RunReport {
  nlohmann::json results;
  std::vector<std::string> files;  // names relative to out_dir, manifest last
  // 3-D runs that left the smooth regime.
  bool stopped = false;
  std::string diagnostic;
};

RunReport run(const ScenarioConfig& config, Exec exec = Exec::parallel);

}  // namespace kcl

#endif  // KCL_RUN_HPP_
