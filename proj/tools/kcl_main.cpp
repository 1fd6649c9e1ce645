// kcl: run a scenario and write its snapshots, kinks, metrics and manifest.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "kcl/error.hpp"
#include "kcl/run.hpp"
#include "kcl/scenario.hpp"

namespace {

nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw kcl::Error("config", "cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw kcl::Error("config", "cannot parse " + path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinematical conservation laws: fronts, kinks and rays"};
  app.set_version_flag("--version", kcl::version());

  std::optional<std::string> config_path, scenario, closure, out_dir, reconstruction;
  std::optional<long long> cells;
  std::optional<double> t_end, cfl, snap_every;
  bool print_config = false, serial = false;
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--scenario", scenario,
                 "expanding_circle | wedge | sinusoidal_shock | periodic_pulse3d | burgers_riemann");
  app.add_option("--cells", cells, "cells along xi (per direction in 3-D)");
  app.add_option("--t-end", t_end, "final time");
  app.add_option("--cfl", cfl, "CFL number in (0, 1)");
  app.add_option("--closure", closure, "constant_m | wnlrt");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--snap-every", snap_every, "snapshot spacing in time");
  app.add_option("--reconstruction", reconstruction, "first_order | muscl");
  app.add_flag("--print-config", print_config, "print the effective configuration and exit");
  app.add_flag("--serial", serial, "use the serial reference kernels");
  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json doc = config_path ? load_config(*config_path) : nlohmann::json::object();
    if (!doc.is_object()) throw kcl::Error("config", "top level must be an object");
    if (scenario) {
      // Switching scenario drops the file's scenario-specific values.
      if (doc.value("scenario", *scenario) != *scenario) doc = nlohmann::json::object();
      doc["scenario"] = *scenario;
    }
    if (cells) doc["cells"] = *cells;
    if (t_end) doc["t_end"] = *t_end;
    if (cfl) doc["cfl"] = *cfl;
    if (closure) {
      if (!doc.contains("closure") || !doc["closure"].is_object()) doc["closure"] = nlohmann::json::object();
      doc["closure"]["kind"] = *closure;
      if (*closure == "wnlrt" && !doc["closure"].contains("m0")) doc["closure"]["m0"] = 1.2;
    }
    if (out_dir) doc["out_dir"] = *out_dir;
    if (snap_every) doc["snap_every"] = *snap_every;
    if (reconstruction) doc["reconstruction"] = *reconstruction;

    const kcl::ScenarioConfig config = kcl::config_from_json(doc);
    if (print_config) {
      std::cout << kcl::to_json(config).dump(2) << '\n';
      return 0;
    }
    const kcl::RunReport report = kcl::run(config, serial ? kcl::Exec::serial : kcl::Exec::parallel);
    std::cout << report.results.dump(2) << '\n';
    if (report.stopped) std::cerr << "kcl3d: " << report.diagnostic << '\n';
    return 0;
  } catch (const kcl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
