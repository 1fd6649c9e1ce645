#include "kcl/closure.hpp"

#include <algorithm>
#include <cmath>

#include "kcl/error.hpp"

namespace kcl {

namespace {

constexpr const char* kModule = "closure";
constexpr double kLowerExcess = 1e-14;  // bracket for m - 1
constexpr double kUpperExcess = 20.0;

}  // namespace

std::string to_string(ClosureKind kind) {
  return kind == ClosureKind::constant_m ? "constant_m" : "wnlrt";
}

ClosureKind closure_kind_from_string(const std::string& name) {
  if (name == "constant_m") return ClosureKind::constant_m;
  if (name == "wnlrt") return ClosureKind::wnlrt;
  throw Error(kModule, "unknown closure kind '" + name + "'");
}

double wnlrt_profile(double m) {
  const double s = m - 1.0;
  return s * s * std::exp(2.0 * s);
}

double wnlrt_invariant(double g, double m) { return g * wnlrt_profile(m); }

double recover_m(double g, double fval) { return recover_m(g, fval, 1.0 + std::sqrt(fval / g)); }

double recover_m(double g, double fval, double guess) {
  if (!(g > 0.0) || !(fval > 0.0)) throw Error(kModule, "closure inversion needs g > 0 and Fval > 0");
  // Solve phi(s) = 2 ln s + 2 s - ln(fval / g) = 0 for s = m - 1; phi is
  // increasing and concave, and phi = 0 is equivalent to the profile
  // matching fval / g.
  const double log_target = std::log(fval) - std::log(g);
  auto phi = [&](double s) { return 2.0 * std::log(s) + 2.0 * s - log_target; };

  double lo = kLowerExcess, hi = kUpperExcess;
  if (phi(lo) > 0.0 || phi(hi) < 0.0) throw Error(kModule, "closure inversion failed");
  double s = std::clamp(guess - 1.0, lo, hi);
  for (int it = 0; it < 100; ++it) {
    const double f = phi(s);
    if (std::abs(f) <= 1e-13) return 1.0 + s;
    (f < 0.0 ? lo : hi) = s;
    double next = s - f / (2.0 / s + 2.0);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    s = next;
  }
  throw Error(kModule, "closure inversion failed");
}

Closure Closure::constant(double m0) {
  if (!(m0 > 0.0)) throw Error(kModule, "constant speed must be positive");
  Closure c;
  c.kind_ = ClosureKind::constant_m;
  c.m0_ = m0;
  return c;
}

Closure Closure::wnlrt(std::span<const double> g, std::span<const double> m) {
  if (g.size() != m.size()) throw Error(kModule, "metric and speed sizes differ");
  Closure c;
  c.kind_ = ClosureKind::wnlrt;
  c.invariant_.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(m[i] > 1.0)) throw Error(kModule, "subsonic front: WNLRT closure undefined");
    if (!(g[i] > 0.0)) throw Error(kModule, "metric must be positive");
    c.invariant_[i] = wnlrt_invariant(g[i], m[i]);
  }
  return c;
}

double Closure::speed(std::size_t cell, double g) const {
  if (kind_ == ClosureKind::constant_m) return m0_;
  return recover_m(g, invariant_[cell]);
}

double Closure::speed(std::size_t cell, double g, double guess) const {
  if (kind_ == ClosureKind::constant_m) return m0_;
  return recover_m(g, invariant_[cell], guess);
}

std::vector<double> Closure::update_m(std::span<const double> g) const {
  if (kind_ == ClosureKind::wnlrt && g.size() != invariant_.size()) {
    throw Error(kModule, "state size does not match closure");
  }
  std::vector<double> m(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) m[i] = speed(i, g[i]);
  return m;
}

}  // namespace kcl
