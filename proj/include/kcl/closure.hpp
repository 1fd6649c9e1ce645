#ifndef KCL_CLOSURE_HPP_
#define KCL_CLOSURE_HPP_

// Closures supply the front speed m that the kinematical conservation laws
// leave undetermined.
//
// constant_m: m = m0 everywhere (linear ray theory).
// wnlrt: along each ray (fixed xi) the quantity g (m - 1)^2 exp(2 (m - 1))
//   keeps its initial value, so m is recovered from the current metric g.
//   Requires m > 1.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace kcl {

enum class ClosureKind { constant_m, wnlrt };

std::string to_string(ClosureKind kind);
ClosureKind closure_kind_from_string(const std::string& name);

/// (m - 1)^2 exp(2 (m - 1)), strictly increasing for m > 1.
double wnlrt_profile(double m);

/// g (m - 1)^2 exp(2 (m - 1))
double wnlrt_invariant(double g, double m);

/// The unique m > 1 with wnlrt_invariant(g, m) == fval.
double recover_m(double g, double fval);
double recover_m(double g, double fval, double guess);

class Closure {
 public:
  static Closure constant(double m0);
  /// Freezes the invariant of every cell from its initial (g, m).
  static Closure wnlrt(std::span<const double> g, std::span<const double> m);

  ClosureKind kind() const { return kind_; }
  double m0() const { return m0_; }
  std::span<const double> invariant() const { return invariant_; }

  /// Speed of the given cell when its metric is g.
  double speed(std::size_t cell, double g) const;
  double speed(std::size_t cell, double g, double guess) const;

  std::vector<double> update_m(std::span<const double> g) const;

 private:
  ClosureKind kind_ = ClosureKind::constant_m;
  double m0_ = 1.0;
  std::vector<double> invariant_;
};

}  // namespace kcl

#endif  // KCL_CLOSURE_HPP_
