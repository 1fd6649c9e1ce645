#ifndef KCL_EXEC_HPP_
#define KCL_EXEC_HPP_

// Cell loops run either serially (the reference path used by the tests) or
// through OpenMP. Loop bodies write only to their own index, so both paths
// produce bit-identical results.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <vector>

namespace kcl {

enum class Exec { serial, parallel };

template <class Body>
void for_each_index(Exec exec, std::size_t n, Body&& body) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(kcl_exec_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

/// Maximum of body(i) over [0, n); 0 for an empty range. max is
/// order-independent, so the parallel result equals the serial one.
template <class Body>
double max_over(Exec exec, std::size_t n, Body&& body) {
  std::vector<double> values(n);
  for_each_index(exec, n, [&](std::size_t i) { values[i] = body(i); });
  double result = 0.0;
  for (double v : values) result = std::max(result, v);
  return result;
}

}  // namespace kcl

#endif  // KCL_EXEC_HPP_
