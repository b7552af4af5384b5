#pragma once

// Thin wrappers over Boost.Math quadrature that turn a missed tolerance
// into a QuadratureError instead of a silently inaccurate number.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "wavelab/errors.hpp"

namespace wavelab::detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

template <class F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol,
                          double abs_floor = 1e-300) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  double error = 0.0;
  double l1 = 0.0;
  const double value = Rule::integrate(f, a, b, 20, rel_tol, &error, &l1);
  // roundoff alone leaves an estimate of a few ulps of the L1 mass
  const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * l1;
  if (!std::isfinite(value) || error > std::max({100.0 * rel_tol * l1, roundoff, abs_floor})) {
    throw QuadratureError("adaptive quadrature on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "] did not converge (error estimate " +
                          sci(error) + ", L1 mass " + sci(l1) + ")");
  }
  return value;
}

}  // namespace wavelab::detail
