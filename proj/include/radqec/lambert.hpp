#pragma once

#include <cmath>
#include <stdexcept>

namespace radqec {

namespace detail {

// Solve w + log(w) = log_z by Newton iteration. Used for large arguments
// where e^w would overflow; also the natural form when only log(z) is known.
inline double lambert_w0_from_log(double log_z) {
  double w = log_z - std::log(log_z);
  for (int it = 0; it < 64; ++it) {
    const double f = w + std::log(w) - log_z;
    const double step = f / (1.0 + 1.0 / w);
    w -= step;
    if (std::abs(step) <= 1e-15 * std::abs(w)) break;
  }
  return w;
}

// Near the branch point the map z(w) is quadratic, so iterate on t = w + 1.
// The z-residual of the result tracks the evaluation error of f, a few ulp.
inline double lambert_w0_near_branch(double z) {
  const double p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
  double t = p * (1.0 - p / 3.0 + 11.0 * p * p / 72.0);
  if (t <= 0.0) return -1.0;
  for (int it = 0; it < 80; ++it) {
    const double et = std::exp(t - 1.0);
    const double f = (t - 1.0) * et - z;
    double next = t - f / (t * et);
    if (next <= 0.0) next = 0.5 * t;
    const double step = std::abs(next - t);
    t = next;
    if (step <= 1e-16 * t) break;
  }
  return t - 1.0;
}

} // namespace detail

// Principal branch W0 of the Lambert function: w * e^w = z for z >= -1/e.
// Halley iteration from a branch-appropriate initial guess; the residual
// |w e^w - z| stays below 1e-12 * max(1, |z|) across the domain.
inline double lambert_w0(double z) {
  const double branch = -std::exp(-1.0);
  if (!(z >= branch)) {
    // Tolerate rounding right at the branch point.
    if (z > branch - 4.0 * std::abs(branch) * 1e-16) return -1.0;
    throw std::domain_error("lambert_w0: argument below -1/e");
  }
  if (z == 0.0) return 0.0;
  if (z > 1e15) return detail::lambert_w0_from_log(std::log(z));
  if (z < branch + 0.05) return detail::lambert_w0_near_branch(z);

  double w;
  if (z < 3.0) {
    const double l = std::log1p(z);
    w = l * (1.0 - 0.25 * l / (1.0 + l));
  } else {
    const double l1 = std::log(z);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 1e-16 * std::abs(w)) break;
  }
  return w;
}

} // namespace radqec
