#include "srwz/binary.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "srwz/errors.hpp"

namespace srwz::prob {

namespace {

constexpr double kBoundaryTol = 1e-14;

double checked_prob(double u, const char* what) {
  if (u >= -kBoundaryTol && u < 0.0) return 0.0;
  if (u > 1.0 && u <= 1.0 + kBoundaryTol) return 1.0;
  if (!(u >= 0.0 && u <= 1.0))
    throw std::domain_error(std::string(what) + ": probability outside [0,1]");
  return u;
}

void check_crossover(double p) {
  if (!(p >= 0.0 && p < 0.5))
    throw std::domain_error("crossover probability must lie in [0, 0.5)");
}

}  // namespace

double binary_entropy(double u) {
  u = checked_prob(u, "binary_entropy");
  if (u == 0.0 || u == 1.0) return 0.0;
  return -u * std::log2(u) - (1.0 - u) * std::log2(1.0 - u);
}

double binary_convolve(double u, double v) {
  u = checked_prob(u, "binary_convolve");
  v = checked_prob(v, "binary_convolve");
  return u * (1.0 - v) + v * (1.0 - u);
}

double g_func(double p, double u) {
  check_crossover(p);
  u = checked_prob(u, "g_func");
  return binary_entropy(binary_convolve(p, u)) - binary_entropy(u);
}

double g_deriv(double p, double u) {
  check_crossover(p);
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("g_deriv: u must be interior to (0,1)");
  const double w = binary_convolve(p, u);
  return (1.0 - 2.0 * p) * std::log2((1.0 - w) / w) - std::log2((1.0 - u) / u);
}

double g_second_deriv(double p, double u) {
  check_crossover(p);
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("g_second_deriv: u must be interior to (0,1)");
  const double w = binary_convolve(p, u);
  const double ln2 = std::log(2.0);
  return -(1.0 - 2.0 * p) * (1.0 - 2.0 * p) / (ln2 * w * (1.0 - w)) +
         1.0 / (ln2 * u * (1.0 - u));
}

double critical_distortion(double p) {
  if (!(p > 0.0 && p < 0.5))
    throw std::domain_error("critical_distortion: p must lie in (0, 0.5)");

  // r(d) = G(d) - (d - p) G'(d) is the tangent of G at d evaluated at p.
  // It is strictly increasing on (0, p) and crosses zero exactly once.
  const auto residual = [p](double d) {
    return g_func(p, d) - (d - p) * g_deriv(p, d);
  };

  double lo = 1e-9, hi = p - 1e-9;
  double rlo = residual(lo), rhi = residual(hi);
  if (!(rlo < 0.0 && rhi > 0.0))
    throw NumericalError("critical_distortion: residual does not bracket a root on (0, p); r(lo)=" +
                         std::to_string(rlo) + " r(hi)=" + std::to_string(rhi));
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  double d = 0.5 * (lo + hi);
  // A couple of Newton steps sharpen the root well below the bisection width.
  for (int it = 0; it < 3; ++it) {
    const double rp = (p - d) * g_second_deriv(p, d);
    if (rp <= 0.0) break;
    const double step = residual(d) / rp;
    const double next = d - step;
    if (!(next > 0.0 && next < p)) break;
    d = next;
  }
  const double certified = std::abs(g_func(p, d) / (d - p) - g_deriv(p, d));
  if (!(certified <= 1e-10))
    throw NumericalError("critical_distortion: residual " + std::to_string(certified) +
                         " exceeds 1e-10 at d=" + std::to_string(d));
  return d;
}

}  // namespace srwz::prob
