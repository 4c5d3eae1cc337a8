#include "srwz/scsep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace srwz::scsep {

namespace {
constexpr double kRowTol = 1e-12;
}

Dmc Dmc::create(int in_size, int out_size, std::vector<double> transition) {
  if (in_size < 1 || out_size < 1) throw std::invalid_argument("Dmc: empty alphabet");
  if (transition.size() != static_cast<std::size_t>(in_size) * out_size)
    throw std::invalid_argument("Dmc: transition table size mismatch");
  for (int x = 0; x < in_size; ++x) {
    double row = 0.0;
    for (int y = 0; y < out_size; ++y) {
      const double v = transition[static_cast<std::size_t>(x) * out_size + y];
      if (!(v >= 0.0)) throw std::invalid_argument("Dmc: negative transition probability");
      row += v;
    }
    if (std::abs(row - 1.0) > kRowTol)
      throw std::invalid_argument("Dmc: transition row does not sum to 1");
  }
  return Dmc{in_size, out_size, std::move(transition)};
}

double channel_capacity(const Dmc& dmc, double tol) {
  const int nx = dmc.in_size, ny = dmc.out_size;
  std::vector<double> p(nx, 1.0 / nx), q(ny), d(nx);
  for (int iter = 0; iter < 100000; ++iter) {
    std::fill(q.begin(), q.end(), 0.0);
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < ny; ++y) q[y] += p[x] * dmc.at(x, y);
    // d[x] = D(W(.|x) || q), the per-letter information density.
    double lower = 0.0, upper = -std::numeric_limits<double>::infinity();
    for (int x = 0; x < nx; ++x) {
      double s = 0.0;
      for (int y = 0; y < ny; ++y) {
        const double w = dmc.at(x, y);
        if (w > 0.0) s += w * std::log2(w / q[y]);
      }
      d[x] = s;
      lower += p[x] * s;
      upper = std::max(upper, s);
    }
    if (upper - lower <= tol) return 0.5 * (upper + lower);
    double norm = 0.0;
    for (int x = 0; x < nx; ++x) {
      p[x] *= std::exp2(d[x]);
      norm += p[x];
    }
    for (int x = 0; x < nx; ++x) p[x] /= norm;
  }
  throw std::logic_error("channel_capacity: alternating maximization failed to converge");
}

ScReport check_sc_achievable(const ScInstance& inst, double tol) {
  const std::size_t n = inst.sumrates.size();
  if (inst.capacities.size() != n || inst.rhos.size() != n)
    throw std::invalid_argument("check_sc_achievable: vector length mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (!(inst.capacities[i] >= 0.0) || !(inst.rhos[i] >= 0.0) || !(inst.sumrates[i] >= 0.0) ||
        !std::isfinite(inst.sumrates[i]))
      throw std::invalid_argument("check_sc_achievable: entries must be finite and nonnegative");

  ScReport rep;
  rep.overall_ok = true;
  double budget = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    budget += inst.rhos[m] * inst.capacities[m];
    rep.cum_budget.push_back(budget);
    const bool ok = budget >= inst.sumrates[m] - tol;
    rep.per_stage_ok.push_back(ok);
    rep.overall_ok = rep.overall_ok && ok;
  }
  return rep;
}

}  // namespace srwz::scsep
