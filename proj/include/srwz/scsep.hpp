#pragma once

#include <vector>

namespace srwz::scsep {

// Discrete memoryless channel P(y | x) over finite alphabets.
struct Dmc {
  int in_size = 0;
  int out_size = 0;
  std::vector<double> transition;  // row-major [x][y]

  static Dmc create(int in_size, int out_size, std::vector<double> transition);
  double at(int x, int y) const { return transition[static_cast<std::size_t>(x) * out_size + y]; }
};

// Capacity in bits via alternating maximization; iteration stops when the
// standard upper and lower capacity bounds agree within tol.
double channel_capacity(const Dmc& dmc, double tol = 1e-9);

// Separation-check instance: per-channel capacities, bandwidth expansion
// factors, and the cumulative source sum-rate requirements.
struct ScInstance {
  std::vector<double> capacities;
  std::vector<double> rhos;
  std::vector<double> sumrates;  // cumulative, bits
};

struct ScReport {
  std::vector<double> cum_budget;
  std::vector<bool> per_stage_ok;
  bool overall_ok = false;
};

// Stage m is achievable iff sum_{i<=m} rho_i C_i >= sumrates[m] - tol.
ScReport check_sc_achievable(const ScInstance& inst, double tol);

}  // namespace srwz::scsep
