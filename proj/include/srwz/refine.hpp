#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "srwz/region.hpp"

namespace srwz::refine {

struct ConditionReport {
  bool pass = false;
  // Residual in bits per evaluated condition instance.
  std::map<std::string, double> residuals;
  std::optional<std::string> failing;
};

// Strict-refinability conditions for one candidate channel:
//  1. I(X;Wm|Ym) = wz_rates[m] and stage distortion within targets;
//  2. (W1..WN) <-> X <-> YN <-> ... <-> Y1;
//  3. (W1..W_{m-1}) <-> (Wm, Ym) <-> X  (skipped for stages whose decoder
//     genuinely uses the earlier W's, in which case condition 1 tests
//     I(X;W1..Wm|Ym) instead);
//  4. I(Wi; Ym | W1..W_{i-1}, Yi) = 0 for all i < m  (N(N-1)/2 equalities).
// A failed check refutes only this candidate, not strict refinability itself.
ConditionReport check_strict_conditions(const finite::DegradedSource& src,
                                        const finite::TestChannel& ch,
                                        const finite::DistortionMatrix& dist,
                                        std::span<const double> targets,
                                        std::span<const double> wz_rates, double tol);

// Equality R_HB(D1..Dm) = R*_{X|Ym}(Dm) at every stage.
bool check_necessary_condition(std::span<const double> hb_values,
                               std::span<const double> wz_values, double tol);

// Generalized refinability of one candidate: the cumulative rate vector must
// reproduce the per-stage Heegard-Berger values.
ConditionReport check_generalized(const finite::DegradedSource& src,
                                  const finite::TestChannel& ch,
                                  std::span<const double> hb_values, double tol);

struct SrVerdict {
  bool strict = false;
  bool generalized = false;
  bool necessary = false;
  bool consistent = true;
  std::map<std::string, double> residuals;
  std::optional<std::string> failing_condition;
};

// Combines the three measured verdicts, enforcing the equivalence
// strict == (generalized && necessary). A measured strict verdict that
// disagrees clears the consistency flag.
SrVerdict verdict_combined(bool strict_ok, bool generalized_ok, bool necessary_ok);

}  // namespace srwz::refine
