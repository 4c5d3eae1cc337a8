#include "srwz/refine.hpp"

#include <cmath>
#include <stdexcept>

namespace srwz::refine {

namespace {

std::string w_name(int stage) { return "W" + std::to_string(stage + 1); }
std::string y_name(int stage) { return "Y" + std::to_string(stage + 1); }

void note(ConditionReport& rep, const std::string& key, double residual, double tol) {
  rep.residuals[key] = residual;
  if (residual > tol && !rep.failing) rep.failing = key;
}

}  // namespace

ConditionReport check_strict_conditions(const finite::DegradedSource& src,
                                        const finite::TestChannel& ch,
                                        const finite::DistortionMatrix& dist,
                                        std::span<const double> targets,
                                        std::span<const double> wz_rates, double tol) {
  const int n = src.n_stages;
  if (static_cast<int>(wz_rates.size()) != n || static_cast<int>(targets.size()) != n)
    throw std::invalid_argument("check_strict_conditions: stage-count mismatch");
  if (static_cast<int>(ch.w_sizes.size()) != n)
    throw std::invalid_argument("check_strict_conditions: channel stage-count mismatch");

  const prob::JointPmf joint = finite::joint_with_source(src, ch);
  const auto dists = finite::achieved_distortions(src, ch, dist);
  ConditionReport rep;

  for (int m = 0; m < n; ++m) {
    const bool simple = ch.decoder_is_simple(m);
    std::vector<std::string> ws;
    if (simple) {
      ws = {w_name(m)};
    } else {
      for (int i = 0; i <= m; ++i) ws.push_back(w_name(i));
    }
    const std::vector<std::string> ym{y_name(m)};
    const double info = prob::cond_mutual_info(joint, {{"X"}}, ws, ym);
    note(rep, "cond1_rate_stage" + std::to_string(m + 1), std::abs(info - wz_rates[m]), tol);
    note(rep, "cond1_distortion_stage" + std::to_string(m + 1),
         std::max(0.0, dists[m] - targets[m]), tol);
  }

  std::vector<std::vector<std::string>> chain;
  std::vector<std::string> all_w;
  for (int m = 0; m < n; ++m) all_w.push_back(w_name(m));
  chain.push_back(all_w);
  chain.push_back({"X"});
  for (int m = n; m >= 1; --m) chain.push_back({"Y" + std::to_string(m)});
  note(rep, "cond2_markov", prob::markov_check(joint, chain, tol).max_violation_bits, tol);

  for (int m = 1; m < n; ++m) {
    if (!ch.decoder_is_simple(m)) continue;  // full-context decoder form: condition 3 does not apply
    std::vector<std::string> earlier;
    for (int i = 0; i < m; ++i) earlier.push_back(w_name(i));
    const std::vector<std::string> given{w_name(m), y_name(m)};
    note(rep, "cond3_stage" + std::to_string(m + 1),
         prob::cond_mutual_info(joint, {{"X"}}, earlier, given), tol);
  }

  for (int m = 1; m < n; ++m)
    for (int i = 0; i < m; ++i) {
      std::vector<std::string> given;
      for (int j = 0; j < i; ++j) given.push_back(w_name(j));
      given.push_back(y_name(i));
      const std::vector<std::string> wi{w_name(i)}, ym{y_name(m)};
      note(rep,
           "cond4_i" + std::to_string(i + 1) + "_m" + std::to_string(m + 1),
           prob::cond_mutual_info(joint, wi, ym, given), tol);
    }

  rep.pass = !rep.failing.has_value();
  return rep;
}

bool check_necessary_condition(std::span<const double> hb_values,
                               std::span<const double> wz_values, double tol) {
  if (hb_values.size() != wz_values.size())
    throw std::invalid_argument("check_necessary_condition: length mismatch");
  for (std::size_t m = 0; m < hb_values.size(); ++m)
    if (std::abs(hb_values[m] - wz_values[m]) > tol) return false;
  return true;
}

ConditionReport check_generalized(const finite::DegradedSource& src,
                                  const finite::TestChannel& ch,
                                  std::span<const double> hb_values, double tol) {
  if (static_cast<int>(hb_values.size()) != src.n_stages)
    throw std::invalid_argument("check_generalized: stage-count mismatch");
  const auto cum = finite::rate_vector(src, ch);
  ConditionReport rep;
  for (int m = 0; m < src.n_stages; ++m)
    note(rep, "hb_match_stage" + std::to_string(m + 1), std::abs(cum[m] - hb_values[m]), tol);
  rep.pass = !rep.failing.has_value();
  return rep;
}

SrVerdict verdict_combined(bool strict_ok, bool generalized_ok, bool necessary_ok) {
  SrVerdict v;
  v.generalized = generalized_ok;
  v.necessary = necessary_ok;
  v.strict = generalized_ok && necessary_ok;
  v.consistent = (strict_ok == v.strict);
  if (!v.consistent) v.failing_condition = "strict_equivalence";
  return v;
}

}  // namespace srwz::refine
