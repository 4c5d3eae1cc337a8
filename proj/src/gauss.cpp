#include "srwz/gauss.hpp"

#include <cmath>
#include <stdexcept>

namespace srwz::gauss {

namespace {

void validate(const GaussParams& P) {
  if (!(P.var_x > 0.0 && P.var_n1 > 0.0 && P.var_n2 > 0.0))
    throw std::domain_error("GaussParams: variances must be strictly positive");
  if (!(P.d1 > 0.0 && P.d2 > 0.0))
    throw std::domain_error("GaussParams: distortions must be strictly positive");
}

double half_log2(double ratio) { return 0.5 * std::log2(ratio); }

// Precision-form MMSE of X given observations X + noise_i with the listed
// independent noise variances.
double mmse(double var_x, std::initializer_list<double> noise_vars) {
  double prec = 1.0 / var_x;
  for (double v : noise_vars) prec += 1.0 / v;
  return 1.0 / prec;
}

// True when the boundary curve D1 >= gamma s1 D2 / (gamma s1 - (1-gamma)^2 D2)
// holds; a non-positive denominator puts the curve at infinity.
bool on_or_above_curve(const GaussParams& P, const Derived& dv) {
  const double denom = dv.gamma * P.var_n1 - (1.0 - dv.gamma) * (1.0 - dv.gamma) * P.d2;
  if (denom <= 0.0) return true;
  return P.d1 >= dv.gamma * P.var_n1 * P.d2 / denom;
}

}  // namespace

std::string_view region_name(Region r) {
  switch (r) {
    case Region::I: return "I";
    case Region::II: return "II";
    case Region::III: return "III";
    case Region::IV: return "IV";
  }
  return "?";
}

Derived derived(const GaussParams& P) {
  validate(P);
  Derived dv;
  dv.d1_star = P.var_x * (P.var_n1 + P.var_n2) / (P.var_x + P.var_n1 + P.var_n2);
  dv.d2_star = P.var_x * P.var_n2 / (P.var_x + P.var_n2);
  dv.gamma = P.var_n2 / (P.var_n1 + P.var_n2);
  return dv;
}

Region classify_region(const GaussParams& P) {
  const Derived dv = derived(P);
  if (P.d1 > dv.d1_star) return P.d2 > dv.d2_star ? Region::IV : Region::II;
  if (P.d2 > dv.d2_star) return Region::III;
  return on_or_above_curve(P, dv) ? Region::I : Region::III;
}

double wz_rate_stage1(const GaussParams& P) {
  const Derived dv = derived(P);
  return P.d1 >= dv.d1_star ? 0.0 : half_log2(dv.d1_star / P.d1);
}

double wz_rate_stage2(const GaussParams& P) {
  const Derived dv = derived(P);
  return P.d2 >= dv.d2_star ? 0.0 : half_log2(dv.d2_star / P.d2);
}

double hb_rate(const GaussParams& P) {
  const Derived dv = derived(P);
  switch (classify_region(P)) {
    case Region::IV: return 0.0;
    case Region::II: return wz_rate_stage2(P);
    case Region::III: return wz_rate_stage1(P);
    case Region::I: {
      const double s = P.var_x + P.var_n1 + P.var_n2;
      const double mix = (1.0 - dv.gamma) * (1.0 - dv.gamma) * P.d1 + dv.gamma * P.var_n1;
      return half_log2(P.var_x * P.var_n1 * P.var_n2 / (P.d2 * s * mix));
    }
  }
  throw std::logic_error("hb_rate: unreachable");
}

TestChannelVars solve_test_channel(const GaussParams& P) {
  const Derived dv = derived(P);
  if (classify_region(P) != Region::I)
    throw std::domain_error("solve_test_channel: point is not in Region I");
  if (!(P.d1 < dv.d1_star && P.d2 < dv.d2_star))
    throw std::domain_error("solve_test_channel: point sits on a zero-rate edge of Region I");
  // Invert 1/D2 = 1/var_x + 1/var_n2 + 1/var_z2 and
  // 1/D1 = 1/var_x + 1/(var_n1 + var_n2) + 1/(var_z1 + var_z2).
  const double var_z2 = 1.0 / (1.0 / P.d2 - 1.0 / dv.d2_star);
  const double z_sum = 1.0 / (1.0 / P.d1 - 1.0 / dv.d1_star);
  const double var_z1 = z_sum - var_z2;
  if (var_z1 < -1e-12)
    throw std::domain_error("solve_test_channel: degenerate instance below the I/III curve");
  return TestChannelVars{std::max(var_z1, 0.0), var_z2};
}

ChannelRates channel_rates(const GaussParams& P, const TestChannelVars& tc) {
  const double z_sum = tc.var_z1 + tc.var_z2;
  const double v_y1 = mmse(P.var_x, {P.var_n1 + P.var_n2});
  const double v_w1y1 = mmse(P.var_x, {P.var_n1 + P.var_n2, z_sum});
  const double v_w1y2 = mmse(P.var_x, {P.var_n2, z_sum});
  // Given W2, the coarser W1 = W2 + Z1 is conditionally independent of X.
  const double v_w12y2 = mmse(P.var_x, {P.var_n2, tc.var_z2});
  ChannelRates rates;
  rates.r1 = half_log2(v_y1 / v_w1y1);
  rates.sum = rates.r1 + half_log2(v_w1y2 / v_w12y2);
  return rates;
}

AchievedDistortions achieved_distortions(const GaussParams& P, const TestChannelVars& tc) {
  return AchievedDistortions{mmse(P.var_x, {P.var_n1 + P.var_n2, tc.var_z1 + tc.var_z2}),
                             mmse(P.var_x, {P.var_n2, tc.var_z2})};
}

std::string_view sr_kind_name(SrKind k) {
  switch (k) {
    case SrKind::strict: return "strict";
    case SrKind::generalized_only: return "generalized-only";
    case SrKind::neither: return "neither";
  }
  return "?";
}

SrReport check_sr(const GaussParams& P, double tol) {
  const Derived dv = derived(P);
  SrReport rep;
  const double hb = hb_rate(P);
  const double wz1 = wz_rate_stage1(P);
  const double wz2 = wz_rate_stage2(P);
  rep.gap_wz2 = hb - wz2;
  rep.necessary = std::abs(rep.gap_wz2) <= tol;

  const bool d1_active = P.d1 < dv.d1_star * (1.0 - 1e-12);
  const bool d2_active = P.d2 < dv.d2_star * (1.0 - 1e-12);
  if (d1_active && d2_active && classify_region(P) == Region::I) {
    const TestChannelVars tc = solve_test_channel(P);
    const ChannelRates rates = channel_rates(P, tc);
    rep.resid_r1 = std::abs(rates.r1 - wz1);
    rep.resid_sum = std::abs(rates.sum - hb);
    rep.generalized = rep.resid_r1 <= tol && rep.resid_sum <= tol;
  } else {
    // A single-stage Wyner-Ziv code (or no code at all) meets the remaining
    // active constraint, so progressive encoding loses nothing.
    rep.generalized = true;
  }
  rep.strict = rep.generalized && rep.necessary;
  rep.verdict = rep.strict ? SrKind::strict
                           : (rep.generalized ? SrKind::generalized_only : SrKind::neither);
  return rep;
}

}  // namespace srwz::gauss
