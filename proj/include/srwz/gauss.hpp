#pragma once

#include <string_view>

namespace srwz::gauss {

// Two-stage quadratic Gaussian instance: X ~ N(0, var_x), side informations
// Y1 = X + N1 + N2 and Y2 = X + N2 with independent zero-mean noises.
struct GaussParams {
  double var_x = 1.0;
  double var_n1 = 1.0;
  double var_n2 = 1.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

// MMSE floors of the two decoders and the combining weight
// gamma = var_n2 / (var_n1 + var_n2).
struct Derived {
  double d1_star = 0.0;
  double d2_star = 0.0;
  double gamma = 0.0;
};

enum class Region { I, II, III, IV };

std::string_view region_name(Region r);

Derived derived(const GaussParams& params);

// Region I: both constraints active (D1 <= D1*, D2 <= D2*, D1 on or above the
// boundary curve). II: only the second stage encodes. III: only the first.
// IV: zero rate.
Region classify_region(const GaussParams& params);

// Wyner-Ziv rates (bits): 0.5 log2(D*/D), clamped to 0 above the floor.
double wz_rate_stage1(const GaussParams& params);
double wz_rate_stage2(const GaussParams& params);

// Heegard-Berger sum rate (bits) with the degenerate regions dispatched to
// their single-stage forms.
double hb_rate(const GaussParams& params);

struct TestChannelVars {
  double var_z1 = 0.0;
  double var_z2 = 0.0;
};

// Variances of the independent Gaussian perturbations in W1 = X + Z1 + Z2,
// W2 = X + Z2 meeting both distortions with equality. Requires a Region I
// point away from the D1*, D2* edges.
TestChannelVars solve_test_channel(const GaussParams& params);

struct ChannelRates {
  double r1 = 0.0;   // I(X; W1 | Y1)
  double sum = 0.0;  // I(X; W1 | Y1) + I(X; W2 | W1, Y2)
};

// Rates achieved by the jointly Gaussian test channel, via log-variance
// ratios.
ChannelRates channel_rates(const GaussParams& params, const TestChannelVars& tc);

// MMSE distortions realized by the test channel (round-trip check).
struct AchievedDistortions {
  double d1 = 0.0;
  double d2 = 0.0;
};
AchievedDistortions achieved_distortions(const GaussParams& params, const TestChannelVars& tc);

enum class SrKind { strict, generalized_only, neither };

std::string_view sr_kind_name(SrKind k);

struct SrReport {
  SrKind verdict = SrKind::neither;
  bool generalized = false;
  bool strict = false;
  bool necessary = false;
  double resid_r1 = 0.0;     // |channel r1 - wz1|
  double resid_sum = 0.0;    // |channel sum - hb|
  double gap_wz2 = 0.0;      // hb - wz2
};

// Successive-refinability verdict: generalized whenever the optimal test
// channel reproduces both rate bounds within tol; strict additionally needs
// R_HB = R*_{X|Y2}(D2).
SrReport check_sr(const GaussParams& params, double tol);

}  // namespace srwz::gauss
