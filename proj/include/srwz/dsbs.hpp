#pragma once

#include <optional>
#include <string_view>

#include "srwz/region.hpp"

namespace srwz::dsbs {

// Doubly symmetric binary source: uniform X, side information Y2 = BSC(p)
// output of X, Y1 constant, Hamming distortion.
struct DsbsParams {
  double p = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

enum class Region { I, IB, II, III, IV };

std::string_view region_name(Region r);

// Parameters of the S function. gamma is derived from the other four and D1;
// it is 0.5 by convention when theta = 1.
struct SParams {
  double alpha = 0.0;
  double beta = 0.0;
  double theta = 0.0;
  double theta1 = 0.0;
  double gamma = 0.5;
};

// Computes gamma and validates the full S domain (0 <= alpha,beta <= p,
// 0 <= theta1 <= theta <= 1, p <= gamma <= 1-p). Throws FeasibilityError
// with the offending gamma when the cell is outside the domain.
SParams make_sparams(double p, double d1, double alpha, double beta, double theta, double theta1);

// Distortion-region label; boundary ties go to the lower-rate region.
// I-B is the sub-case of Region I with D2 <= d_c(p).
Region classify_region(const DsbsParams& params);

// Binary Wyner-Ziv rate-distortion function R*_{X|Y}(D) in bits:
// G(D) up to the critical distortion, then the tangent through (p, 0),
// and 0 from D = p on.
double wz_rate_binary(double p, double d);

// S_{D1}(alpha, beta, theta, theta1)
//   = 1 - h(D1*p) + (theta-theta1) G(alpha) + theta1 G(beta) + (1-theta) G(gamma).
double s_func(double p, double d1, const SParams& sp);

struct HbResult {
  double rate_bits = 0.0;
  Region region = Region::IV;
  // Arg-min of the S minimization when the region admits one; for Region II
  // the witness is built at d1_eff = 0.5.
  std::optional<SParams> witness;
  double d1_eff = 0.0;
  bool certified = false;
};

// Heegard-Berger rate R_HB(D1, D2). Region I solves the constrained
// minimization of S; the degenerate regions use their closed forms.
HbResult hb_rate(const DsbsParams& params);

// Lower bound 1 - h(D1*p) + R*_{X|Y}(D2) on the sum rate, with D1 clamped at
// 0.5 so the expression stays a valid bound outside Region I.
double hb_lower_bound(const DsbsParams& params);

// Forward test channel of the S construction: joint p(x, w1, w2) per the
// explicit table, decoders f1 = W1 and f2 = W2 unless W2 is the erasure
// symbol, in which case f2 = Y.
finite::TestChannel build_test_channel(double p, double d1, const SParams& sp);

// Cascade channel: W2 = BSC(D2) output of X, W1 = BSC(eta) output of W2 with
// D2 * eta = D1. Optimal in Region I-B. Requires D2 <= D1 <= 0.5.
finite::TestChannel cascade_test_channel(double p, double d1, double d2);

// The DSBS as a two-stage degraded source (axes X, Y1 of size 1, Y2).
finite::DegradedSource make_source(double p);

struct GenSrReport {
  bool pass = false;
  double residual_stage1 = 0.0;  // |I(X;W1|Y1) - R_HB(D1)|
  double residual_stage2 = 0.0;  // |I(X;W1|Y1)+I(X;W2|W1,Y2) - R_HB(D1,D2)|
  double markov_violation = 0.0;
};

// Generalized successive refinability of the DSBS at one distortion pair:
// verifies the optimizing (W1, W2) reproduces the per-stage Heegard-Berger
// sum-rates and satisfies the region's Markov condition.
GenSrReport check_generalized_sr(const DsbsParams& params, double tol);

}  // namespace srwz::dsbs
