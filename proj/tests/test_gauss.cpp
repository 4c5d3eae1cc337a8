#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "srwz/gauss.hpp"

using namespace srwz::gauss;

namespace {

const GaussParams kSym{1.0, 1.0, 1.0, 0.5, 0.25};

double curve_d1(const GaussParams& P, double d2) {
  const Derived dv = derived({P.var_x, P.var_n1, P.var_n2, 1.0, 1.0});
  const double denom = dv.gamma * P.var_n1 - (1.0 - dv.gamma) * (1.0 - dv.gamma) * d2;
  return dv.gamma * P.var_n1 * d2 / denom;
}

}  // namespace

TEST_CASE("derived quantities for the symmetric instance") {
  const Derived dv = derived(kSym);
  CHECK(dv.d1_star == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(dv.d2_star == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(dv.gamma == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(derived({1.0, 0.0, 1.0, 0.1, 0.1}), std::domain_error);
}

TEST_CASE("region classification") {
  CHECK(classify_region({1, 1, 1, 0.5, 0.25}) == Region::I);
  CHECK(classify_region({1, 1, 1, 0.7, 0.6}) == Region::IV);
  CHECK(classify_region({1, 1, 1, 0.7, 0.3}) == Region::II);
  CHECK(classify_region({1, 1, 1, 0.3, 0.45}) == Region::III);  // below the curve
  CHECK(classify_region({1, 1, 1, 0.2, 0.55}) == Region::III);  // D2 above its floor
}

TEST_CASE("Wyner-Ziv stage rates") {
  const Derived dv = derived(kSym);
  CHECK(wz_rate_stage1({1, 1, 1, dv.d1_star, 0.2}) == 0.0);
  CHECK(wz_rate_stage1({1, 1, 1, dv.d1_star / 2, 0.2}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(wz_rate_stage1({1, 1, 1, 1.0 / 3.0, 0.2}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(wz_rate_stage2({1, 1, 1, 0.5, dv.d2_star}) == 0.0);
  CHECK(wz_rate_stage2({1, 1, 1, 0.5, dv.d2_star / 4}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hb rate: formula, reduction at D1*, and bound-chain oracle") {
  const Derived dv = derived(kSym);
  // At D1 = D1* the sum rate collapses to the stage-2 Wyner-Ziv rate.
  for (int i = 1; i <= 20; ++i) {
    const double d2 = dv.d2_star * i / 20.0;
    const GaussParams P{1, 1, 1, dv.d1_star, d2};
    CHECK(hb_rate(P) == doctest::Approx(wz_rate_stage2(P)).epsilon(1e-12));
  }
  // Interior point strictly above the stage-2 rate.
  CHECK(hb_rate(kSym) > wz_rate_stage2(kSym) + 1e-6);

  // Term-by-term evaluation of the bound chain
  // H(X|Y1) - H(X|W1,W2,Y2) - H(Y2|W1,Y1) + H(Y2|X,Y1)
  // with the tight conditional variances; the 2*pi*e factors cancel.
  const GaussParams& P = kSym;
  const double v_y2_x_y1 = P.var_n2 * P.var_n1 / (P.var_n1 + P.var_n2);
  const double v_y2_w1_y1 =
      (1.0 - dv.gamma) * (1.0 - dv.gamma) * P.d1 + dv.gamma * P.var_n1;
  const double chain = 0.5 * std::log2(dv.d1_star) - 0.5 * std::log2(P.d2) -
                       0.5 * std::log2(v_y2_w1_y1) + 0.5 * std::log2(v_y2_x_y1);
  CHECK(hb_rate(P) == doctest::Approx(chain).epsilon(1e-12));
}

TEST_CASE("test channel solves both MMSE identities") {
  const GaussParams P{1.3, 0.7, 0.9, 0.35, 0.22};
  REQUIRE(classify_region(P) == Region::I);
  const TestChannelVars tc = solve_test_channel(P);
  CHECK(tc.var_z1 > 0.0);
  CHECK(tc.var_z2 > 0.0);
  CHECK(1.0 / P.d1 == doctest::Approx(1.0 / P.var_x + 1.0 / (P.var_n1 + P.var_n2) +
                                      1.0 / (tc.var_z1 + tc.var_z2))
                          .epsilon(1e-12));
  CHECK(1.0 / P.d2 ==
        doctest::Approx(1.0 / P.var_x + 1.0 / P.var_n2 + 1.0 / tc.var_z2).epsilon(1e-12));

  const auto ad = achieved_distortions(P, tc);
  CHECK(ad.d1 == doctest::Approx(P.d1).epsilon(1e-12));
  CHECK(ad.d2 == doctest::Approx(P.d2).epsilon(1e-12));

  // W1 becomes uninformative as D1 approaches its floor.
  const Derived dv = derived(P);
  const auto edge = solve_test_channel({P.var_x, P.var_n1, P.var_n2, dv.d1_star * (1 - 1e-10), P.d2});
  CHECK(edge.var_z1 + edge.var_z2 > 1e8);

  CHECK_THROWS_AS(solve_test_channel({1, 1, 1, 0.7, 0.3}), std::domain_error);
}

TEST_CASE("Monte Carlo linear estimation confirms the MMSE identities") {
  const GaussParams P{1.0, 1.0, 1.0, 0.5, 0.25};
  const TestChannelVars tc = solve_test_channel(P);
  std::mt19937_64 g(321);
  std::normal_distribution<double> N(0.0, 1.0);
  const int n = 1000000;
  // Empirical second moments of (X, W1, Y1) and (X, W2, Y2).
  double sxx = 0, sw1w1 = 0, sy1y1 = 0, sxw1 = 0, sxy1 = 0, sw1y1 = 0;
  double sw2w2 = 0, sy2y2 = 0, sxw2 = 0, sxy2 = 0, sw2y2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::sqrt(P.var_x) * N(g);
    const double n1 = std::sqrt(P.var_n1) * N(g), n2 = std::sqrt(P.var_n2) * N(g);
    const double z1 = std::sqrt(tc.var_z1) * N(g), z2 = std::sqrt(tc.var_z2) * N(g);
    const double y1 = x + n1 + n2, y2 = x + n2, w1 = x + z1 + z2, w2 = x + z2;
    sxx += x * x;
    sw1w1 += w1 * w1; sy1y1 += y1 * y1; sxw1 += x * w1; sxy1 += x * y1; sw1y1 += w1 * y1;
    sw2w2 += w2 * w2; sy2y2 += y2 * y2; sxw2 += x * w2; sxy2 += x * y2; sw2y2 += w2 * y2;
  }
  const auto residual = [&](double saa, double sbb, double sab, double sxa, double sxb) {
    // Solve the 2x2 normal equations for the linear MMSE of X from (A, B).
    const double det = saa * sbb - sab * sab;
    const double ca = (sxa * sbb - sxb * sab) / det;
    const double cb = (sxb * saa - sxa * sab) / det;
    return (sxx - ca * sxa - cb * sxb) / n;
  };
  const double mc_d1 = residual(sw1w1, sy1y1, sw1y1, sxw1, sxy1);
  const double mc_d2 = residual(sw2w2, sy2y2, sw2y2, sxw2, sxy2);
  CHECK(std::abs(mc_d1 - P.d1) / P.d1 <= 5e-3);
  CHECK(std::abs(mc_d2 - P.d2) / P.d2 <= 5e-3);
}

TEST_CASE("channel rates hit both lower bounds simultaneously") {
  for (const GaussParams& P : {GaussParams{1, 1, 1, 0.5, 0.25},
                               GaussParams{1.3, 0.7, 0.9, 0.35, 0.22},
                               GaussParams{2.0, 0.4, 1.1, 0.6, 0.45}}) {
    if (classify_region(P) != Region::I) continue;
    const auto tc = solve_test_channel(P);
    const auto rates = channel_rates(P, tc);
    CHECK(std::abs(rates.r1 - wz_rate_stage1(P)) <= 1e-9);
    CHECK(std::abs(rates.sum - hb_rate(P)) <= 1e-9);
  }
}

TEST_CASE("scale invariance of every rate") {
  const GaussParams P{1.3, 0.7, 0.9, 0.35, 0.22};
  for (double c : {0.5, 2.0, 10.0}) {
    const GaussParams Q{c * P.var_x, c * P.var_n1, c * P.var_n2, c * P.d1, c * P.d2};
    CHECK(std::abs(hb_rate(Q) - hb_rate(P)) <= 1e-12);
    CHECK(std::abs(wz_rate_stage1(Q) - wz_rate_stage1(P)) <= 1e-12);
    CHECK(std::abs(wz_rate_stage2(Q) - wz_rate_stage2(P)) <= 1e-12);
    CHECK(classify_region(Q) == classify_region(P));
  }
}

TEST_CASE("monotone in both distortions and above both stage rates") {
  std::vector<double> d1s, d2s;
  for (int i = 0; i < 10; ++i) {
    d1s.push_back(0.30 + 0.035 * i);
    d2s.push_back(0.16 + 0.03 * i);
  }
  std::vector<std::vector<double>> r(10, std::vector<double>(10));
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const GaussParams P{1, 1, 1, d1s[i], d2s[j]};
      r[i][j] = hb_rate(P);
      CHECK(r[i][j] >= std::max(wz_rate_stage1(P), wz_rate_stage2(P)) - 1e-12);
    }
  for (int i = 0; i + 1 < 10; ++i)
    for (int j = 0; j + 1 < 10; ++j) {
      CHECK(r[i + 1][j] <= r[i][j] + 1e-12);
      CHECK(r[i][j + 1] <= r[i][j] + 1e-12);
    }
}

TEST_CASE("rate agrees across the region boundaries") {
  const GaussParams base{1.4, 0.8, 1.1, 1.0, 1.0};
  const Derived dv = derived(base);
  for (int i = 1; i <= 50; ++i) {
    // I/II boundary: D1 = D1*.
    const double d2 = dv.d2_star * i / 51.0;
    const GaussParams on_12{base.var_x, base.var_n1, base.var_n2, dv.d1_star, d2};
    CHECK(std::abs(hb_rate(on_12) - wz_rate_stage2(on_12)) <= 1e-9);
    // I/III boundary: D1 on the curve; the Region-I formula equals the
    // stage-1 Wyner-Ziv rate there.
    const GaussParams on_13{base.var_x, base.var_n1, base.var_n2, curve_d1(base, d2), d2};
    if (on_13.d1 <= dv.d1_star) {
      CHECK(classify_region(on_13) == Region::I);
      CHECK(std::abs(hb_rate(on_13) - wz_rate_stage1(on_13)) <= 1e-9);
    }
  }
}

TEST_CASE("successive refinability verdicts") {
  const Derived dv = derived(kSym);
  CHECK(check_sr(kSym, 1e-9).verdict == SrKind::generalized_only);
  CHECK(check_sr({1, 1, 1, dv.d1_star, 0.25}, 1e-6).verdict == SrKind::strict);
  CHECK(check_sr({1, 1, 1, 0.8, 0.6}, 1e-9).verdict == SrKind::strict);  // Region IV
  CHECK(check_sr({1, 1, 1, 0.8, 0.3}, 1e-9).verdict == SrKind::strict);  // Region II
  CHECK(check_sr({1, 1, 1, 0.3, 0.45}, 1e-9).verdict == SrKind::generalized_only);  // III
  const auto rep = check_sr(kSym, 1e-9);
  CHECK(rep.generalized);
  CHECK_FALSE(rep.necessary);
  CHECK(rep.strict == (rep.generalized && rep.necessary));
}
