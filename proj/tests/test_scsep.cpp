#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "srwz/binary.hpp"
#include "srwz/dsbs.hpp"
#include "srwz/scsep.hpp"

using namespace srwz::scsep;
using srwz::prob::binary_entropy;

namespace {

Dmc bsc(double q) { return Dmc::create(2, 2, {1 - q, q, q, 1 - q}); }

Dmc bec(double e) { return Dmc::create(2, 3, {1 - e, e, 0.0, 0.0, e, 1 - e}); }

}  // namespace

TEST_CASE("capacity of standard channels") {
  for (double q : {0.1, 0.25})
    CHECK(channel_capacity(bsc(q)) == doctest::Approx(1.0 - binary_entropy(q)).epsilon(1e-9));
  CHECK(channel_capacity(Dmc::create(2, 2, {1, 0, 0, 1})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(channel_capacity(Dmc::create(2, 2, {0.3, 0.7, 0.3, 0.7})) ==
        doctest::Approx(0.0).epsilon(1e-12));
  for (double e : {0.05, 0.2, 0.5, 0.8})
    CHECK(channel_capacity(bec(e)) == doctest::Approx(1.0 - e).epsilon(1e-6));
  CHECK_THROWS_AS(Dmc::create(2, 2, {0.9, 0.2, 0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("separation feasibility arithmetic") {
  // Zero requirements are always achievable.
  {
    const auto rep = check_sc_achievable({{0.5, 0.5}, {1.0, 1.0}, {0.0, 0.0}}, 1e-12);
    CHECK(rep.overall_ok);
  }
  // rho = 1 with a BSC(0.1) budget fails once the requirement exceeds C.
  {
    const double c = channel_capacity(bsc(0.1));
    const auto rep = check_sc_achievable({{c}, {1.0}, {c + 1e-3}}, 1e-9);
    CHECK_FALSE(rep.per_stage_ok[0]);
    CHECK_FALSE(rep.overall_ok);
  }
  // DSBS rates against an exactly matching budget: true with zero margin.
  {
    const srwz::dsbs::DsbsParams P{0.25, 0.3, 0.05};
    const double r1 = 1.0 - binary_entropy(P.d1);
    const double r2 = srwz::dsbs::hb_rate(P).rate_bits;
    const auto rep = check_sc_achievable({{r1, r2 - r1}, {1.0, 1.0}, {r1, r2}}, 1e-12);
    CHECK(rep.overall_ok);
    CHECK(rep.cum_budget[1] == doctest::Approx(r2).epsilon(1e-15));
  }
  // rho = 0: achievable iff nothing is required.
  {
    CHECK(check_sc_achievable({{1.0}, {0.0}, {0.0}}, 1e-12).overall_ok);
    CHECK_FALSE(check_sc_achievable({{1.0}, {0.0}, {0.1}}, 1e-12).overall_ok);
  }
  CHECK_THROWS_AS(check_sc_achievable({{1.0}, {1.0, 2.0}, {0.5}}, 1e-9),
                  std::invalid_argument);
}

TEST_CASE("verdicts are monotone in budget") {
  auto g = testutil::rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    ScInstance inst;
    for (int m = 0; m < 3; ++m) {
      inst.capacities.push_back(testutil::unit(g));
      inst.rhos.push_back(2.0 * testutil::unit(g));
    }
    double cum = 0.0;
    for (int m = 0; m < 3; ++m) {
      cum += 1.2 * testutil::unit(g);
      inst.sumrates.push_back(cum);
    }
    const auto base = check_sc_achievable(inst, 1e-12);
    ScInstance bigger = inst;
    const int which = static_cast<int>(3.0 * testutil::unit(g)) % 3;
    if (testutil::unit(g) < 0.5)
      bigger.rhos[which] += testutil::unit(g);
    else
      bigger.capacities[which] += testutil::unit(g);
    const auto grown = check_sc_achievable(bigger, 1e-12);
    for (int m = 0; m < 3; ++m)
      if (base.per_stage_ok[m]) CHECK(grown.per_stage_ok[m]);
  }
}
