#include "srwz/dsbs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "srwz/binary.hpp"
#include "srwz/errors.hpp"

namespace srwz::dsbs {

using prob::binary_convolve;
using prob::binary_entropy;
using prob::critical_distortion;
using prob::g_func;

namespace {

constexpr double kDomainTol = 1e-12;

void validate(const DsbsParams& P) {
  if (!(P.p > 0.0 && P.p < 0.5))
    throw std::domain_error("DsbsParams: p must lie in (0, 0.5)");
  if (!(P.d1 >= 0.0 && P.d1 <= 1.0) || !(P.d2 >= 0.0 && P.d2 <= 1.0))
    throw std::domain_error("DsbsParams: distortions must lie in [0, 1]");
}

}  // namespace

std::string_view region_name(Region r) {
  switch (r) {
    case Region::I: return "I";
    case Region::IB: return "I-B";
    case Region::II: return "II";
    case Region::III: return "III";
    case Region::IV: return "IV";
  }
  return "?";
}

Region classify_region(const DsbsParams& P) {
  validate(P);
  if (P.d1 >= 0.5) return P.d2 >= P.p ? Region::IV : Region::II;
  if (P.d2 >= std::min(P.d1, P.p)) return Region::III;
  return P.d2 <= critical_distortion(P.p) ? Region::IB : Region::I;
}

double wz_rate_binary(double p, double d) {
  if (!(p > 0.0 && p < 0.5)) throw std::domain_error("wz_rate_binary: p must lie in (0, 0.5)");
  if (!(d >= 0.0)) throw std::domain_error("wz_rate_binary: negative distortion");
  if (d >= p) return 0.0;
  const double dc = critical_distortion(p);
  if (d <= dc) return g_func(p, d);
  return g_func(p, dc) * (p - d) / (p - dc);
}

namespace {

// gamma of the S function, or NaN when it falls outside [p, 1-p].
double gamma_of(double p, double d1, double alpha, double beta, double theta, double theta1) {
  if (theta == 1.0) return 0.5;
  const double g = (d1 - (theta - theta1) * (1.0 - alpha) - theta1 * beta) / (1.0 - theta);
  if (g < p - kDomainTol || g > 1.0 - p + kDomainTol)
    return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(g, p, 1.0 - p);
}

}  // namespace

SParams make_sparams(double p, double d1, double alpha, double beta, double theta, double theta1) {
  if (!(p > 0.0 && p < 0.5)) throw std::domain_error("make_sparams: p must lie in (0, 0.5)");
  if (alpha < -kDomainTol || alpha > p + kDomainTol || beta < -kDomainTol || beta > p + kDomainTol)
    throw std::domain_error("make_sparams: alpha, beta must lie in [0, p]");
  if (theta1 < -kDomainTol || theta1 > theta + kDomainTol || theta > 1.0 + kDomainTol)
    throw std::domain_error("make_sparams: need 0 <= theta1 <= theta <= 1");
  alpha = std::clamp(alpha, 0.0, p);
  beta = std::clamp(beta, 0.0, p);
  theta = std::clamp(theta, 0.0, 1.0);
  theta1 = std::clamp(theta1, 0.0, theta);
  const double g = gamma_of(p, d1, alpha, beta, theta, theta1);
  if (std::isnan(g)) {
    const double raw = theta == 1.0 ? 0.5
                                    : (d1 - (theta - theta1) * (1.0 - alpha) - theta1 * beta) /
                                          (1.0 - theta);
    throw FeasibilityError("make_sparams: implied gamma outside [p, 1-p]", raw);
  }
  return SParams{alpha, beta, theta, theta1, g};
}

double s_func(double p, double d1, const SParams& sp) {
  const SParams v = make_sparams(p, d1, sp.alpha, sp.beta, sp.theta, sp.theta1);
  return 1.0 - binary_entropy(binary_convolve(d1, p)) + (v.theta - v.theta1) * g_func(p, v.alpha) +
         v.theta1 * g_func(p, v.beta) + (1.0 - v.theta) * g_func(p, v.gamma);
}

namespace {

// Constrained minimization of S over its domain subject to
// (theta-theta1) alpha + theta1 beta + (1-theta) p = D2. The equality
// eliminates beta when theta1 is meaningfully positive and alpha otherwise;
// the remaining free point is (alpha, theta, t) with theta1 = t * theta.
class SMinimizer {
 public:
  SMinimizer(double p, double d1, double d2)
      : p_(p), d1_(d1), d2_(d2), base_(1.0 - binary_entropy(binary_convolve(d1, p))) {}

  struct Point {
    double a = 0.0, th = 0.0, t = 0.0;
  };

  // Value of the penalized cell, or +inf when infeasible.
  double value(const Point& q, SParams* out = nullptr) const {
    const double theta = q.th;
    if (theta == 1.0) {
      // On the theta = 1 face the gamma equation degenerates into the
      // first-stage marginal identity (1-theta1)(1-alpha) + theta1 beta = D1,
      // which pins theta1 (and then beta) for a given alpha.
      const double alpha = q.a;
      const double share = (d1_ - d2_) / (1.0 - 2.0 * alpha);  // 1 - theta1
      if (share < -kDomainTol || share > 1.0 + kDomainTol)
        return std::numeric_limits<double>::infinity();
      const double theta1 = std::clamp(1.0 - share, 0.0, 1.0);
      if (theta1 <= 1e-9) return std::numeric_limits<double>::infinity();
      double beta = (d2_ - (1.0 - theta1) * alpha) / theta1;
      if (beta < -kDomainTol || beta > p_ + kDomainTol)
        return std::numeric_limits<double>::infinity();
      beta = std::clamp(beta, 0.0, p_);
      const double v = base_ + (1.0 - theta1) * g_func(p_, alpha) + theta1 * g_func(p_, beta);
      if (out != nullptr) *out = SParams{alpha, beta, 1.0, theta1, 0.5};
      return v;
    }
    const double theta1 = q.t * theta;
    double alpha = q.a, beta = 0.0;
    if (theta1 > 1e-9) {
      beta = (d2_ - (theta - theta1) * alpha - (1.0 - theta) * p_) / theta1;
      if (beta < -kDomainTol || beta > p_ + kDomainTol)
        return std::numeric_limits<double>::infinity();
      beta = std::clamp(beta, 0.0, p_);
    } else {
      if (theta <= 1e-12) {
        // theta = theta1 = 0 forces the achieved second-stage distortion to p.
        if (std::abs(p_ - d2_) > 1e-9) return std::numeric_limits<double>::infinity();
        alpha = 0.0;
      } else {
        alpha = (d2_ - (1.0 - theta) * p_) / theta;
        if (alpha < -kDomainTol || alpha > p_ + kDomainTol)
          return std::numeric_limits<double>::infinity();
        alpha = std::clamp(alpha, 0.0, p_);
      }
      beta = 0.0;
    }
    const double gamma = gamma_of(p_, d1_, alpha, beta, theta, theta1 > 1e-9 ? theta1 : 0.0);
    if (std::isnan(gamma)) return std::numeric_limits<double>::infinity();
    const double th1 = theta1 > 1e-9 ? theta1 : 0.0;
    const double v = base_ + (theta - th1) * g_func(p_, alpha) + th1 * g_func(p_, beta) +
                     (1.0 - theta) * g_func(p_, gamma);
    if (out != nullptr) *out = SParams{alpha, beta, theta, th1, gamma};
    return v;
  }

  Point refine(Point q, double& val) const {
    static constexpr int kDims = 3;
    const std::array<double, kDims> lo{0.0, 0.0, 0.0};
    const std::array<double, kDims> hi{p_, 1.0, 1.0};
    std::array<double, kDims> step{0.02 * p_, 0.02, 0.02};
    const std::array<double, kDims> target{1e-7 * p_, 1e-7, 1e-7};
    auto coord = [](Point& pt, int d) -> double& {
      return d == 0 ? pt.a : (d == 1 ? pt.th : pt.t);
    };
    bool any_active = true;
    while (any_active) {
      any_active = false;
      for (int d = 0; d < kDims; ++d)
        if (step[d] >= target[d]) any_active = true;
      if (!any_active) break;
      bool improved = true;
      while (improved) {
        improved = false;
        for (int d = 0; d < kDims; ++d) {
          for (double sgn : {+1.0, -1.0}) {
            Point cand = q;
            coord(cand, d) = std::clamp(coord(cand, d) + sgn * step[d], lo[d], hi[d]);
            const double v = value(cand);
            if (v < val) {
              val = v;
              q = cand;
              improved = true;
            }
          }
        }
      }
      for (int d = 0; d < kDims; ++d) step[d] *= 0.5;
    }
    return q;
  }

  // Coarse grid scan (step 0.02 per normalized coordinate), compass-search
  // refinement of the most promising cells plus structural seed points.
  std::pair<double, SParams> solve() const {
    static constexpr int kSteps = 50;
    std::vector<std::pair<double, Point>> cells;
    for (int ia = 0; ia <= kSteps; ++ia)
      for (int ith = 0; ith <= kSteps; ++ith)
        for (int it = 0; it <= kSteps; ++it) {
          const Point q{p_ * ia / kSteps, static_cast<double>(ith) / kSteps,
                        static_cast<double>(it) / kSteps};
          const double v = value(q);
          if (std::isfinite(v)) cells.emplace_back(v, q);
        }

    std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return std::array{a.second.a, a.second.th, a.second.t} <
             std::array{b.second.a, b.second.th, b.second.t};
    });

    std::vector<Point> starts;
    const double sep_a = 2.0 * 0.02 * p_, sep = 2.0 * 0.02;
    for (const auto& [v, q] : cells) {
      bool close = false;
      for (const Point& s : starts)
        if (std::abs(s.a - q.a) < sep_a && std::abs(s.th - q.th) < sep &&
            std::abs(s.t - q.t) < sep) {
          close = true;
          break;
        }
      if (!close) starts.push_back(q);
      if (starts.size() >= 16) break;
    }
    // Structural candidates: the cascade line (theta = 1, alpha = D2) and the
    // tangent construction at the critical distortion.
    starts.push_back(Point{std::min(d2_, p_), 1.0, 0.5});
    const double dc = critical_distortion(p_);
    if (d2_ > dc && d2_ < p_) {
      const double th = (p_ - d2_) / (p_ - dc);
      const double th1 = std::clamp((0.5 - d1_ + th * (0.5 - dc)) / (1.0 - 2.0 * dc), 0.0, th);
      starts.push_back(Point{dc, th, th > 0.0 ? th1 / th : 0.0});
    }

    double best_val = std::numeric_limits<double>::infinity();
    Point best_q;
    for (Point q : starts) {
      double v = value(q);
      if (!std::isfinite(v)) continue;
      q = refine(q, v);
      if (v < best_val) {
        best_val = v;
        best_q = q;
      }
    }
    if (!std::isfinite(best_val))
      throw NumericalError("hb_rate: no feasible cell found in the S domain");
    SParams sp;
    best_val = value(best_q, &sp);
    return {best_val, sp};
  }

 private:
  double p_, d1_, d2_;
  double base_;
};

}  // namespace

HbResult hb_rate(const DsbsParams& P) {
  const Region region = classify_region(P);
  HbResult res;
  res.region = region;
  res.certified = true;
  res.d1_eff = std::min(P.d1, 0.5);

  switch (region) {
    case Region::IV:
      res.rate_bits = 0.0;
      return res;
    case Region::II: {
      res.rate_bits = wz_rate_binary(P.p, P.d2);
      res.d1_eff = 0.5;
      const double dc = critical_distortion(P.p);
      if (P.d2 >= P.p) {
        res.witness = make_sparams(P.p, 0.5, 0.0, 0.0, 0.0, 0.0);
      } else if (P.d2 <= dc) {
        // Cascade point on the theta = 1 face; the marginal identity at
        // D1 = 0.5 forces theta1 = 0.5 for any D2.
        res.witness = make_sparams(P.p, 0.5, P.d2, P.d2, 1.0, 0.5);
      } else {
        const double th = (P.p - P.d2) / (P.p - dc);
        res.witness = make_sparams(P.p, 0.5, dc, dc, th, 0.5 * th);
      }
      return res;
    }
    case Region::III:
      res.rate_bits = 1.0 - binary_entropy(P.d1);
      if (P.d1 >= P.p) res.witness = make_sparams(P.p, P.d1, 0.0, 0.0, 0.0, 0.0);
      return res;
    case Region::I:
    case Region::IB: {
      SMinimizer solver(P.p, P.d1, P.d2);
      auto [val, sp] = solver.solve();
      res.rate_bits = val;
      res.witness = sp;
      return res;
    }
  }
  throw std::logic_error("hb_rate: unreachable");
}

double hb_lower_bound(const DsbsParams& P) {
  validate(P);
  const double d1 = std::min(P.d1, 0.5);
  return 1.0 - binary_entropy(binary_convolve(d1, P.p)) + wz_rate_binary(P.p, P.d2);
}

namespace {

finite::Decoder stage1_decoder() {
  return finite::Decoder{{2, 1}, {0, 1}};
}

finite::Decoder stage2_decoder(int w2_size) {
  // f2(w1, w2, y) = w2 for the coded symbols, y for the erasure symbol.
  finite::Decoder dec{{2, w2_size, 2}, {}};
  dec.map.resize(static_cast<std::size_t>(2 * w2_size * 2));
  for (int w1 = 0; w1 < 2; ++w1)
    for (int w2 = 0; w2 < w2_size; ++w2)
      for (int y = 0; y < 2; ++y)
        dec.map[(w1 * w2_size + w2) * 2 + y] = w2 <= 1 ? w2 : y;
  return dec;
}

}  // namespace

finite::TestChannel build_test_channel(double p, double d1, const SParams& sp) {
  const SParams v = make_sparams(p, d1, sp.alpha, sp.beta, sp.theta, sp.theta1);
  if (v.theta == 1.0) {
    // With no erasure cell the table can only meet the first-stage marginal
    // when (theta - theta1)(1 - alpha) + theta1 beta = D1.
    const double implied = (1.0 - v.theta1) * (1.0 - v.alpha) + v.theta1 * v.beta;
    if (std::abs(implied - d1) > 1e-9)
      throw FeasibilityError("build_test_channel: theta = 1 parameters miss the D1 marginal",
                             implied);
  }
  const double th = v.theta, th1 = v.theta1, a = v.alpha, b = v.beta, g = v.gamma;
  // joint[x][w1][w2] from the explicit construction; conditioning on the
  // uniform X doubles every cell.
  double joint[2][2][3];
  joint[0][0][0] = 0.5 * th1 * (1.0 - b);
  joint[1][0][0] = 0.5 * th1 * b;
  joint[0][1][0] = 0.5 * (th - th1) * (1.0 - a);
  joint[1][1][0] = 0.5 * (th - th1) * a;
  joint[0][0][1] = 0.5 * (th - th1) * a;
  joint[1][0][1] = 0.5 * (th - th1) * (1.0 - a);
  joint[0][1][1] = 0.5 * th1 * b;
  joint[1][1][1] = 0.5 * th1 * (1.0 - b);
  joint[0][0][2] = 0.5 * (1.0 - th) * (1.0 - g);
  joint[1][0][2] = 0.5 * (1.0 - th) * g;
  joint[0][1][2] = 0.5 * (1.0 - th) * g;
  joint[1][1][2] = 0.5 * (1.0 - th) * (1.0 - g);

  std::vector<double> cond(12);
  for (int x = 0; x < 2; ++x)
    for (int w1 = 0; w1 < 2; ++w1)
      for (int w2 = 0; w2 < 3; ++w2) cond[(x * 2 + w1) * 3 + w2] = 2.0 * joint[x][w1][w2];
  return finite::TestChannel::create(2, {2, 3}, std::move(cond),
                                     {stage1_decoder(), stage2_decoder(3)});
}

finite::TestChannel cascade_test_channel(double p, double d1, double d2) {
  if (!(p > 0.0 && p < 0.5)) throw std::domain_error("cascade_test_channel: p outside (0, 0.5)");
  if (!(d2 >= 0.0 && d2 <= d1 && d1 <= 0.5))
    throw std::domain_error("cascade_test_channel: need 0 <= D2 <= D1 <= 0.5");
  const double eta = d2 >= 0.5 ? 0.0 : (d1 - d2) / (1.0 - 2.0 * d2);
  std::vector<double> cond(8);
  for (int x = 0; x < 2; ++x)
    for (int w2 = 0; w2 < 2; ++w2) {
      const double p_w2 = w2 == x ? 1.0 - d2 : d2;
      for (int w1 = 0; w1 < 2; ++w1) {
        const double p_w1 = w1 == w2 ? 1.0 - eta : eta;
        cond[(x * 2 + w1) * 2 + w2] = p_w2 * p_w1;
      }
    }
  finite::Decoder f2{{2, 2, 2}, {}};
  f2.map.resize(8);
  for (int w1 = 0; w1 < 2; ++w1)
    for (int w2 = 0; w2 < 2; ++w2)
      for (int y = 0; y < 2; ++y) f2.map[(w1 * 2 + w2) * 2 + y] = w2;
  return finite::TestChannel::create(2, {2, 2}, std::move(cond), {stage1_decoder(), f2});
}

finite::DegradedSource make_source(double p) {
  if (!(p > 0.0 && p < 0.5)) throw std::domain_error("make_source: p outside (0, 0.5)");
  std::vector<prob::Axis> axes{{"X", 2}, {"Y1", 1}, {"Y2", 2}};
  std::vector<double> table(4);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) table[x * 2 + y] = 0.5 * (y == x ? 1.0 - p : p);
  return finite::DegradedSource::create(prob::JointPmf(std::move(axes), std::move(table)));
}

GenSrReport check_generalized_sr(const DsbsParams& P, double tol) {
  const HbResult hb = hb_rate(P);
  const double hb1 = std::max(0.0, 1.0 - binary_entropy(std::min(P.d1, 0.5)));

  // Regions without an S witness (III with D1 < p, IV) are covered by the
  // identity cascade at D1: the second stage rides on the first description.
  const double d1c = std::min(P.d1, 0.5);
  finite::TestChannel channel = hb.witness.has_value()
                                    ? build_test_channel(P.p, hb.d1_eff, *hb.witness)
                                    : cascade_test_channel(P.p, d1c, d1c);
  const finite::DegradedSource src = make_source(P.p);
  const auto cum = finite::rate_vector(src, channel);

  GenSrReport rep;
  rep.residual_stage1 = std::abs(cum[0] - hb1);
  rep.residual_stage2 = std::abs(cum[1] - hb.rate_bits);
  const prob::JointPmf joint = finite::joint_with_source(src, channel);
  rep.markov_violation =
      prob::markov_check(joint, {{"W1", "W2"}, {"X"}, {"Y2"}, {"Y1"}}, tol).max_violation_bits;
  rep.pass = rep.residual_stage1 <= tol && rep.residual_stage2 <= tol &&
             rep.markov_violation <= tol;
  return rep;
}

}  // namespace srwz::dsbs
