#include "srwz/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "srwz/errors.hpp"

namespace srwz::finite {

namespace {

constexpr double kRowTol = 1e-12;

double nlog2n(double q) { return q > 0.0 ? q * std::log2(q) : 0.0; }

std::vector<std::string> y_names(int n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (int m = 1; m <= n; ++m) out.push_back("Y" + std::to_string(m));
  return out;
}

}  // namespace

DistortionMatrix hamming_distortion(int n) {
  DistortionMatrix dm{n, n, std::vector<double>(static_cast<std::size_t>(n) * n, 1.0)};
  for (int i = 0; i < n; ++i) dm.d[static_cast<std::size_t>(i) * n + i] = 0.0;
  return dm;
}

DegradedSource DegradedSource::create(prob::JointPmf pmf, double degradedness_tol) {
  const int n = static_cast<int>(pmf.axes().size()) - 1;
  if (n < 1) throw std::invalid_argument("DegradedSource: need axes X and Y1..YN");
  pmf.axis_index("X");
  const auto names = y_names(n);
  for (const auto& nm : names) pmf.axis_index(nm);

  std::vector<std::vector<std::string>> chain;
  chain.push_back({"X"});
  for (int m = n; m >= 1; --m) chain.push_back({"Y" + std::to_string(m)});
  const auto rep = prob::markov_check(pmf, chain, degradedness_tol);
  if (!rep.ok)
    throw std::invalid_argument(
        "DegradedSource: side informations are not degraded; worst violation " +
        std::to_string(rep.max_violation_bits) + " bits");
  return DegradedSource{std::move(pmf), n, degradedness_tol};
}

int DegradedSource::x_size() const { return pmf.axes()[pmf.axis_index("X")].size; }

int DegradedSource::y_size(int stage) const {
  return pmf.axes()[pmf.axis_index("Y" + std::to_string(stage + 1))].size;
}

int Decoder::apply(std::span<const int> ctx) const {
  if (ctx.size() != ctx_sizes.size()) throw std::invalid_argument("Decoder: context arity mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (ctx[i] < 0 || ctx[i] >= ctx_sizes[i])
      throw std::out_of_range("Decoder: context symbol outside the declared alphabet");
    flat = flat * ctx_sizes[i] + ctx[i];
  }
  return map[flat];
}

TestChannel TestChannel::create(int x_size, std::vector<int> w_sizes, std::vector<double> cond,
                                std::vector<Decoder> decoders) {
  TestChannel ch{x_size, std::move(w_sizes), std::move(cond), std::move(decoders)};
  const std::size_t k = ch.w_cell_count();
  if (ch.cond.size() != k * static_cast<std::size_t>(x_size))
    throw std::invalid_argument("TestChannel: conditional table size mismatch");
  for (int x = 0; x < x_size; ++x) {
    double row = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double v = ch.cond[x * k + j];
      if (!(v >= 0.0)) throw std::invalid_argument("TestChannel: negative conditional entry");
      row += v;
    }
    if (std::abs(row - 1.0) > kRowTol)
      throw std::invalid_argument("TestChannel: conditional slice does not sum to 1");
  }
  return ch;
}

std::size_t TestChannel::w_cell_count() const {
  std::size_t k = 1;
  for (int s : w_sizes) k *= static_cast<std::size_t>(s);
  return k;
}

bool TestChannel::decoder_is_simple(int stage) const {
  const Decoder& dec = decoders.at(stage);
  // Context is (w1..w_{stage+1}, y); the decoder is simple if the map is
  // constant in the leading `stage` coordinates.
  std::size_t tail = dec.ctx_sizes.back();          // y
  tail *= static_cast<std::size_t>(dec.ctx_sizes[stage]);  // own w
  std::size_t lead = 1;
  for (int i = 0; i < stage; ++i) lead *= static_cast<std::size_t>(dec.ctx_sizes[i]);
  for (std::size_t t = 0; t < tail; ++t)
    for (std::size_t l = 1; l < lead; ++l)
      if (dec.map[l * tail + t] != dec.map[t]) return false;
  return true;
}

bool within_cardinality_bounds(int x_size, std::span<const int> w_sizes) {
  const int n = static_cast<int>(w_sizes.size());
  long long prod = 1;
  for (int m = 0; m < n; ++m) {
    const long long bound = (m == 0) ? x_size + 2LL * n - 1
                                     : x_size * prod + 2LL * n - 2LL * (m + 1) - 1;
    if (w_sizes[m] > bound) return false;
    prod *= w_sizes[m];
  }
  return true;
}

prob::JointPmf joint_with_source(const DegradedSource& src, const TestChannel& ch) {
  const int n = src.n_stages;
  std::vector<prob::Axis> axes;
  axes.push_back({"X", src.x_size()});
  for (int m = 0; m < n; ++m) axes.push_back({"Y" + std::to_string(m + 1), src.y_size(m)});
  for (int m = 0; m < n; ++m)
    axes.push_back({"W" + std::to_string(m + 1), ch.w_sizes[m]});

  // Reorder the source pmf into canonical (X, Y1..YN) layout first.
  std::vector<std::string> order{"X"};
  for (const auto& nm : y_names(n)) order.push_back(nm);
  const prob::JointPmf canon = src.pmf.marginal(order);

  const std::size_t k = ch.w_cell_count();
  const std::size_t xy = canon.cell_count();
  const std::size_t y_cells = xy / static_cast<std::size_t>(src.x_size());
  std::vector<double> table(xy * k);
  for (std::size_t xyi = 0; xyi < xy; ++xyi) {
    const std::size_t x = xyi / y_cells;
    for (std::size_t j = 0; j < k; ++j)
      table[xyi * k + j] = canon.table()[xyi] * ch.cond[x * k + j];
  }
  return prob::JointPmf(std::move(axes), std::move(table));
}

namespace {

// Evaluates per-stage rates and optimal-decoder distortions for a conditional
// table without going through JointPmf, so the region optimizer can afford
// many evaluations.
class ChannelEvaluator {
 public:
  ChannelEvaluator(const DegradedSource& src, std::vector<int> w_sizes,
                   const DistortionMatrix* dist)
      : n_(src.n_stages), x_size_(src.x_size()), w_sizes_(std::move(w_sizes)), dist_(dist) {
    k_ = 1;
    for (int s : w_sizes_) k_ *= static_cast<std::size_t>(s);
    prefix_.resize(n_);
    std::size_t p = 1;
    for (int m = 0; m < n_; ++m) {
      p *= static_cast<std::size_t>(w_sizes_[m]);
      prefix_[m] = p;
    }
    for (int m = 0; m < n_; ++m) {
      y_sizes_.push_back(src.y_size(m));
      std::vector<std::string> keep{"X", "Y" + std::to_string(m + 1)};
      p_xy_.push_back(src.pmf.marginal(keep).table());  // row-major (x, y)
    }
    for (int m = 0; m < n_; ++m)
      qpref_.emplace_back(static_cast<std::size_t>(x_size_) * prefix_[m]);
    const std::size_t max_cells = static_cast<std::size_t>(x_size_) * prefix_[n_ - 1] *
                                  *std::max_element(y_sizes_.begin(), y_sizes_.end());
    joint_.resize(max_cells);
    scratch_a_.resize(max_cells);
    scratch_b_.resize(max_cells);
  }

  int stages() const { return n_; }

  // cond is [x][w1..wN] row-major.
  void eval(std::span<const double> cond, std::vector<double>& cmi,
            std::vector<double>& distortion) {
    fill_prefixes(cond);
    cmi.assign(n_, 0.0);
    distortion.assign(n_, 0.0);
    for (int m = 0; m < n_; ++m) stage_eval(m, cmi[m], distortion[m], nullptr);
  }

  std::vector<Decoder> extract_decoders(std::span<const double> cond) {
    fill_prefixes(cond);
    std::vector<Decoder> out;
    for (int m = 0; m < n_; ++m) {
      double unused_cmi = 0.0, unused_d = 0.0;
      Decoder dec;
      dec.ctx_sizes.assign(w_sizes_.begin(), w_sizes_.begin() + m + 1);
      dec.ctx_sizes.push_back(y_sizes_[m]);
      dec.map.assign(prefix_[m] * static_cast<std::size_t>(y_sizes_[m]), 0);
      stage_eval(m, unused_cmi, unused_d, &dec);
      out.push_back(std::move(dec));
    }
    return out;
  }

  double stage_distortion(int m, std::span<const double> cond) {
    fill_prefixes(cond);
    double cmi = 0.0, d = 0.0;
    stage_eval(m, cmi, d, nullptr);
    return d;
  }

 private:
  void fill_prefixes(std::span<const double> cond) {
    std::copy(cond.begin(), cond.end(), qpref_[n_ - 1].begin());
    for (int m = n_ - 2; m >= 0; --m) {
      const int tail = w_sizes_[m + 1];
      for (std::size_t xp = 0; xp < static_cast<std::size_t>(x_size_) * prefix_[m]; ++xp) {
        double s = 0.0;
        for (int t = 0; t < tail; ++t) s += qpref_[m + 1][xp * tail + t];
        qpref_[m][xp] = s;
      }
    }
  }

  // Computes I(X; Wm | W1..W_{m-1}, Ym) and the optimal-decoder distortion of
  // stage m; optionally records the argmin decoder.
  void stage_eval(int m, double& cmi, double& distortion, Decoder* dec) {
    const std::size_t pre = prefix_[m];
    const std::size_t pre2 = pre / static_cast<std::size_t>(w_sizes_[m]);
    const std::size_t ys = static_cast<std::size_t>(y_sizes_[m]);
    const std::size_t cells = static_cast<std::size_t>(x_size_) * pre * ys;

    // joint_[((x*pre)+w)*ys + y] = p(x, y_m) q(w_1..w_m | x)
    for (int x = 0; x < x_size_; ++x)
      for (std::size_t w = 0; w < pre; ++w) {
        const double q = qpref_[m][x * pre + w];
        for (std::size_t y = 0; y < ys; ++y)
          joint_[(x * pre + w) * ys + y] = p_xy_[m][x * ys + y] * q;
      }

    double h_all = 0.0;
    for (std::size_t i = 0; i < cells; ++i) h_all -= nlog2n(joint_[i]);

    // H(W_{<=m}, Ym) over scratch_a_[w*ys + y]
    std::fill(scratch_a_.begin(), scratch_a_.begin() + pre * ys, 0.0);
    for (int x = 0; x < x_size_; ++x)
      for (std::size_t i = 0; i < pre * ys; ++i)
        scratch_a_[i] += joint_[x * pre * ys + i];
    double h_wy = 0.0;
    for (std::size_t i = 0; i < pre * ys; ++i) h_wy -= nlog2n(scratch_a_[i]);

    // H(X, W_{<m}, Ym) over scratch_b_[(x*pre2 + v)*ys + y]
    const int own = w_sizes_[m];
    std::fill(scratch_b_.begin(), scratch_b_.begin() + static_cast<std::size_t>(x_size_) * pre2 * ys, 0.0);
    for (int x = 0; x < x_size_; ++x)
      for (std::size_t v = 0; v < pre2; ++v)
        for (int w = 0; w < own; ++w)
          for (std::size_t y = 0; y < ys; ++y)
            scratch_b_[(x * pre2 + v) * ys + y] += joint_[(x * pre + v * own + w) * ys + y];
    double h_xc = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(x_size_) * pre2 * ys; ++i)
      h_xc -= nlog2n(scratch_b_[i]);

    // H(W_{<m}, Ym): marginalize x out of scratch_b_
    double h_c = 0.0;
    for (std::size_t i = 0; i < pre2 * ys; ++i) {
      double s = 0.0;
      for (int x = 0; x < x_size_; ++x) s += scratch_b_[x * pre2 * ys + i];
      h_c -= nlog2n(s);
    }

    cmi = h_xc + h_wy - h_all - h_c;

    if (dist_ != nullptr) {
      double total = 0.0;
      for (std::size_t w = 0; w < pre; ++w)
        for (std::size_t y = 0; y < ys; ++y) {
          double best = std::numeric_limits<double>::infinity();
          int best_sym = 0;
          bool any_mass = false;
          for (int xh = 0; xh < dist_->xhat_size; ++xh) {
            double s = 0.0;
            for (int x = 0; x < x_size_; ++x) {
              const double mass = joint_[(x * pre + w) * ys + y];
              if (mass > 0.0) any_mass = true;
              s += mass * dist_->at(x, xh);
            }
            if (s < best) {
              best = s;
              best_sym = xh;
            }
          }
          if (any_mass) total += best;
          if (dec != nullptr) dec->map[w * ys + y] = any_mass ? best_sym : 0;
        }
      distortion = total;
    }
  }

  int n_;
  int x_size_;
  std::vector<int> w_sizes_;
  const DistortionMatrix* dist_;
  std::size_t k_ = 1;
  std::vector<std::size_t> prefix_;
  std::vector<int> y_sizes_;
  std::vector<std::vector<double>> p_xy_;
  std::vector<std::vector<double>> qpref_;
  std::vector<double> joint_, scratch_a_, scratch_b_;
};

}  // namespace

DecoderResult optimal_decoder(const DegradedSource& src, const TestChannel& ch, int stage,
                              const DistortionMatrix& dist) {
  if (stage < 0 || stage >= src.n_stages)
    throw std::invalid_argument("optimal_decoder: stage out of range");
  ChannelEvaluator ev(src, ch.w_sizes, &dist);
  auto decoders = ev.extract_decoders(ch.cond);
  return DecoderResult{std::move(decoders[stage]), ev.stage_distortion(stage, ch.cond)};
}

std::vector<double> rate_vector(const DegradedSource& src, const TestChannel& ch) {
  ChannelEvaluator ev(src, ch.w_sizes, nullptr);
  std::vector<double> cmi, dist;
  ev.eval(ch.cond, cmi, dist);
  for (std::size_t m = 1; m < cmi.size(); ++m) cmi[m] += cmi[m - 1];
  return cmi;
}

std::vector<double> achieved_distortions(const DegradedSource& src, const TestChannel& ch,
                                         const DistortionMatrix& dist) {
  const prob::JointPmf joint = joint_with_source(src, ch);
  const int n = src.n_stages;
  std::vector<double> out(n, 0.0);
  std::vector<int> idx(joint.axes().size());
  for (int m = 0; m < n; ++m) {
    const Decoder& dec = ch.decoders.at(m);
    const int y_axis = joint.axis_index("Y" + std::to_string(m + 1));
    std::vector<int> w_axes;
    for (int i = 0; i <= m; ++i) w_axes.push_back(joint.axis_index("W" + std::to_string(i + 1)));
    std::vector<int> ctx(dec.ctx_sizes.size());
    double total = 0.0;
    for (std::size_t flat = 0; flat < joint.cell_count(); ++flat) {
      const double mass = joint.table()[flat];
      if (mass == 0.0) continue;
      joint.unflatten(flat, idx);
      for (std::size_t i = 0; i < w_axes.size(); ++i) ctx[i] = idx[w_axes[i]];
      ctx.back() = idx[y_axis];
      const int xhat = dec.apply(ctx);
      total += mass * dist.at(idx[0], xhat);
    }
    out[m] = total;
  }
  return out;
}

nlohmann::json RegionSample::to_json() const {
  nlohmann::json cond = nlohmann::json::array();
  const std::size_t k = witness.w_cell_count();
  for (int x = 0; x < witness.x_size; ++x) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < k; ++j) row.push_back(witness.cond[x * k + j]);
    cond.push_back(std::move(row));
  }
  return {{"distortions", distortions}, {"cum_rates_bits", cum_rates},
          {"witness_cond", std::move(cond)}, {"certified", certified},
          {"restarts_used", restarts_used}, {"seed", seed}};
}

namespace {

struct Objective {
  ChannelEvaluator* ev;
  std::span<const double> targets;
  double lambda;
  double slack;
  std::vector<double> cmi, dist;
  // Best feasible point seen across every evaluation; the reported sample.
  double best_rate = std::numeric_limits<double>::infinity();
  std::vector<double> best_cond;

  double operator()(std::span<const double> cond) {
    ev->eval(cond, cmi, dist);
    double rate = 0.0;
    for (double c : cmi) rate += c;
    double pen = 0.0;
    bool feasible = true;
    for (std::size_t m = 0; m < dist.size(); ++m) {
      const double excess = std::max(0.0, dist[m] - targets[m]);
      pen += excess * excess;
      if (dist[m] > targets[m] + slack) feasible = false;
    }
    if (feasible && rate < best_rate) {
      best_rate = rate;
      best_cond.assign(cond.begin(), cond.end());
    }
    return rate + lambda * pen;
  }
};

// Sets coordinate (x, j) of the row to t and rescales the rest of the row.
void set_coordinate(std::vector<double>& cond, std::size_t k, int x, std::size_t j, double t) {
  double* row = cond.data() + static_cast<std::size_t>(x) * k;
  const double old = row[j];
  const double rest = 1.0 - old;
  if (rest > 1e-300) {
    const double scale = (1.0 - t) / rest;
    for (std::size_t i = 0; i < k; ++i) row[i] *= scale;
  } else {
    const double fill = k > 1 ? (1.0 - t) / static_cast<double>(k - 1) : 0.0;
    for (std::size_t i = 0; i < k; ++i) row[i] = fill;
  }
  row[j] = t;
}

const double kGolden = 0.5 * (std::sqrt(5.0) - 1.0);

}  // namespace

RegionSample optimize_region(const DegradedSource& src, const DistortionMatrix& dist,
                             std::span<const double> targets, std::span<const int> cards,
                             const OptimizeConfig& cfg) {
  const int n = src.n_stages;
  if (static_cast<int>(targets.size()) != n || static_cast<int>(cards.size()) != n)
    throw std::invalid_argument("optimize_region: stage-count mismatch");
  for (double t : targets)
    if (!(t >= 0.0)) throw std::invalid_argument("optimize_region: negative distortion target");
  if (!within_cardinality_bounds(src.x_size(), cards))
    throw std::invalid_argument("optimize_region: cardinalities exceed the region bounds");
  if (dist.x_size != src.x_size())
    throw std::invalid_argument("optimize_region: distortion matrix does not match the source");

  std::vector<int> w_sizes(cards.begin(), cards.end());
  ChannelEvaluator ev(src, w_sizes, &dist);
  std::size_t k = 1;
  for (int s : w_sizes) k *= static_cast<std::size_t>(s);
  const std::size_t n_params = static_cast<std::size_t>(src.x_size()) * k;

  for (const auto& seed_cond : cfg.seed_conds)
    if (seed_cond.size() != n_params)
      throw std::invalid_argument("optimize_region: seed conditional has the wrong size");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(std::numeric_limits<double>::min(), 1.0);

  const int total_restarts = cfg.restarts + static_cast<int>(cfg.seed_conds.size());
  Objective obj{&ev, targets, cfg.lambda0, cfg.feasibility_slack, {}, {}, std::numeric_limits<double>::infinity(), {}};

  double least_violation = std::numeric_limits<double>::infinity();
  std::vector<double> least_violating_dist;

  std::vector<double> cond(n_params), trial(n_params);
  for (int restart = 0; restart < total_restarts; ++restart) {
    if (restart < static_cast<int>(cfg.seed_conds.size())) {
      cond = cfg.seed_conds[restart];
    } else {
      for (int x = 0; x < src.x_size(); ++x) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          cond[x * k + j] = -std::log(unif(rng));
          s += cond[x * k + j];
        }
        for (std::size_t j = 0; j < k; ++j) cond[x * k + j] /= s;
      }
    }

    obj.lambda = cfg.lambda0;
    double value = obj(cond);
    bool feasible = false;
    while (true) {
      for (int sweep = 0; sweep < cfg.max_sweeps_per_round && k > 1; ++sweep) {
        const double before = value;
        for (int x = 0; x < src.x_size(); ++x) {
          for (std::size_t j = 0; j < k; ++j) {
            // Golden-section line search on this coordinate in [0, 1].
            const auto probe = [&](double t) {
              trial = cond;
              set_coordinate(trial, k, x, j, t);
              return obj(trial);
            };
            double lo = 0.0, hi = 1.0;
            double m1 = hi - kGolden * (hi - lo), m2 = lo + kGolden * (hi - lo);
            double f1 = probe(m1), f2 = probe(m2);
            for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
              if (f1 <= f2) {
                hi = m2; m2 = m1; f2 = f1;
                m1 = hi - kGolden * (hi - lo);
                f1 = probe(m1);
              } else {
                lo = m1; m1 = m2; f1 = f2;
                m2 = lo + kGolden * (hi - lo);
                f2 = probe(m2);
              }
            }
            double t_best = f1 <= f2 ? m1 : m2;
            double f_best = std::min(f1, f2);
            for (double t_end : {0.0, 1.0}) {
              const double fe = probe(t_end);
              if (fe < f_best) { f_best = fe; t_best = t_end; }
            }
            if (f_best < value - 1e-14) {
              set_coordinate(cond, k, x, j, t_best);
              value = f_best;
            }
          }
        }
        if (before - value < 1e-12) break;
      }
      // Feasibility at the search slack decides whether the penalty grows.
      obj(cond);
      feasible = true;
      for (int m = 0; m < n; ++m)
        if (obj.dist[m] > targets[m] + cfg.feasibility_slack) feasible = false;
      if (feasible || obj.lambda >= cfg.lambda_max) break;
      obj.lambda *= 2.0;
      value = obj(cond);
    }

    if (!feasible) {
      obj(cond);
      double viol = 0.0;
      for (int m = 0; m < n; ++m) viol = std::max(viol, obj.dist[m] - targets[m]);
      if (viol < least_violation) {
        least_violation = viol;
        least_violating_dist = obj.dist;
      }
    }
  }

  if (obj.best_cond.empty())
    throw InfeasibleError("optimize_region: no restart met the distortion constraints (closest excess " +
                              std::to_string(least_violation) + ")",
                          least_violating_dist);

  std::vector<double> cmi, dists;
  const std::vector<double> best_cond = std::move(obj.best_cond);
  ev.eval(best_cond, cmi, dists);
  std::vector<double> cum(cmi);
  for (std::size_t m = 1; m < cum.size(); ++m) cum[m] += cum[m - 1];

  RegionSample sample;
  sample.distortions = dists;
  sample.cum_rates = cum;
  sample.witness = TestChannel::create(src.x_size(), w_sizes, best_cond,
                                       ev.extract_decoders(best_cond));
  sample.certified = false;
  sample.restarts_used = total_restarts;
  sample.seed = cfg.seed;
  return sample;
}

bool closure_implies(std::span<const RegionSample> samples, std::span<const double> cum) {
  for (const RegionSample& s : samples) {
    if (s.cum_rates.size() != cum.size()) continue;
    bool dominated = true;
    for (std::size_t m = 0; m < cum.size(); ++m)
      if (s.cum_rates[m] > cum[m] + 1e-12) { dominated = false; break; }
    if (dominated) return true;
  }
  return false;
}

ClosureVerdict sum_incremental_closure(std::span<const RegionSample> samples) {
  if (samples.empty()) return {true, "no samples"};
  const auto& d0 = samples.front().distortions;
  for (const RegionSample& s : samples) {
    if (s.distortions.size() != d0.size())
      return {false, "samples disagree on the number of stages"};
    for (std::size_t m = 0; m < d0.size(); ++m)
      if (std::abs(s.distortions[m] - d0[m]) > 1e-9)
        return {false, "samples do not share a distortion vector"};
    double prev = 0.0;
    for (double c : s.cum_rates) {
      if (c < -1e-12) return {false, "negative cumulative rate"};
      if (c < prev - 1e-12) return {false, "cumulative rates decrease"};
      prev = c;
    }
  }
  for (const RegionSample& s : samples)
    if (!closure_implies(samples, s.cum_rates))
      return {false, "a sample is not implied by the batch"};
  return {true, ""};
}

namespace {

// Joint over (X, Y2, W1, W2, V) where V = (W2 when J=1 else a constant, J)
// with J ~ Bernoulli(u) independent of everything else. V takes value 0 for
// J=0 and 1+w2 for J=1.
prob::JointPmf split_joint(const prob::JointPmf& base, int w2_size, double u) {
  std::vector<std::string> keep{"X", "Y2", "W1", "W2"};
  const prob::JointPmf m = base.marginal(keep);
  std::vector<prob::Axis> axes = m.axes();
  axes.push_back({"V", w2_size + 1});
  const std::size_t vn = static_cast<std::size_t>(w2_size) + 1;
  std::vector<double> table(m.cell_count() * vn, 0.0);
  std::vector<int> idx(4);
  for (std::size_t flat = 0; flat < m.cell_count(); ++flat) {
    const double mass = m.table()[flat];
    m.unflatten(flat, idx);
    table[flat * vn + 0] = mass * (1.0 - u);
    table[flat * vn + static_cast<std::size_t>(idx[3]) + 1] = mass * u;
  }
  return prob::JointPmf(std::move(axes), std::move(table));
}

const std::vector<std::string> kX{"X"}, kV{"V"}, kW2{"W2"};
const std::vector<std::string> kW1Y2{"W1", "Y2"}, kW1VY2{"W1", "V", "Y2"};

}  // namespace

RateSplit rate_split(const DegradedSource& src, const TestChannel& ch, double delta_r1,
                     double tol) {
  if (src.n_stages != 2) throw std::invalid_argument("rate_split: requires a two-stage source");
  const prob::JointPmf base = joint_with_source(src, ch);
  const double total = prob::cond_mutual_info(base, kX, kW2, kW1Y2);
  if (delta_r1 < -tol || delta_r1 > total + tol)
    throw std::domain_error("rate_split: target outside [0, I(X;W2|W1,Y2)]");
  delta_r1 = std::clamp(delta_r1, 0.0, total);

  const auto info_at = [&](double u) {
    return prob::cond_mutual_info(split_joint(base, ch.w_sizes[1], u), kX, kV, kW1Y2);
  };

  double lo = 0.0, hi = 1.0;
  // I(X;V|W1,Y2) grows continuously and monotonically from 0 to `total`.
  for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (info_at(mid) < delta_r1 ? lo : hi) = mid;
  }
  const double u = 0.5 * (lo + hi);
  const prob::JointPmf joint = split_joint(base, ch.w_sizes[1], u);
  RateSplit out;
  out.u = u;
  out.info_v = prob::cond_mutual_info(joint, kX, kV, kW1Y2);
  out.info_rest = prob::cond_mutual_info(joint, kX, kW2, kW1VY2);
  out.info_total = total;
  return out;
}

IndividualWitness sumrate_to_individual_witness(const DegradedSource& src, const TestChannel& ch,
                                                double r1, double r2, double tol) {
  if (src.n_stages != 2)
    throw std::invalid_argument("sumrate_to_individual_witness: requires a two-stage source");
  const auto cum = rate_vector(src, ch);
  const double i1 = cum[0];
  const double i2 = cum[1] - cum[0];
  if (r1 < i1 - tol || r2 < -tol || r1 + r2 < cum[1] - tol)
    throw std::domain_error("sumrate_to_individual_witness: rate pair outside the sum-rate region");

  IndividualWitness out;
  out.delta_r1 = r1 - i1;
  out.i_v11 = i1;
  if (out.delta_r1 >= i2 - tol) {
    // V12 = V22 = W2; the leftover stage-2 requirement is only r2 >= 0.
    out.v12_is_w2 = true;
    const prob::JointPmf base = joint_with_source(src, ch);
    // Duplicate W2 as an explicit V axis so the conditioning sets stay disjoint.
    std::vector<std::string> keep{"X", "Y2", "W1", "W2"};
    const prob::JointPmf m = base.marginal(keep);
    std::vector<prob::Axis> axes = m.axes();
    axes.push_back({"V", ch.w_sizes[1]});
    std::vector<double> table(m.cell_count() * static_cast<std::size_t>(ch.w_sizes[1]), 0.0);
    std::vector<int> idx(4);
    for (std::size_t flat = 0; flat < m.cell_count(); ++flat) {
      m.unflatten(flat, idx);
      table[flat * ch.w_sizes[1] + idx[3]] = m.table()[flat];
    }
    const prob::JointPmf joint(std::move(axes), std::move(table));
    out.i_v12 = prob::cond_mutual_info(joint, kX, kV, kW1Y2);
    out.i_v22 = prob::cond_mutual_info(joint, kX, kW2, kW1VY2);
  } else {
    const RateSplit split = rate_split(src, ch, out.delta_r1, tol);
    out.v12_is_w2 = false;
    out.split_u = split.u;
    out.i_v12 = split.info_v;
    out.i_v22 = split.info_rest;
  }
  out.r1_ok = r1 >= out.i_v11 + out.i_v12 - tol;
  out.r2_ok = r2 >= out.i_v22 - tol;
  return out;
}

}  // namespace srwz::finite
