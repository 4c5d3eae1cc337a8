#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srwz/pmf.hpp"

namespace srwz::finite {

// Per-letter distortion d(x, xhat) as a dense matrix.
struct DistortionMatrix {
  int x_size = 0;
  int xhat_size = 0;
  std::vector<double> d;  // row-major [x][xhat]

  double at(int x, int xhat) const { return d[static_cast<std::size_t>(x) * xhat_size + xhat]; }
};

DistortionMatrix hamming_distortion(int n);

// Joint law of (X, Y1..YN) whose side informations are stochastically
// degraded: X <-> YN <-> ... <-> Y1. Construction verifies the chain.
struct DegradedSource {
  prob::JointPmf pmf;
  int n_stages = 0;
  double degradedness_tol = 1e-10;

  // Axis names must be "X", "Y1", ..., "YN". Throws std::invalid_argument
  // with the worst measured violation if the degradedness check fails.
  static DegradedSource create(prob::JointPmf pmf, double degradedness_tol = 1e-10);

  int x_size() const;
  int y_size(int stage) const;  // stage in [0, N)
};

// Deterministic reconstruction map over a context tuple.
struct Decoder {
  std::vector<int> ctx_sizes;
  std::vector<int> map;  // reconstruction symbol per flat context

  int apply(std::span<const int> ctx) const;
  std::size_t context_count() const { return map.size(); }
};

// Conditional law P(W1..WN | X) together with the per-stage decoders
// f'_m(W1..Wm, Ym). Stage m's decoder context is (w1, ..., w_{m+1}, y_{m+1})
// in 0-based stage indexing.
struct TestChannel {
  int x_size = 0;
  std::vector<int> w_sizes;
  std::vector<double> cond;  // row-major [x][w1]..[wN]
  std::vector<Decoder> decoders;

  // Validates that every conditional slice sums to 1 within 1e-12.
  static TestChannel create(int x_size, std::vector<int> w_sizes, std::vector<double> cond,
                            std::vector<Decoder> decoders);

  std::size_t w_cell_count() const;
  // True when decoder `stage` ignores the variables W1..W_{stage-1}, i.e. is
  // of the plain f_m(W_m, Y_m) form.
  bool decoder_is_simple(int stage) const;
};

// Alphabet bounds of the region characterization: |W1| <= |X| + 2N - 1 and
// |Wm| <= |X| prod_{i<m} |Wi| + 2N - 2m - 1.
bool within_cardinality_bounds(int x_size, std::span<const int> w_sizes);

// Joint pmf over (X, Y1..YN, W1..WN) = P(x, y) P(w | x).
prob::JointPmf joint_with_source(const DegradedSource& src, const TestChannel& ch);

struct DecoderResult {
  Decoder decoder;
  double distortion = 0.0;
};

// Expected-distortion-minimizing deterministic decoder for one stage, with
// ties broken toward the smallest reconstruction symbol. Zero-probability
// contexts map to symbol 0 and do not contribute to the expectation.
DecoderResult optimal_decoder(const DegradedSource& src, const TestChannel& ch, int stage,
                              const DistortionMatrix& dist);

// Cumulative sum-rate vector: entry m is sum_{i<=m} I(X; Wi | W1..W_{i-1}, Yi)
// in bits.
std::vector<double> rate_vector(const DegradedSource& src, const TestChannel& ch);

// Expected distortion per stage under the channel's own decoders.
std::vector<double> achieved_distortions(const DegradedSource& src, const TestChannel& ch,
                                         const DistortionMatrix& dist);

struct RegionSample {
  std::vector<double> distortions;
  std::vector<double> cum_rates;
  TestChannel witness;
  bool certified = false;
  int restarts_used = 0;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

struct OptimizeConfig {
  int restarts = 64;
  std::uint64_t seed = 0;
  // Optional warm starts, e.g. closed-form witnesses; each entry is a full
  // conditional table in TestChannel layout.
  std::vector<std::vector<double>> seed_conds;
  double feasibility_slack = 1e-6;
  double lambda0 = 10.0;
  double lambda_max = 1e12;
  int max_sweeps_per_round = 12;
};

// Multi-start penalized coordinate descent over P(w|x) minimizing the final
// cumulative sum-rate subject to stage distortions <= targets + slack.
// The result is an upper bound on the region boundary (certified = false).
// Throws InfeasibleError when no restart meets the constraints.
RegionSample optimize_region(const DegradedSource& src, const DistortionMatrix& dist,
                             std::span<const double> targets, std::span<const int> cards,
                             const OptimizeConfig& cfg = {});

// True when some sample's cumulative rate vector is dominated entrywise by
// `cum`, i.e. `cum` is achievable by the sum-incremental property.
bool closure_implies(std::span<const RegionSample> samples, std::span<const double> cum);

struct ClosureVerdict {
  bool consistent = false;
  std::string detail;
};

// Consistency check of a batch of samples sharing one distortion vector:
// sample invariants hold and every cumulative-dominating pair is reported
// achievable by closure_implies.
ClosureVerdict sum_incremental_closure(std::span<const RegionSample> samples);

struct RateSplit {
  double u = 0.0;             // P(J = 1)
  double info_v = 0.0;        // I(X; V | W1, Y2)
  double info_rest = 0.0;     // I(X; W2 | W1, V, Y2)
  double info_total = 0.0;    // I(X; W2 | W1, Y2)
};

// Splits the second-stage rate with a Bernoulli selector: finds u such that
// V = (W2(J), J), J ~ Bernoulli(u), carries exactly delta_r1 bits of
// I(X; V | W1, Y2). Requires a two-stage source/channel.
RateSplit rate_split(const DegradedSource& src, const TestChannel& ch, double delta_r1,
                     double tol = 1e-9);

struct IndividualWitness {
  double delta_r1 = 0.0;
  bool v12_is_w2 = false;  // second branch: V12 = V22 = W2
  double split_u = 0.0;    // meaningful when !v12_is_w2
  double i_v11 = 0.0;      // I(X; V11 | Y1)
  double i_v12 = 0.0;      // I(X; V12 | V11, Y2)
  double i_v22 = 0.0;      // I(X; V22 | V11, V12, Y2)
  bool r1_ok = false;
  bool r2_ok = false;
};

// Converts a point of the sum-rate region into a (V11, V12, V22) witness for
// the individual-rate region, using rate_split when the stage-1 surplus is
// smaller than I(X; W2 | W1, Y2).
IndividualWitness sumrate_to_individual_witness(const DegradedSource& src, const TestChannel& ch,
                                                double r1, double r2, double tol = 1e-9);

}  // namespace srwz::finite
