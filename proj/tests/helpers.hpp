#pragma once

// Shared fixtures and independent oracles for the test suites. Everything is
// seeded; no test depends on wall-clock or OS entropy.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "srwz/pmf.hpp"
#include "srwz/region.hpp"

namespace testutil {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double unit(std::mt19937_64& g) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(g);
}

inline std::vector<double> random_simplex(std::mt19937_64& g, std::size_t n) {
  std::vector<double> v(n);
  double s = 0.0;
  for (double& x : v) {
    x = -std::log(std::max(unit(g), 1e-300));
    s += x;
  }
  for (double& x : v) x /= s;
  return v;
}

inline srwz::prob::JointPmf random_pmf(std::mt19937_64& g, std::vector<srwz::prob::Axis> axes) {
  std::size_t n = 1;
  for (const auto& ax : axes) n *= static_cast<std::size_t>(ax.size);
  return srwz::prob::JointPmf(std::move(axes), random_simplex(g, n));
}

// Two-stage degraded source built as a channel cascade X -> Y2 -> Y1, which
// guarantees the Markov chain X <-> Y2 <-> Y1.
inline srwz::finite::DegradedSource random_degraded_source(std::mt19937_64& g, int nx = 2,
                                                           int ny2 = 2, int ny1 = 2) {
  const auto px = random_simplex(g, nx);
  std::vector<std::vector<double>> w2, w1;
  for (int x = 0; x < nx; ++x) w2.push_back(random_simplex(g, ny2));
  for (int y2 = 0; y2 < ny2; ++y2) w1.push_back(random_simplex(g, ny1));
  std::vector<double> table(static_cast<std::size_t>(nx) * ny1 * ny2);
  for (int x = 0; x < nx; ++x)
    for (int y1 = 0; y1 < ny1; ++y1)
      for (int y2 = 0; y2 < ny2; ++y2)
        table[(static_cast<std::size_t>(x) * ny1 + y1) * ny2 + y2] = px[x] * w2[x][y2] * w1[y2][y1];
  srwz::prob::JointPmf pmf({{"X", nx}, {"Y1", ny1}, {"Y2", ny2}}, std::move(table));
  return srwz::finite::DegradedSource::create(std::move(pmf));
}

// Random conditional P(w1..wN | x) with trivial decoders (stage m copies wm
// when alphabet sizes allow, else symbol 0).
inline srwz::finite::TestChannel random_channel(std::mt19937_64& g,
                                                const srwz::finite::DegradedSource& src,
                                                std::vector<int> w_sizes) {
  const int nx = src.x_size();
  std::size_t k = 1;
  for (int s : w_sizes) k *= static_cast<std::size_t>(s);
  std::vector<double> cond;
  for (int x = 0; x < nx; ++x) {
    const auto row = random_simplex(g, k);
    cond.insert(cond.end(), row.begin(), row.end());
  }
  std::vector<srwz::finite::Decoder> decoders;
  for (int m = 0; m < src.n_stages; ++m) {
    srwz::finite::Decoder dec;
    for (int i = 0; i <= m; ++i) dec.ctx_sizes.push_back(w_sizes[i]);
    dec.ctx_sizes.push_back(src.y_size(m));
    std::size_t cells = 1;
    for (int s : dec.ctx_sizes) cells *= static_cast<std::size_t>(s);
    dec.map.assign(cells, 0);
    decoders.push_back(std::move(dec));
  }
  return srwz::finite::TestChannel::create(nx, std::move(w_sizes), std::move(cond),
                                           std::move(decoders));
}

// Direct-summation conditional mutual information, independent of the
// entropy-difference path in the library:
//   I(A;B|C) = sum p(a,b,c) log2( p(a,b,c) p(c) / (p(a,c) p(b,c)) ).
inline double cmi_direct(const srwz::prob::JointPmf& pmf, const std::vector<std::string>& a,
                         const std::vector<std::string>& b, const std::vector<std::string>& c) {
  const auto ia = pmf.axis_indices(a);
  const auto ib = pmf.axis_indices(b);
  const auto ic = pmf.axis_indices(c);
  const auto& axes = pmf.axes();
  if (ia.size() + ib.size() + ic.size() != axes.size())
    throw std::invalid_argument("cmi_direct: a, b, c must cover every axis");

  const auto key = [&axes](const std::vector<int>& idx, const std::vector<int>& which) {
    std::size_t k = 0;
    for (int ax : which) k = k * static_cast<std::size_t>(axes[ax].size) + idx[ax];
    return k;
  };
  auto sized = [&axes](const std::vector<int>& which) {
    std::size_t n = 1;
    for (int ax : which) n *= static_cast<std::size_t>(axes[ax].size);
    return n;
  };
  std::vector<int> iac(ia), ibc(ib);
  iac.insert(iac.end(), ic.begin(), ic.end());
  ibc.insert(ibc.end(), ic.begin(), ic.end());

  std::vector<double> pc(sized(ic), 0.0), pac(sized(iac), 0.0), pbc(sized(ibc), 0.0);
  std::vector<int> idx(axes.size());
  for (std::size_t flat = 0; flat < pmf.cell_count(); ++flat) {
    pmf.unflatten(flat, idx);
    const double m = pmf.table()[flat];
    pc[key(idx, ic)] += m;
    pac[key(idx, iac)] += m;
    pbc[key(idx, ibc)] += m;
  }
  double info = 0.0;
  for (std::size_t flat = 0; flat < pmf.cell_count(); ++flat) {
    const double m = pmf.table()[flat];
    if (m <= 0.0) continue;
    pmf.unflatten(flat, idx);
    info += m * std::log2(m * pc[key(idx, ic)] / (pac[key(idx, iac)] * pbc[key(idx, ibc)]));
  }
  return info;
}

// General entry point: marginalize onto (a, b, c) first so the pmf may carry
// extra axes.
inline double cmi_direct_marginal(const srwz::prob::JointPmf& pmf, const std::vector<std::string>& a,
                                  const std::vector<std::string>& b,
                                  const std::vector<std::string>& c) {
  std::vector<std::string> keep(a);
  keep.insert(keep.end(), b.begin(), b.end());
  keep.insert(keep.end(), c.begin(), c.end());
  return cmi_direct(pmf.marginal(keep), a, b, c);
}

inline double central_difference(double (*f)(double, double), double p, double u, double h) {
  return (f(p, u + h) - f(p, u - h)) / (2.0 * h);
}

}  // namespace testutil
