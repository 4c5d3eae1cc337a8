#include "srwz/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace srwz::prob {

namespace {

constexpr double kMassTol = 1e-12;

double nlog2n(double q) { return q > 0.0 ? q * std::log2(q) : 0.0; }

}  // namespace

JointPmf::JointPmf(std::vector<Axis> axes, std::vector<double> table)
    : axes_(std::move(axes)), table_(std::move(table)) {
  std::set<std::string> seen;
  std::size_t cells = 1;
  for (const Axis& ax : axes_) {
    if (ax.size < 1) throw std::invalid_argument("JointPmf: alphabet size must be >= 1");
    if (!seen.insert(ax.name).second)
      throw std::invalid_argument("JointPmf: duplicate axis name '" + ax.name + "'");
    cells *= static_cast<std::size_t>(ax.size);
  }
  if (table_.size() != cells)
    throw std::invalid_argument("JointPmf: table size does not match axes");
  double mass = 0.0;
  for (double v : table_) {
    if (!(v >= 0.0)) throw std::invalid_argument("JointPmf: negative or NaN entry");
    mass += v;
  }
  if (std::abs(mass - 1.0) > kMassTol)
    throw std::invalid_argument("JointPmf: total mass deviates from 1 by more than 1e-12");

  strides_.assign(axes_.size(), 1);
  for (int i = static_cast<int>(axes_.size()) - 2; i >= 0; --i)
    strides_[i] = strides_[i + 1] * static_cast<std::size_t>(axes_[i + 1].size);
}

int JointPmf::axis_index(std::string_view name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i].name == name) return static_cast<int>(i);
  throw std::out_of_range("JointPmf: unknown variable '" + std::string(name) + "'");
}

std::vector<int> JointPmf::axis_indices(std::span<const std::string> names) const {
  std::vector<int> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(axis_index(n));
  return out;
}

std::size_t JointPmf::flat_index(std::span<const int> idx) const {
  if (idx.size() != axes_.size()) throw std::invalid_argument("JointPmf: index arity mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= axes_[i].size)
      throw std::out_of_range("JointPmf: index out of range");
    flat += strides_[i] * static_cast<std::size_t>(idx[i]);
  }
  return flat;
}

void JointPmf::unflatten(std::size_t flat, std::span<int> idx) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    idx[i] = static_cast<int>(flat / strides_[i]);
    flat %= strides_[i];
  }
}

JointPmf JointPmf::marginal(std::span<const std::string> keep) const {
  const std::vector<int> kept = axis_indices(keep);
  std::vector<Axis> new_axes;
  new_axes.reserve(kept.size());
  std::size_t cells = 1;
  for (int k : kept) {
    new_axes.push_back(axes_[k]);
    cells *= static_cast<std::size_t>(axes_[k].size);
  }
  // Reduced strides aligned with the kept axes, row-major in `keep` order.
  std::vector<std::size_t> red(kept.size(), 1);
  for (int i = static_cast<int>(kept.size()) - 2; i >= 0; --i)
    red[i] = red[i + 1] * static_cast<std::size_t>(new_axes[i + 1].size);

  std::vector<double> out(cells, 0.0);
  std::vector<int> idx(axes_.size());
  for (std::size_t flat = 0; flat < table_.size(); ++flat) {
    if (table_[flat] == 0.0) continue;
    unflatten(flat, idx);
    std::size_t target = 0;
    for (std::size_t i = 0; i < kept.size(); ++i)
      target += red[i] * static_cast<std::size_t>(idx[kept[i]]);
    out[target] += table_[flat];
  }
  return JointPmf(std::move(new_axes), std::move(out));
}

nlohmann::json JointPmf::to_json() const {
  nlohmann::json jaxes = nlohmann::json::array();
  for (const Axis& ax : axes_) jaxes.push_back({{"name", ax.name}, {"size", ax.size}});
  return {{"axes", jaxes}, {"table", table_}};
}

JointPmf JointPmf::from_json(const nlohmann::json& j) {
  std::vector<Axis> axes;
  for (const auto& ja : j.at("axes"))
    axes.push_back({ja.at("name").get<std::string>(), ja.at("size").get<int>()});
  return JointPmf(std::move(axes), j.at("table").get<std::vector<double>>());
}

double entropy(const JointPmf& pmf, std::span<const std::string> vars) {
  if (vars.empty()) return 0.0;
  const JointPmf m = pmf.marginal(vars);
  double h = 0.0;
  for (double q : m.table()) h -= nlog2n(q);
  return h;
}

namespace {

void require_disjoint(std::span<const std::string> a, std::span<const std::string> b,
                      std::span<const std::string> c) {
  std::set<std::string> seen;
  for (auto part : {a, b, c})
    for (const auto& v : part)
      if (!seen.insert(v).second)
        throw std::invalid_argument("cond_mutual_info: variable sets overlap at '" + v + "'");
}

std::vector<std::string> concat(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::string> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

double cond_mutual_info(const JointPmf& pmf, std::span<const std::string> a,
                        std::span<const std::string> b,
                        std::span<const std::string> given) {
  require_disjoint(a, b, given);
  const auto ac = concat(a, given);
  const auto bc = concat(b, given);
  const auto abc = concat(a, bc);
  return entropy(pmf, ac) + entropy(pmf, bc) - entropy(pmf, abc) -
         entropy(pmf, given);
}

MarkovReport markov_check(const JointPmf& pmf,
                          const std::vector<std::vector<std::string>>& chain,
                          double tol) {
  if (chain.size() < 3) return {true, 0.0, -1};
  MarkovReport rep{true, 0.0, -1};
  for (std::size_t i = 1; i + 1 < chain.size(); ++i) {
    std::vector<std::string> prefix, suffix;
    for (std::size_t j = 0; j < i; ++j)
      prefix.insert(prefix.end(), chain[j].begin(), chain[j].end());
    for (std::size_t j = i + 1; j < chain.size(); ++j)
      suffix.insert(suffix.end(), chain[j].begin(), chain[j].end());
    const double v = cond_mutual_info(pmf, prefix, suffix, chain[i]);
    if (v > rep.max_violation_bits) {
      rep.max_violation_bits = v;
      rep.worst_node = static_cast<int>(i);
    }
  }
  rep.ok = rep.max_violation_bits <= tol;
  return rep;
}

}  // namespace srwz::prob
