#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace srwz::prob {

struct Axis {
  std::string name;
  int size = 0;
};

// Dense joint probability mass function over a tuple of named finite
// alphabets. The table is stored row-major in axis order; all information
// quantities derived from it are in bits.
class JointPmf {
 public:
  JointPmf(std::vector<Axis> axes, std::vector<double> table);

  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<double>& table() const { return table_; }
  std::size_t cell_count() const { return table_.size(); }

  int axis_index(std::string_view name) const;  // throws std::out_of_range
  std::vector<int> axis_indices(std::span<const std::string> names) const;

  double at(std::span<const int> idx) const { return table_[flat_index(idx)]; }
  std::size_t flat_index(std::span<const int> idx) const;
  void unflatten(std::size_t flat, std::span<int> idx) const;

  // Marginal over the named variables, axes ordered as listed.
  JointPmf marginal(std::span<const std::string> keep) const;

  nlohmann::json to_json() const;
  static JointPmf from_json(const nlohmann::json& j);

 private:
  std::vector<Axis> axes_;
  std::vector<double> table_;
  std::vector<std::size_t> strides_;
};

// Shannon entropy (bits) of the marginal on `vars`. H() of no variables is 0.
double entropy(const JointPmf& pmf, std::span<const std::string> vars);

// Conditional mutual information I(A;B|C) in bits; the three sets must be
// pairwise disjoint.
double cond_mutual_info(const JointPmf& pmf, std::span<const std::string> a,
                        std::span<const std::string> b,
                        std::span<const std::string> given);

struct MarkovReport {
  bool ok = false;
  double max_violation_bits = 0.0;
  // Interior chain position with the largest I(prefix; suffix | node).
  int worst_node = -1;
};

// Checks the Markov chain G1 <-> G2 <-> ... <-> Gk of variable groups:
// for every interior node, I(prefix; suffix | node) must not exceed tol.
MarkovReport markov_check(const JointPmf& pmf,
                          const std::vector<std::vector<std::string>>& chain,
                          double tol);

}  // namespace srwz::prob
