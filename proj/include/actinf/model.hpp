// Generative model declaration and validation: dimensions, Dirichlet priors
// over the likelihood/transition/initial-state parameters, preferences,
// policy enumeration, and the point-estimate helpers used for predictions.
#pragma once

#include <string>
#include <vector>

#include "actinf/exp_family.hpp"

namespace actinf {

struct ModelDims {
  int num_states = 1;
  int num_obs = 1;
  int num_actions = 1;
  int horizon = 0;       // T; policies have exactly this many actions
  int current_time = 0;  // t <= T
};

// Policies are fixed action sequences over the horizon, not state-action maps.
struct PolicySet {
  std::vector<std::vector<int>> seqs;

  int size() const { return static_cast<int>(seqs.size()); }
  int action_at(int policy, int tau) const { return seqs[policy][tau]; }
};

inline constexpr int kPolicyCap = 4096;

// All num_actions^depth sequences in lexicographic order. depth 0 yields the
// single empty policy of a one-shot model.
inline PolicySet enumerate_policies(int num_actions, int depth, int cap = kPolicyCap) {
  if (num_actions < 1 || depth < 0)
    throw std::invalid_argument("enumerate_policies: bad arguments");
  double count = std::pow(static_cast<double>(num_actions), depth);
  if (count > static_cast<double>(cap))
    throw std::length_error("enumerate_policies: num_actions^depth exceeds cap " +
                            std::to_string(cap));
  PolicySet out;
  std::vector<int> seq(depth, 0);
  while (true) {
    out.seqs.push_back(seq);
    int i = depth - 1;
    while (i >= 0 && seq[i] == num_actions - 1) seq[i--] = 0;
    if (i < 0) break;
    ++seq[i];
  }
  return out;
}

// Full model spec. Parameter blocks hold Dirichlet pseudo-counts unless their
// frozen flag is set, in which case they hold exact probabilities: expected
// logs become plain logs and the Dirichlet updates are skipped.
struct GenerativeModel {
  ModelDims dims;
  Mat a;               // |O| x |S| likelihood counts (or probabilities if frozen)
  std::vector<Mat> b;  // |U| transition blocks, each |S| x |S|
  Vec d;               // |S| initial-state counts
  Vec C;               // |O| outcome preferences
  PolicySet policies;
  double beta = 1.0;     // rate of the gamma prior over precision (structured scheme)
  double c_const = 10.0; // pseudo-count level of the policy prior (factorised scheme)
  bool frozen_a = false;
  bool frozen_b = false;
  bool frozen_d = false;
};

namespace detail {

inline bool column_stochastic(const Mat& m, double tol = 1e-9) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!(m(i, j) >= 0.0) || !std::isfinite(m(i, j))) return false;
      s += m(i, j);
    }
    if (std::abs(s - 1.0) > tol) return false;
  }
  return true;
}

inline bool strictly_positive(const Mat& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j)) || m(i, j) <= 0.0) return false;
  return true;
}

inline void check_block(std::vector<std::string>& out, const Mat& m, bool frozen,
                        const std::string& name, int rows, int cols) {
  if (m.rows() != rows || m.cols() != cols) {
    out.push_back(name + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                  ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    return;
  }
  if (frozen) {
    if (!column_stochastic(m)) out.push_back(name + ": frozen block is not column-stochastic");
  } else if (!strictly_positive(m)) {
    out.push_back(name + ": non-positive Dirichlet count");
  }
}

}  // namespace detail

// Returns every violated invariant; an empty list means the model is valid
// and every engine operation on it is total.
inline std::vector<std::string> validate(const GenerativeModel& m) {
  std::vector<std::string> v;
  const auto& dm = m.dims;
  if (dm.num_states < 1) v.push_back("dims.num_states: must be >= 1");
  if (dm.num_obs < 1) v.push_back("dims.num_obs: must be >= 1");
  if (dm.num_actions < 1) v.push_back("dims.num_actions: must be >= 1");
  if (dm.horizon < 0) v.push_back("dims.horizon: must be >= 0");
  if (dm.current_time < 0 || dm.current_time > dm.horizon)
    v.push_back("dims.current_time: must lie in [0, horizon]");
  if (!v.empty()) return v;

  detail::check_block(v, m.a, m.frozen_a, "a", dm.num_obs, dm.num_states);
  if (static_cast<int>(m.b.size()) != dm.num_actions)
    v.push_back("b: expected " + std::to_string(dm.num_actions) + " action blocks, got " +
                std::to_string(m.b.size()));
  else
    for (int u = 0; u < dm.num_actions; ++u)
      detail::check_block(v, m.b[u], m.frozen_b, "b[" + std::to_string(u) + "]",
                          dm.num_states, dm.num_states);
  detail::check_block(v, Mat(m.d), m.frozen_d, "d", dm.num_states, 1);

  if (m.C.size() != dm.num_obs) {
    v.push_back("C: expected " + std::to_string(dm.num_obs) + " entries");
  } else {
    double s = 0.0;
    bool ok = true;
    for (Eigen::Index i = 0; i < m.C.size(); ++i) {
      if (!(m.C[i] >= 0.0)) ok = false;
      s += m.C[i];
    }
    if (!ok || std::abs(s - 1.0) > 1e-9) v.push_back("C: not a probability vector");
  }

  if (m.policies.size() < 1) v.push_back("policies: at least one policy required");
  for (int k = 0; k < m.policies.size(); ++k) {
    const auto& seq = m.policies.seqs[k];
    if (static_cast<int>(seq.size()) != dm.horizon)
      v.push_back("policies[" + std::to_string(k) + "]: policy length " +
                  std::to_string(seq.size()) + " != horizon " + std::to_string(dm.horizon));
    for (int u : seq)
      if (u < 0 || u >= dm.num_actions)
        v.push_back("policies[" + std::to_string(k) + "]: action index out of range");
  }

  if (!(m.beta > 0.0)) v.push_back("beta: must be > 0");
  if (!std::isfinite(m.c_const)) v.push_back("c_const: must be finite");
  return v;
}

// Dirichlet mean, column by column; frozen blocks already store exact
// probabilities and are returned unchanged.
inline Mat expected_params(const Mat& block, bool frozen = false) {
  if (frozen) return block;
  Mat out(block.rows(), block.cols());
  for (Eigen::Index j = 0; j < block.cols(); ++j) out.col(j) = block.col(j) / block.col(j).sum();
  return out;
}
inline Mat expected_params(const DirichletBlock& block) { return expected_params(block.counts()); }

// Expected log parameters: digamma differences for Dirichlet blocks, plain
// clamped logs for frozen blocks.
inline Mat expected_logs(const Mat& block, bool frozen = false) {
  if (!frozen) return expected_log_dirichlet(block);
  Mat out(block.rows(), block.cols());
  for (Eigen::Index j = 0; j < block.cols(); ++j)
    for (Eigen::Index i = 0; i < block.rows(); ++i) out(i, j) = log_clamped(block(i, j));
  return out;
}

}  // namespace actinf
