// Expected free energy in the three forms used for policy evaluation:
// risk + ambiguity, epistemic + extrinsic value, and the simplified
// conditional-entropy form of the fully factorised scheme.
#pragma once

#include <utility>
#include <vector>

#include "actinf/model.hpp"

namespace actinf {

// Predicted outcome distribution A_mean * s: marginalisation of the
// likelihood over the current state belief.
inline ProbVector predicted_outcomes(const Mat& A_mean, const Vec& s) {
  if (A_mean.cols() != s.size()) throw std::invalid_argument("predicted_outcomes: dimension mismatch");
  return ProbVector(Vec(A_mean * s));
}

// Risk + ambiguity, summed over future time steps:
//   G(k) = sum_{tau=t+1}^{T} KL(A_mean s_tau^k || C) + sum_i s_tau^k(i) H(A_mean col i)
// state_marginals[k][tau] covers tau = 0..T per policy; only tau > t is read.
// Divergent risk (preference with empty support) yields a +inf entry.
inline Vec efe_classic(const Mat& A_mean, const Vec& C,
                       const std::vector<std::vector<Vec>>& state_marginals, int t) {
  const int num_policies = static_cast<int>(state_marginals.size());
  Vec col_entropy(A_mean.cols());
  for (Eigen::Index j = 0; j < A_mean.cols(); ++j)
    col_entropy[j] = entropy_categorical(Vec(A_mean.col(j)));

  Vec g = Vec::Zero(num_policies);
  for (int k = 0; k < num_policies; ++k) {
    const int T = static_cast<int>(state_marginals[k].size()) - 1;
    for (int tau = t + 1; tau <= T; ++tau) {
      const Vec& s = state_marginals[k][tau];
      g[k] += kl_categorical(Vec(A_mean * s), C);
      g[k] += col_entropy.dot(s);
    }
  }
  return g;
}

inline Vec efe_classic(const GenerativeModel& m,
                       const std::vector<std::vector<Vec>>& state_marginals, int t) {
  return efe_classic(expected_params(m.a, m.frozen_a), m.C, state_marginals, t);
}

// Per-policy epistemic value (mutual information between future states and
// outcomes under the joint A_mean(o|s) s_tau(s), enumerated cell by cell) and
// extrinsic value (expected log preference of predicted outcomes). These
// reproduce the reward-vs-learning decomposition only approximately, so no
// identity with efe_classic is asserted.
inline std::pair<Vec, Vec> efe_epistemic_extrinsic(
    const Mat& A_mean, const Vec& C,
    const std::vector<std::vector<Vec>>& state_marginals, int t) {
  const int num_policies = static_cast<int>(state_marginals.size());
  Vec epistemic = Vec::Zero(num_policies);
  Vec extrinsic = Vec::Zero(num_policies);
  for (int k = 0; k < num_policies; ++k) {
    const int T = static_cast<int>(state_marginals[k].size()) - 1;
    for (int tau = t + 1; tau <= T; ++tau) {
      const Vec& s = state_marginals[k][tau];
      const Vec o_marg = A_mean * s;
      for (Eigen::Index o = 0; o < A_mean.rows(); ++o) {
        extrinsic[k] += o_marg[o] * log_clamped(C[o]);
        for (Eigen::Index j = 0; j < A_mean.cols(); ++j) {
          const double joint = A_mean(o, j) * s[j];
          if (joint > 0.0)
            epistemic[k] += joint * (std::log(joint) - std::log(o_marg[o]) - log_clamped(s[j]));
        }
      }
    }
  }
  return {epistemic, extrinsic};
}

inline std::pair<Vec, Vec> efe_epistemic_extrinsic(
    const GenerativeModel& m, const std::vector<std::vector<Vec>>& state_marginals, int t) {
  return efe_epistemic_extrinsic(expected_params(m.a, m.frozen_a), m.C, state_marginals, t);
}

// Simplified form under the fully factorised posterior: the expected
// conditional entropy of the hidden-state transitions,
//   G(k) = sum_{tau=1}^{T} sum_j D_tilde_{tau-1}(j) H(B_mean[u_k(tau-1)] col j).
// Depends on a policy only through its action sequence.
inline Vec efe_factorised(const std::vector<Mat>& B_means, const PolicySet& policies,
                          const std::vector<Vec>& state_marginals) {
  const int T = static_cast<int>(state_marginals.size()) - 1;
  std::vector<Vec> col_entropy(B_means.size());
  for (std::size_t u = 0; u < B_means.size(); ++u) {
    col_entropy[u] = Vec(B_means[u].cols());
    for (Eigen::Index j = 0; j < B_means[u].cols(); ++j)
      col_entropy[u][j] = entropy_categorical(Vec(B_means[u].col(j)));
  }
  Vec g = Vec::Zero(policies.size());
  for (int k = 0; k < policies.size(); ++k)
    for (int tau = 1; tau <= T; ++tau)
      g[k] += col_entropy[policies.action_at(k, tau - 1)].dot(state_marginals[tau - 1]);
  return g;
}

inline Vec efe_factorised(const GenerativeModel& m, const std::vector<Vec>& state_marginals) {
  std::vector<Mat> means;
  means.reserve(m.b.size());
  for (const Mat& block : m.b) means.push_back(expected_params(block, m.frozen_b));
  return efe_factorised(means, m.policies, state_marginals);
}

}  // namespace actinf
