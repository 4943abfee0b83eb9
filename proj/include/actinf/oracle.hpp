// Brute-force exact inference on tiny frozen models by full enumeration of
// state trajectories. Ground truth for evidence, marginals and expected free
// energy. Everything here recomputes its own sums and entropies with plain
// loops; none of the engine or efe code paths are reused.
#pragma once

#include <functional>
#include <vector>

#include "actinf/model.hpp"

namespace actinf::oracle {

inline constexpr double kEnumerationCap = 1e6;

namespace detail {

inline void require_frozen(const GenerativeModel& m) {
  if (!m.frozen_a || !m.frozen_b || !m.frozen_d)
    throw std::invalid_argument("oracle: requires frozen (point-mass) parameters");
}

inline void require_small(const GenerativeModel& m) {
  if (std::pow(static_cast<double>(m.dims.num_states), m.dims.horizon + 1) > kEnumerationCap)
    throw std::length_error("oracle: state space exceeds enumeration cap");
}

// Walks all |S|^(T+1) state tuples, invoking fn with the tuple and its joint
// weight P(o_{0:t}, s_{0:T} | policy).
inline void for_each_trajectory(const GenerativeModel& m, const std::vector<OneHot>& obs,
                                int policy,
                                const std::function<void(const std::vector<int>&, double)>& fn) {
  const int T = m.dims.horizon;
  const int S = m.dims.num_states;
  const int t = static_cast<int>(obs.size()) - 1;
  std::vector<int> s(T + 1, 0);
  while (true) {
    double w = m.d[s[0]];
    for (int tau = 1; tau <= T; ++tau)
      w *= m.b[m.policies.action_at(policy, tau - 1)](s[tau], s[tau - 1]);
    for (int tau = 0; tau <= t; ++tau) w *= m.a(obs[tau].index, s[tau]);
    fn(s, w);
    int i = T;
    while (i >= 0 && s[i] == S - 1) s[i--] = 0;
    if (i < 0) break;
    ++s[i];
  }
}

}  // namespace detail

// ln sum_{s_{0:T}} P(o_{0:t}, s_{0:T} | policy); -inf marks an observation
// sequence that is impossible under the model.
inline double exact_evidence(const GenerativeModel& m, const std::vector<OneHot>& obs,
                             int policy) {
  detail::require_frozen(m);
  detail::require_small(m);
  double total = 0.0;
  detail::for_each_trajectory(m, obs, policy, [&](const std::vector<int>&, double w) { total += w; });
  if (total <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(total);
}

// P(S_tau | o_{0:t}, policy) for every tau, by summing the joint and
// normalising. Zero evidence is an error.
inline std::vector<Vec> exact_posterior_marginals(const GenerativeModel& m,
                                                  const std::vector<OneHot>& obs, int policy) {
  detail::require_frozen(m);
  detail::require_small(m);
  const int T = m.dims.horizon;
  std::vector<Vec> marg(T + 1, Vec::Zero(m.dims.num_states));
  double total = 0.0;
  detail::for_each_trajectory(m, obs, policy, [&](const std::vector<int>& s, double w) {
    total += w;
    for (int tau = 0; tau <= T; ++tau) marg[tau][s[tau]] += w;
  });
  if (total <= 0.0) throw std::runtime_error("exact_posterior_marginals: zero evidence");
  for (auto& v : marg) v /= total;
  return marg;
}

// Full joint table over (policy, S_0..S_T, O_0..O_t) for given prior policy
// weights. Probabilities sum to one over all indices.
struct JointTable {
  std::vector<std::vector<double>> probabilities;  // [policy][flat state+obs index]
  double sum() const {
    double s = 0.0;
    for (const auto& row : probabilities)
      for (double p : row) s += p;
    return s;
  }
};

inline JointTable build_joint(const GenerativeModel& m, const Vec& policy_weights, int t) {
  detail::require_frozen(m);
  detail::require_small(m);
  const int T = m.dims.horizon;
  const int S = m.dims.num_states;
  const int O = m.dims.num_obs;
  JointTable table;
  table.probabilities.resize(m.policies.size());
  for (int k = 0; k < m.policies.size(); ++k) {
    std::vector<int> idx(T + 1 + t + 1, 0);  // states then observations
    while (true) {
      double w = policy_weights[k] * m.d[idx[0]];
      for (int tau = 1; tau <= T; ++tau)
        w *= m.b[m.policies.action_at(k, tau - 1)](idx[tau], idx[tau - 1]);
      for (int tau = 0; tau <= t; ++tau) w *= m.a(idx[T + 1 + tau], idx[tau]);
      table.probabilities[k].push_back(w);
      int i = static_cast<int>(idx.size()) - 1;
      auto limit = [&](int j) { return j <= T ? S - 1 : O - 1; };
      while (i >= 0 && idx[i] == limit(i)) idx[i--] = 0;
      if (i < 0) break;
      ++idx[i];
    }
  }
  return table;
}

// Direct nested-loop evaluation of the risk + ambiguity sum. Purposefully
// re-derives column means, entropies and divergences in place.
inline Vec brute_force_efe_classic(const GenerativeModel& m,
                                   const std::vector<std::vector<Vec>>& state_marginals, int t) {
  const int O = m.dims.num_obs;
  const int S = m.dims.num_states;
  Vec g = Vec::Zero(static_cast<int>(state_marginals.size()));
  // column means of the likelihood block
  Mat A(O, S);
  for (int j = 0; j < S; ++j) {
    double col_sum = 0.0;
    for (int i = 0; i < O; ++i) col_sum += m.a(i, j);
    for (int i = 0; i < O; ++i) A(i, j) = m.frozen_a ? m.a(i, j) : m.a(i, j) / col_sum;
  }
  for (std::size_t k = 0; k < state_marginals.size(); ++k) {
    const int T = static_cast<int>(state_marginals[k].size()) - 1;
    for (int tau = t + 1; tau <= T; ++tau) {
      const Vec& s = state_marginals[k][tau];
      // risk: KL between predicted outcomes and preferences
      for (int o = 0; o < O; ++o) {
        double q = 0.0;
        for (int j = 0; j < S; ++j) q += A(o, j) * s[j];
        if (q <= 0.0) continue;
        if (m.C[o] <= 0.0) {
          g[static_cast<int>(k)] = std::numeric_limits<double>::infinity();
          break;
        }
        g[static_cast<int>(k)] += q * (std::log(q) - std::log(m.C[o]));
      }
      if (std::isinf(g[static_cast<int>(k)])) break;
      // ambiguity: expected column entropy of the likelihood
      for (int j = 0; j < S; ++j) {
        double h = 0.0;
        for (int o = 0; o < O; ++o)
          if (A(o, j) > 0.0) h -= A(o, j) * std::log(A(o, j));
        g[static_cast<int>(k)] += s[j] * h;
      }
    }
  }
  return g;
}

// Direct evaluation of the expected-conditional-entropy sum of the
// factorised scheme.
inline Vec brute_force_efe_factorised(const GenerativeModel& m,
                                      const std::vector<Vec>& state_marginals) {
  const int S = m.dims.num_states;
  const int T = static_cast<int>(state_marginals.size()) - 1;
  Vec g = Vec::Zero(m.policies.size());
  for (int k = 0; k < m.policies.size(); ++k) {
    for (int tau = 1; tau <= T; ++tau) {
      const Mat& block = m.b[m.policies.action_at(k, tau - 1)];
      for (int j = 0; j < S; ++j) {
        double col_sum = 0.0;
        for (int i = 0; i < S; ++i) col_sum += block(i, j);
        double h = 0.0;
        for (int i = 0; i < S; ++i) {
          const double p = m.frozen_b ? block(i, j) : block(i, j) / col_sum;
          if (p > 0.0) h -= p * std::log(p);
        }
        g[k] += state_marginals[tau - 1][j] * h;
      }
    }
  }
  return g;
}

// ln sum_k w_k exp(log_evidence_k); evidence is conditional on the policy, so
// any prior weight vector mixes linearly.
inline double mixture_evidence(const Vec& weights, const Vec& log_evidence) {
  if (weights.size() != log_evidence.size())
    throw std::invalid_argument("mixture_evidence: dimension mismatch");
  double mx = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < weights.size(); ++k)
    if (weights[k] > 0.0) mx = std::max(mx, log_evidence[k]);
  if (mx == -std::numeric_limits<double>::infinity())
    return -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < weights.size(); ++k)
    if (weights[k] > 0.0 && std::isfinite(log_evidence[k]))
      acc += weights[k] * std::exp(log_evidence[k] - mx);
  return mx + std::log(acc);
}

// Evidence of the structured model with a free precision: the policy prior
// softmax(-gamma G) is integrated against the exponential prior with rate
// beta. Fixed-grid Simpson on [0, 60/beta]; the integrand is smooth and
// bounded so the truncation and discretisation errors are far below 1e-12.
inline double gamma_mixture_evidence(double beta, const Vec& G, const Vec& log_evidence,
                                     int intervals = 16384) {
  const double upper = 60.0 / beta;
  const double h = upper / intervals;
  auto integrand = [&](double gamma) {
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < G.size(); ++k) mx = std::max(mx, -gamma * G[k]);
    double z = 0.0;
    for (Eigen::Index k = 0; k < G.size(); ++k) z += std::exp(-gamma * G[k] - mx);
    double mixed = 0.0;
    for (Eigen::Index k = 0; k < G.size(); ++k)
      if (std::isfinite(log_evidence[k]))
        mixed += std::exp(-gamma * G[k] - mx) / z * std::exp(log_evidence[k]);
    return beta * std::exp(-beta * gamma) * mixed;
  };
  double acc = integrand(0.0) + integrand(upper);
  for (int i = 1; i < intervals; ++i) acc += (i % 2 ? 4.0 : 2.0) * integrand(i * h);
  return std::log(acc * h / 3.0);
}

}  // namespace actinf::oracle
