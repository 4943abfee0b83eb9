// The fully factorised variational message passing scheme: one categorical
// marginal per time step, a Dirichlet-distributed policy prior built from the
// expected free energy, and conjugate count messages for every parameter.
#pragma once

#include <vector>

#include "actinf/efe.hpp"
#include "actinf/model.hpp"

namespace actinf {

struct FactorisedPosterior {
  std::vector<Vec> state_marginals;  // one simplex point per tau = 0..T
  Vec policy_posterior;              // categorical over policies
  Vec policy_prior_counts;           // Dirichlet prior counts c - G over the policy weights
  Vec post_policy_counts;            // posterior Dirichlet counts over the policy weights
  Mat post_a;
  std::vector<Mat> post_b;
  Vec post_d;
  Vec efe;
  std::vector<double> free_energy_trace;
};

// Dirichlet policy-prior counts c - G. Every element must end up strictly
// positive, which requires c to exceed the largest expected free energy.
inline Vec theta_from_G(double c_const, const Vec& G) {
  for (Eigen::Index k = 0; k < G.size(); ++k)
    if (!(c_const > G[k]))
      throw std::invalid_argument("theta_from_G: c_const " + std::to_string(c_const) +
                                  " does not exceed expected free energy of policy " +
                                  std::to_string(k));
  return Vec::Constant(G.size(), c_const) - G;
}

// Conjugate count message from a single categorical child: entrywise count
// addition. Serves both the initial-state block and the policy-weight block.
inline Mat msg_update_counts(const Mat& prior, const Vec& child_marginal) {
  if (prior.rows() != child_marginal.size() || prior.cols() != 1)
    throw std::invalid_argument("msg_update_counts: dimension mismatch");
  return prior + Mat(child_marginal);
}
inline Vec msg_update_counts(const Vec& prior, const Vec& child_marginal) {
  if (prior.size() != child_marginal.size())
    throw std::invalid_argument("msg_update_counts: dimension mismatch");
  return prior + child_marginal;
}

// Likelihood-block message: one outer product per observed time step.
inline Mat msg_update_A(const Mat& prior, const std::vector<OneHot>& obs,
                        const std::vector<Vec>& state_marginals) {
  Mat out = prior;
  for (std::size_t tau = 0; tau < obs.size(); ++tau)
    out += obs[tau].vec() * state_marginals[tau].transpose();
  return out;
}

// Transition-block messages: each action block accumulates the policy-weighted
// outer products of successive marginals over the (policy, tau) pairs whose
// policy predicts that action at tau - 1.
inline std::vector<Mat> msg_update_B(const std::vector<Mat>& prior,
                                     const std::vector<Vec>& state_marginals,
                                     const Vec& policy_posterior, const PolicySet& policies) {
  std::vector<Mat> out = prior;
  const int T = static_cast<int>(state_marginals.size()) - 1;
  for (int k = 0; k < policies.size(); ++k)
    for (int tau = 1; tau <= T; ++tau)
      out[policies.action_at(k, tau - 1)] +=
          policy_posterior[k] * state_marginals[tau] * state_marginals[tau - 1].transpose();
  return out;
}

// Policy message: softmax of the parent message alpha_bar plus, per time
// step, the Frobenius product of the successive-marginal outer product with
// each policy's expected log transition block.
inline ProbVector msg_update_pi(const Vec& alpha_bar, const std::vector<Mat>& elog_transition,
                                const PolicySet& policies,
                                const std::vector<Vec>& state_marginals) {
  const int T = static_cast<int>(state_marginals.size()) - 1;
  Vec mu = alpha_bar;
  for (int k = 0; k < policies.size(); ++k)
    for (int tau = 1; tau <= T; ++tau)
      mu[k] += state_marginals[tau].dot(elog_transition[policies.action_at(k, tau - 1)] *
                                        state_marginals[tau - 1]);
  return softmax(mu);
}

namespace detail {

struct FactorisedLogs {
  Mat likelihood;
  std::vector<Mat> transition;
  Vec initial;
};

inline FactorisedLogs make_factorised_logs(const GenerativeModel& m, const Mat& post_a,
                                           const std::vector<Mat>& post_b, const Vec& post_d) {
  FactorisedLogs logs;
  logs.likelihood = expected_logs(post_a, m.frozen_a);
  logs.transition.reserve(post_b.size());
  for (const Mat& block : post_b) logs.transition.push_back(expected_logs(block, m.frozen_b));
  logs.initial = expected_logs(Mat(post_d), m.frozen_d).col(0);
  return logs;
}

inline Vec alpha_bar_of(const Vec& post_policy_counts) {
  return expected_log_dirichlet(Mat(post_policy_counts)).col(0);
}

// Message sum for one marginal: prior or policy-averaged past transition,
// the likelihood when observed, and the policy-averaged transposed future.
inline Vec factorised_state_messages(const FactorisedLogs& logs, const PolicySet& policies,
                                     const std::vector<Vec>& marginals, const Vec& policy_posterior,
                                     const std::vector<OneHot>& obs, int tau) {
  const int T = static_cast<int>(marginals.size()) - 1;
  const int t = static_cast<int>(obs.size()) - 1;
  Vec mu = Vec::Zero(marginals[tau].size());
  if (tau == 0) {
    mu = logs.initial;
  } else {
    for (int k = 0; k < policies.size(); ++k)
      mu += policy_posterior[k] *
            (logs.transition[policies.action_at(k, tau - 1)] * marginals[tau - 1]);
  }
  if (tau <= t) mu += logs.likelihood.transpose() * obs[tau].vec();
  if (tau < T)
    for (int k = 0; k < policies.size(); ++k)
      mu += policy_posterior[k] *
            (logs.transition[policies.action_at(k, tau)].transpose() * marginals[tau + 1]);
  return mu;
}

}  // namespace detail

inline ProbVector msg_update_S(const FactorisedPosterior& post, const GenerativeModel& m,
                               const std::vector<OneHot>& obs, int tau) {
  auto logs = detail::make_factorised_logs(m, post.post_a, post.post_b, post.post_d);
  return softmax(detail::factorised_state_messages(logs, m.policies, post.state_marginals,
                                                   post.policy_posterior, obs, tau));
}

// E_Q[ln Q - ln P] under the fully factorised posterior; every term is in
// closed form because the policy prior is conjugate here.
inline double factorised_free_energy(const FactorisedPosterior& post, const GenerativeModel& m,
                                     const std::vector<OneHot>& obs) {
  auto logs = detail::make_factorised_logs(m, post.post_a, post.post_b, post.post_d);
  const int T = m.dims.horizon;
  const int t = static_cast<int>(obs.size()) - 1;
  const auto& s = post.state_marginals;
  const Vec& alpha = post.policy_posterior;

  double F = 0.0;
  for (int tau = 0; tau <= T; ++tau)
    for (Eigen::Index i = 0; i < s[tau].size(); ++i)
      F += s[tau][i] * log_clamped(s[tau][i]);
  F -= s[0].dot(logs.initial);
  for (int tau = 1; tau <= T; ++tau)
    for (int k = 0; k < m.policies.size(); ++k)
      F -= alpha[k] *
           s[tau].dot(logs.transition[m.policies.action_at(k, tau - 1)] * s[tau - 1]);
  for (int tau = 0; tau <= std::min(t, T); ++tau)
    F -= obs[tau].vec().dot(logs.likelihood * s[tau]);

  const Vec alpha_bar = detail::alpha_bar_of(post.post_policy_counts);
  for (Eigen::Index k = 0; k < alpha.size(); ++k)
    if (alpha[k] > 0.0) F += alpha[k] * std::log(alpha[k]);
  F -= alpha.dot(alpha_bar);
  F += dirichlet_kl(post.post_policy_counts, post.policy_prior_counts);

  if (!m.frozen_d) F += dirichlet_kl(Vec(post.post_d), m.d);
  if (!m.frozen_a) F += dirichlet_kl(post.post_a, m.a);
  if (!m.frozen_b)
    for (std::size_t u = 0; u < m.b.size(); ++u) F += dirichlet_kl(post.post_b[u], m.b[u]);
  return F;
}

// Message-passing inference with the same sweep discipline as the structured
// engine: forward/backward state passes, policy and policy-weight messages,
// then parameter messages. The expected free energy and the policy-prior
// counts derived from it are pinned after the first state pass of each call,
// matching their empirical-prior role of being re-evaluated per observation.
inline FactorisedPosterior infer_vmp(const GenerativeModel& m, const std::vector<OneHot>& obs,
                                     int sweeps) {
  const int T = m.dims.horizon;
  const int t = static_cast<int>(obs.size()) - 1;
  if (t > T) throw std::invalid_argument("infer_vmp: more observations than time steps");

  FactorisedPosterior post;
  post.state_marginals.assign(T + 1, Vec::Constant(m.dims.num_states, 1.0 / m.dims.num_states));
  post.policy_posterior = Vec::Constant(m.policies.size(), 1.0 / m.policies.size());
  post.efe = Vec::Zero(m.policies.size());
  post.policy_prior_counts = theta_from_G(m.c_const, post.efe);
  post.post_policy_counts = post.policy_prior_counts;
  post.post_a = m.a;
  post.post_b = m.b;
  post.post_d = m.d;

  auto logs = detail::make_factorised_logs(m, post.post_a, post.post_b, post.post_d);
  for (int sweep = 1; sweep <= sweeps; ++sweep) {
    auto& s = post.state_marginals;
    for (int tau = 0; tau <= T; ++tau)
      s[tau] = softmax(detail::factorised_state_messages(logs, m.policies, s,
                                                         post.policy_posterior, obs, tau)).vec();
    for (int tau = T; tau >= 0; --tau)
      s[tau] = softmax(detail::factorised_state_messages(logs, m.policies, s,
                                                         post.policy_posterior, obs, tau)).vec();

    if (sweep == 1) {
      std::vector<Mat> means;
      means.reserve(post.post_b.size());
      for (const Mat& block : post.post_b) means.push_back(expected_params(block, m.frozen_b));
      post.efe = efe_factorised(means, m.policies, s);
      post.policy_prior_counts = theta_from_G(m.c_const, post.efe);
      post.post_policy_counts = post.policy_prior_counts;
    }

    post.policy_posterior = msg_update_pi(detail::alpha_bar_of(post.post_policy_counts),
                                          logs.transition, m.policies, s).vec();
    post.post_policy_counts = msg_update_counts(post.policy_prior_counts, post.policy_posterior);

    if (!m.frozen_d) post.post_d = msg_update_counts(m.d, s[0]);
    if (!m.frozen_a) post.post_a = msg_update_A(m.a, obs, s);
    if (!m.frozen_b) post.post_b = msg_update_B(m.b, s, post.policy_posterior, m.policies);
    logs = detail::make_factorised_logs(m, post.post_a, post.post_b, post.post_d);

    post.free_energy_trace.push_back(factorised_free_energy(post, m, obs));
  }
  return post;
}

}  // namespace actinf
