// The structured variational scheme: per-policy state chains Q(S_tau|pi),
// a categorical policy posterior coupled to a gamma-distributed precision,
// and Dirichlet parameter posteriors, iterated by coordinate updates.
#pragma once

#include <vector>

#include "actinf/efe.hpp"
#include "actinf/model.hpp"

namespace actinf {

struct StructuredPosterior {
  std::vector<std::vector<Vec>> states;  // states[policy][tau], each a simplex point
  Vec policy_posterior;                  // categorical over policies
  double precision_rate = 1.0;           // rate of the gamma posterior over precision
  double precision = 1.0;                // expected precision (1/rate, or 1 when fixed)
  bool gamma_fixed = false;
  Mat post_a;
  std::vector<Mat> post_b;
  Vec post_d;
  Vec efe;  // the expected free energy pinned into the policy prior
  std::vector<double> free_energy_trace;
};

enum class ParamKind { InitialState, Likelihood, Transition };

namespace detail {

struct ExpectedLogs {
  Mat likelihood;               // expected log likelihood block
  std::vector<Mat> transition;  // per action
  Vec initial;
};

inline ExpectedLogs make_expected_logs(const GenerativeModel& m, const Mat& post_a,
                                       const std::vector<Mat>& post_b, const Vec& post_d) {
  ExpectedLogs logs;
  logs.likelihood = expected_logs(post_a, m.frozen_a);
  logs.transition.reserve(post_b.size());
  for (const Mat& block : post_b) logs.transition.push_back(expected_logs(block, m.frozen_b));
  logs.initial = expected_logs(Mat(post_d), m.frozen_d).col(0);
  return logs;
}

// Per-policy message sum for one time step: past-or-prior, likelihood when an
// observation exists, and the future term unless tau is the horizon.
inline Vec state_messages(const ExpectedLogs& logs, const PolicySet& policies,
                          const std::vector<Vec>& chain, const std::vector<OneHot>& obs,
                          int tau, int policy) {
  const int T = static_cast<int>(chain.size()) - 1;
  const int t = static_cast<int>(obs.size()) - 1;
  Vec mu = tau == 0 ? logs.initial
                    : Vec(logs.transition[policies.action_at(policy, tau - 1)] * chain[tau - 1]);
  if (tau <= t) mu += logs.likelihood.transpose() * obs[tau].vec();
  if (tau < T) mu += logs.transition[policies.action_at(policy, tau)].transpose() * chain[tau + 1];
  return mu;
}

// Dot product that treats zero-weight entries as absent, so +inf expected
// free energies of unreachable policies do not poison the sum.
inline double guarded_dot(const Vec& w, const Vec& x) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w[i] != 0.0) acc += w[i] * x[i];
  return acc;
}

// ln sum_k exp(-gamma G_k), skipping infinite entries.
inline double log_partition(double gamma, const Vec& G) {
  double mx = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < G.size(); ++k)
    if (std::isfinite(G[k])) mx = std::max(mx, -gamma * G[k]);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < G.size(); ++k)
    if (std::isfinite(G[k])) acc += std::exp(-gamma * G[k] - mx);
  return mx + std::log(acc);
}

// E[ln Z(gamma)] under the exponential posterior with the given rate.
// The linear part -gamma G_min integrates analytically; the bounded smooth
// remainder is handled by fixed-grid Simpson.
inline double expected_log_partition(double rate, const Vec& G, int intervals = 32768) {
  double g_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < G.size(); ++k) g_min = std::min(g_min, G[k]);
  auto remainder = [&](double gamma) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < G.size(); ++k)
      if (std::isfinite(G[k])) acc += std::exp(-gamma * (G[k] - g_min));
    return std::log(acc);
  };
  const double upper = 60.0 / rate;
  const double h = upper / intervals;
  double integral = remainder(0.0) + std::exp(-60.0) * remainder(upper);
  for (int i = 1; i < intervals; ++i)
    integral += (i % 2 ? 4.0 : 2.0) * std::exp(-rate * i * h) * remainder(i * h);
  integral *= rate * h / 3.0;
  return -g_min / rate + integral;
}

}  // namespace detail

// Coordinate update of one state marginal: softmax over the applicable
// log-messages. tau = 0 reads the initial-state prior, tau = T drops the
// future term, tau > t drops the likelihood term.
inline ProbVector update_state_marginals(const StructuredPosterior& post,
                                         const GenerativeModel& m,
                                         const std::vector<OneHot>& obs, int tau, int policy) {
  auto logs = detail::make_expected_logs(m, post.post_a, post.post_b, post.post_d);
  return softmax(detail::state_messages(logs, m.policies, post.states[policy], obs, tau, policy));
}

// Closed-form count refresh of one parameter posterior from its prior and the
// current marginals. The expected state at tau is the policy-averaged
// marginal; transition counts are restricted to the (policy, tau) pairs whose
// policy predicts the block's action. Frozen parameters are left untouched.
inline void update_dirichlet_params(ParamKind kind, StructuredPosterior& post,
                                    const GenerativeModel& m, const std::vector<OneHot>& obs) {
  const int T = m.dims.horizon;
  const int t = static_cast<int>(obs.size()) - 1;
  auto averaged_state = [&](int tau) {
    Vec s = Vec::Zero(m.dims.num_states);
    for (int k = 0; k < m.policies.size(); ++k) s += post.policy_posterior[k] * post.states[k][tau];
    return s;
  };
  switch (kind) {
    case ParamKind::InitialState:
      if (!m.frozen_d) post.post_d = m.d + averaged_state(0);
      break;
    case ParamKind::Likelihood:
      if (!m.frozen_a) {
        post.post_a = m.a;
        for (int tau = 0; tau <= t; ++tau)
          post.post_a += obs[tau].vec() * averaged_state(tau).transpose();
      }
      break;
    case ParamKind::Transition:
      if (!m.frozen_b) {
        post.post_b = m.b;
        for (int k = 0; k < m.policies.size(); ++k)
          for (int tau = 1; tau <= T; ++tau)
            post.post_b[m.policies.action_at(k, tau - 1)] +=
                post.policy_posterior[k] * post.states[k][tau] * post.states[k][tau - 1].transpose();
      }
      break;
  }
}

// Per-policy accuracy/complexity score: the policy-conditioned part of the
// free energy. Element k is
//   s_0 . (ln s_0 - elog d) + sum_tau s_tau . (ln s_tau - elog B[u] s_{tau-1})
//   - sum_{tau<=t} o_tau . elog A s_tau.
inline Vec compute_F_pi(const StructuredPosterior& post, const GenerativeModel& m,
                        const std::vector<OneHot>& obs) {
  auto logs = detail::make_expected_logs(m, post.post_a, post.post_b, post.post_d);
  const int T = m.dims.horizon;
  const int t = static_cast<int>(obs.size()) - 1;
  Vec f = Vec::Zero(m.policies.size());
  for (int k = 0; k < m.policies.size(); ++k) {
    const auto& chain = post.states[k];
    auto self_minus = [&](const Vec& s, const Vec& ref) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < s.size(); ++i)
        acc += s[i] * (log_clamped(s[i]) - ref[i]);
      return acc;
    };
    f[k] += self_minus(chain[0], logs.initial);
    for (int tau = 1; tau <= T; ++tau)
      f[k] += self_minus(chain[tau],
                         Vec(logs.transition[m.policies.action_at(k, tau - 1)] * chain[tau - 1]));
    for (int tau = 0; tau <= std::min(t, T); ++tau)
      f[k] -= obs[tau].vec().dot(logs.likelihood * chain[tau]);
  }
  return f;
}

struct PrecisionPolicyUpdate {
  Vec policy_posterior;
  double precision_rate;
  double precision;
};

// Coupled precision/policy fixed point:
//   gamma <- 1/rate;  pi0 <- softmax(-gamma G);  pi <- softmax(-gamma G - F);
//   rate <- beta + G . (pi - pi0)
// iterated to a 1e-6 sup-norm tolerance or 16 rounds, with the rate floored
// at 1e-6. With the precision fixed at one this collapses to a single
// softmax(-(G + F)). Infinite G entries mark unreachable policies (zero
// weight); NaN entries are an error.
inline PrecisionPolicyUpdate update_gamma_and_pi(const Vec& G, const Vec& F_pi,
                                                 double beta_prior, double rate_init,
                                                 bool gamma_fixed = false) {
  bool any_finite = false;
  for (Eigen::Index k = 0; k < G.size(); ++k) {
    if (std::isnan(G[k])) throw std::invalid_argument("update_gamma_and_pi: NaN expected free energy");
    any_finite |= std::isfinite(G[k]);
  }
  if (!any_finite)
    throw std::invalid_argument(
        "update_gamma_and_pi: every policy has infinite expected free energy "
        "(preferences exclude all predicted outcomes)");
  if (gamma_fixed) {
    return {softmax(Vec(-(G + F_pi))).vec(), beta_prior, 1.0};
  }
  double rate = rate_init;
  Vec pi = Vec::Constant(G.size(), 1.0 / static_cast<double>(G.size()));
  for (int iter = 0; iter < 16; ++iter) {
    const double gamma = 1.0 / rate;
    const Vec pi0 = softmax(Vec(-gamma * G)).vec();
    const Vec pi_new = softmax(Vec(-gamma * G - F_pi)).vec();
    rate = std::max(beta_prior + detail::guarded_dot(Vec(pi_new - pi0), G), 1e-6);
    // compare successive iterates of the map; the uniform bootstrap value can
    // coincide with the first iterate before the rate has settled
    const double delta = (pi_new - pi).lpNorm<Eigen::Infinity>();
    pi = pi_new;
    if (iter > 0 && delta < 1e-6) break;
  }
  return {pi, rate, 1.0 / rate};
}

// Full variational free energy E_Q[ln Q - ln P], evaluated term by term over
// the model factorisation: policy-weighted state terms, the policy/precision
// block, and the Dirichlet complexity of every learned parameter.
inline double variational_free_energy(const StructuredPosterior& post, const GenerativeModel& m,
                                      const std::vector<OneHot>& obs) {
  const Vec f_pi = compute_F_pi(post, m, obs);
  const Vec& pi = post.policy_posterior;
  const Vec& G = post.efe;

  double F = detail::guarded_dot(pi, f_pi);
  // E[ln Q(pi)] - E[ln P(pi | gamma)]
  for (Eigen::Index k = 0; k < pi.size(); ++k)
    if (pi[k] > 0.0) F += pi[k] * std::log(pi[k]);
  if (post.gamma_fixed) {
    F += detail::guarded_dot(pi, G) + detail::log_partition(1.0, G);
  } else {
    const double gamma_mean = 1.0 / post.precision_rate;
    F += gamma_mean * detail::guarded_dot(pi, G);
    F += detail::expected_log_partition(post.precision_rate, G);
    // KL between the exponential posterior and prior over the precision
    F += std::log(post.precision_rate / m.beta) + m.beta / post.precision_rate - 1.0;
  }
  if (!m.frozen_d) F += dirichlet_kl(Vec(post.post_d), m.d);
  if (!m.frozen_a) F += dirichlet_kl(post.post_a, m.a);
  if (!m.frozen_b)
    for (std::size_t u = 0; u < m.b.size(); ++u) F += dirichlet_kl(post.post_b[u], m.b[u]);
  return F;
}

// Coordinate-update inference. Each sweep runs a forward then backward pass
// of state updates per policy, the precision/policy update, and the Dirichlet
// refreshes, recording the free energy at the end. The expected free energy
// entering the policy prior is evaluated once per call, after the first state
// pass, and held fixed so the remaining sweeps descend a single objective;
// the action-perception cycle re-evaluates it on every new observation.
inline StructuredPosterior infer_structured(const GenerativeModel& m,
                                            const std::vector<OneHot>& obs, int sweeps,
                                            bool gamma_fixed = false) {
  const int T = m.dims.horizon;
  const int t = static_cast<int>(obs.size()) - 1;
  if (t > T) throw std::invalid_argument("infer_structured: more observations than time steps");

  StructuredPosterior post;
  post.gamma_fixed = gamma_fixed;
  post.states.assign(m.policies.size(),
                     std::vector<Vec>(T + 1, Vec::Constant(m.dims.num_states,
                                                           1.0 / m.dims.num_states)));
  post.policy_posterior = Vec::Constant(m.policies.size(), 1.0 / m.policies.size());
  post.precision_rate = m.beta;
  post.precision = gamma_fixed ? 1.0 : 1.0 / m.beta;
  post.post_a = m.a;
  post.post_b = m.b;
  post.post_d = m.d;
  post.efe = Vec::Zero(m.policies.size());

  auto logs = detail::make_expected_logs(m, post.post_a, post.post_b, post.post_d);
  for (int sweep = 1; sweep <= sweeps; ++sweep) {
    for (int k = 0; k < m.policies.size(); ++k) {
      auto& chain = post.states[k];
      for (int tau = 0; tau <= T; ++tau)
        chain[tau] = softmax(detail::state_messages(logs, m.policies, chain, obs, tau, k)).vec();
      for (int tau = T; tau >= 0; --tau)
        chain[tau] = softmax(detail::state_messages(logs, m.policies, chain, obs, tau, k)).vec();
    }
    if (sweep == 1)
      post.efe = efe_classic(expected_params(post.post_a, m.frozen_a), m.C, post.states, t);

    const Vec f_pi = compute_F_pi(post, m, obs);
    auto upd = update_gamma_and_pi(post.efe, f_pi, m.beta, post.precision_rate, gamma_fixed);
    post.policy_posterior = upd.policy_posterior;
    post.precision_rate = upd.precision_rate;
    post.precision = upd.precision;

    update_dirichlet_params(ParamKind::InitialState, post, m, obs);
    update_dirichlet_params(ParamKind::Likelihood, post, m, obs);
    update_dirichlet_params(ParamKind::Transition, post, m, obs);
    logs = detail::make_expected_logs(m, post.post_a, post.post_b, post.post_d);

    post.free_energy_trace.push_back(variational_free_energy(post, m, obs));
  }
  return post;
}

}  // namespace actinf
