// The action-perception cycle wrapping either engine, the two action
// selection strategies, and the minimal exact-Bayes bandit agent.
#pragma once

#include <optional>

#include "actinf/env.hpp"
#include "actinf/structured.hpp"
#include "actinf/vmp.hpp"

namespace actinf {

enum class EngineKind { Structured, Vmp, Bandit };
enum class ActionStrategy { Vote, SamplePolicy };

struct AgentConfig {
  EngineKind engine = EngineKind::Structured;
  int sweeps = 8;
  ActionStrategy strategy = ActionStrategy::Vote;
  bool gamma_fixed = false;
  std::uint64_t seed = 0;
};

inline std::vector<std::string> validate(const AgentConfig& cfg) {
  std::vector<std::string> v;
  if (cfg.sweeps < 1) v.push_back("agent.sweeps: must be >= 1");
  return v;
}

// One record per environment step. action is -1 on the final cycle of an
// engine agent, where the horizon is exhausted before acting.
struct CycleRecord {
  int trial = 0;
  int t = 0;
  double free_energy = 0.0;
  Vec efe;
  Vec policy_posterior;
  int action = -1;
  int observation = -1;
};

struct TrialLog {
  std::vector<CycleRecord> records;
};

// Summed posterior evidence per action at time t; ties go to the lowest
// action index so repeated runs stay log-stable.
inline int select_action_vote(const Vec& policy_posterior, const PolicySet& policies, int t) {
  int num_actions = 0;
  for (const auto& seq : policies.seqs) num_actions = std::max(num_actions, seq[t] + 1);
  Vec votes = Vec::Zero(num_actions);
  for (int k = 0; k < policies.size(); ++k) votes[policies.action_at(k, t)] += policy_posterior[k];
  int best = 0;
  for (int u = 1; u < num_actions; ++u)
    if (votes[u] > votes[best]) best = u;
  return best;
}

// Samples one policy index from the posterior and commits to its remaining
// actions from time t onward.
inline std::vector<int> select_action_sample_policy(const Vec& policy_posterior,
                                                    const PolicySet& policies, int t, Rng& rng) {
  const int k = rng.categorical(policy_posterior);
  const auto& seq = policies.seqs[k];
  return std::vector<int>(seq.begin() + t, seq.end());
}

// Exact Bayes step of the smallest agent: posterior over arms proportional to
// the observed outcome's likelihood row times the prior.
inline Vec bandit_bayes_update(const Vec& prior, const Vec& likelihood_row) {
  if (prior.size() != likelihood_row.size())
    throw std::invalid_argument("bandit_bayes_update: dimension mismatch");
  Vec post = prior.cwiseProduct(likelihood_row);
  const double z = post.sum();
  if (!(z > 0.0)) throw std::runtime_error("bandit_bayes_update: zero normaliser");
  return post / z;
}

// Owns one agent-environment pairing and exposes the cycle as a single step:
// observe, infer, evaluate policies, act. The generative model priors are
// never mutated; learning lives in the per-call parameter posteriors.
class AgentSession {
 public:
  AgentSession(const GenerativeModel& model, const EnvSpec& env_spec, const AgentConfig& cfg,
               int trial_index = 0)
      : model_(model), cfg_(cfg), env_(env_spec), rng_(cfg.seed), trial_(trial_index) {
    if (cfg_.engine == EngineKind::Bandit) {
      arm_posterior_ = Vec::Constant(env_spec.arms.size(), 1.0 / env_spec.arms.size());
      // reward row 0 is the arm's success probability, row 1 the complement
      bandit_likelihood_ = Mat(2, env_spec.arms.size());
      bandit_likelihood_.row(0) = env_spec.arms.transpose();
      bandit_likelihood_.row(1) = (Vec::Ones(env_spec.arms.size()) - env_spec.arms).transpose();
      env_.reset();
    } else {
      auto first = env_.reset();
      observations_.emplace_back(*first, env_.num_obs());
    }
  }

  int time() const { return static_cast<int>(observations_.size()) - 1; }
  bool done() const {
    return cfg_.engine == EngineKind::Bandit ? time_bandit_ > model_.dims.horizon : finished_;
  }
  const Vec& arm_posterior() const { return arm_posterior_; }

  CycleRecord run_cycle() {
    if (done()) throw std::runtime_error("run_cycle: horizon exhausted");
    return cfg_.engine == EngineKind::Bandit ? bandit_cycle() : engine_cycle();
  }

  TrialLog run_trial() {
    TrialLog log;
    while (!done()) log.records.push_back(run_cycle());
    return log;
  }

 private:
  CycleRecord engine_cycle() {
    const int t = time();
    CycleRecord rec;
    rec.trial = trial_;
    rec.t = t;
    rec.observation = observations_.back().index;

    if (cfg_.engine == EngineKind::Structured) {
      auto post = infer_structured(model_, observations_, cfg_.sweeps, cfg_.gamma_fixed);
      rec.free_energy = post.free_energy_trace.empty() ? 0.0 : post.free_energy_trace.back();
      rec.efe = post.efe;
      rec.policy_posterior = post.policy_posterior;
    } else {
      auto post = infer_vmp(model_, observations_, cfg_.sweeps);
      rec.free_energy = post.free_energy_trace.empty() ? 0.0 : post.free_energy_trace.back();
      rec.efe = post.efe;
      rec.policy_posterior = post.policy_posterior;
    }

    if (t < model_.dims.horizon) {
      rec.action = cfg_.strategy == ActionStrategy::Vote
                       ? select_action_vote(rec.policy_posterior, model_.policies, t)
                       : select_action_sample_policy(rec.policy_posterior, model_.policies, t,
                                                     rng_)[0];
      observations_.emplace_back(env_.step(rec.action), env_.num_obs());
    } else {
      finished_ = true;
    }
    return rec;
  }

  // Minimal exact-Bayes cycle: the posterior over actions is conditioned on
  // the rewarding outcome (which action would make the reward likely) and
  // reused as the empirical prior for the next pull. The pulled arm's actual
  // outcome is recorded in the log.
  CycleRecord bandit_cycle() {
    CycleRecord rec;
    rec.trial = trial_;
    rec.t = time_bandit_;
    rec.action = cfg_.strategy == ActionStrategy::Vote
                     ? argmax(arm_posterior_)
                     : rng_.categorical(arm_posterior_);
    rec.observation = env_.step(rec.action);
    arm_posterior_ = bandit_bayes_update(arm_posterior_, Vec(bandit_likelihood_.row(0)));
    rec.policy_posterior = arm_posterior_;
    ++time_bandit_;
    return rec;
  }

  static int argmax(const Vec& v) {
    int best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
      if (v[i] > v[best]) best = static_cast<int>(i);
    return best;
  }

  GenerativeModel model_;
  AgentConfig cfg_;
  Environment env_;
  Rng rng_;
  int trial_ = 0;
  bool finished_ = false;
  std::vector<OneHot> observations_;
  int time_bandit_ = 0;
  Vec arm_posterior_;
  Mat bandit_likelihood_;
};

}  // namespace actinf
