// Experiment execution: runs trials, writes the per-cycle JSONL log and the
// per-trial summary table, deterministically for a given seed.
#pragma once

#include <cstdio>
#include <filesystem>

#include "actinf/config.hpp"

namespace actinf {

namespace detail {

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Write-then-rename so readers never observe a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

inline Json record_json(const CycleRecord& rec) {
  Json j;
  j["trial"] = rec.trial;
  j["t"] = rec.t;
  j["F"] = rec.free_energy;
  j["G"] = vector_json(rec.efe);
  j["policy_posterior"] = vector_json(rec.policy_posterior);
  if (rec.action >= 0) j["action"] = rec.action;
  else j["action"] = nullptr;
  j["observation"] = rec.observation;
  return j;
}

}  // namespace detail

struct RunResult {
  std::filesystem::path cycles_path;
  std::filesystem::path summary_path;
  int records = 0;
};

// Per-trial seeds derive from the configured seed plus the trial index; the
// agent's sampling stream is decorrelated from the environment's by a fixed
// xor so the two never share a draw sequence.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
  const int preferred_obs = [&] {
    if (cfg.agent.engine == EngineKind::Bandit) return 0;
    int best = 0;
    for (Eigen::Index i = 1; i < cfg.model.C.size(); ++i)
      if (cfg.model.C[i] > cfg.model.C[best]) best = static_cast<int>(i);
    return best;
  }();

  std::string cycles;
  std::string summary = "trial,final_F,preferred_count,final_argmax\n";
  int records = 0;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t trial_seed = cfg.agent.seed + static_cast<std::uint64_t>(trial);
    EnvSpec env = cfg.env;
    env.seed = trial_seed;
    AgentConfig agent = cfg.agent;
    agent.seed = trial_seed ^ 0x9e3779b97f4a7c15ULL;

    AgentSession session(cfg.model, env, agent, trial);
    TrialLog log = session.run_trial();

    int preferred_count = 0;
    for (const auto& rec : log.records) {
      cycles += detail::record_json(rec).dump();
      cycles += '\n';
      if (rec.observation == preferred_obs) ++preferred_count;
      ++records;
    }
    const auto& last = log.records.back();
    int final_argmax = 0;
    for (Eigen::Index i = 1; i < last.policy_posterior.size(); ++i)
      if (last.policy_posterior[i] > last.policy_posterior[final_argmax])
        final_argmax = static_cast<int>(i);
    summary += std::to_string(trial) + "," + detail::format_double(last.free_energy) + "," +
               std::to_string(preferred_count) + "," + std::to_string(final_argmax) + "\n";
  }

  std::filesystem::create_directories(cfg.output);
  RunResult result;
  result.cycles_path = std::filesystem::path(cfg.output) / "cycles.jsonl";
  result.summary_path = std::filesystem::path(cfg.output) / "summary.csv";
  result.records = records;
  detail::write_atomic(result.cycles_path, cycles);
  detail::write_atomic(result.summary_path, summary);
  return result;
}

}  // namespace actinf
