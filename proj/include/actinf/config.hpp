// Experiment configuration: one JSON document with model, env, agent and run
// sections. Matrices are row-major nested lists.
#pragma once

#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "actinf/agent.hpp"

namespace actinf {

using Json = nlohmann::ordered_json;

struct ExperimentConfig {
  GenerativeModel model;
  EnvSpec env;
  AgentConfig agent;
  int trials = 1;
  std::string output = "out";
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), violations(std::move(errors)) {}
  std::vector<std::string> violations;

  static std::string join(const std::vector<std::string>& errors) {
    std::string s = "config invalid:";
    for (const auto& e : errors) s += "\n  - " + e;
    return s;
  }
};

namespace detail {

inline Mat parse_matrix(const Json& rows, const std::string& name) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_array())
    throw ConfigError({name + ": expected a nested list of rows"});
  Mat m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError({name + ": ragged rows"});
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

inline Vec parse_vector(const Json& list, const std::string& name) {
  if (!list.is_array() || list.empty()) throw ConfigError({name + ": expected a list"});
  Vec v(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) v[i] = list[i].get<double>();
  return v;
}

inline Json matrix_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline Json vector_json(const Vec& v) {
  Json list = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) list.push_back(v[i]);
  return list;
}

}  // namespace detail

inline GenerativeModel model_from_json(const Json& j) {
  GenerativeModel m;
  m.dims.num_states = j.at("num_states").get<int>();
  m.dims.num_obs = j.at("num_obs").get<int>();
  m.dims.num_actions = j.at("num_actions").get<int>();
  m.dims.horizon = j.at("horizon").get<int>();
  m.a = detail::parse_matrix(j.at("a"), "model.a");
  if (!j.at("b").is_array()) throw ConfigError({"model.b: expected a list of matrices"});
  for (std::size_t u = 0; u < j.at("b").size(); ++u)
    m.b.push_back(detail::parse_matrix(j.at("b")[u], "model.b[" + std::to_string(u) + "]"));
  m.d = detail::parse_vector(j.at("d"), "model.d");
  m.C = detail::parse_vector(j.at("C"), "model.C");
  const Json& pol = j.at("policies");
  if (pol.is_object() && pol.contains("enumerate"))
    m.policies = enumerate_policies(m.dims.num_actions, pol.at("enumerate").get<int>());
  else if (pol.is_array())
    for (const auto& seq : pol) m.policies.seqs.push_back(seq.get<std::vector<int>>());
  else
    throw ConfigError({"model.policies: expected {\"enumerate\": depth} or an explicit list"});
  m.beta = j.value("beta", 1.0);
  m.c_const = j.value("c_const", 10.0);
  if (j.contains("frozen")) {
    m.frozen_a = j.at("frozen").value("a", false);
    m.frozen_b = j.at("frozen").value("b", false);
    m.frozen_d = j.at("frozen").value("d", false);
  }
  return m;
}

inline Json model_to_json(const GenerativeModel& m) {
  Json j;
  j["num_states"] = m.dims.num_states;
  j["num_obs"] = m.dims.num_obs;
  j["num_actions"] = m.dims.num_actions;
  j["horizon"] = m.dims.horizon;
  j["a"] = detail::matrix_json(m.a);
  Json blocks = Json::array();
  for (const Mat& block : m.b) blocks.push_back(detail::matrix_json(block));
  j["b"] = blocks;
  j["d"] = detail::vector_json(m.d);
  j["C"] = detail::vector_json(m.C);
  Json pol = Json::array();
  for (const auto& seq : m.policies.seqs) pol.push_back(seq);
  j["policies"] = pol;
  j["beta"] = m.beta;
  j["c_const"] = m.c_const;
  j["frozen"] = Json{{"a", m.frozen_a}, {"b", m.frozen_b}, {"d", m.frozen_d}};
  return j;
}

inline EnvSpec env_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "bandit") {
    EnvSpec spec;
    spec.kind = EnvKind::Bandit;
    spec.arms = detail::parse_vector(j.at("arms"), "env.arms");
    return spec;
  }
  if (kind != "food") throw ConfigError({"env.kind: expected \"food\" or \"bandit\""});
  EnvSpec spec = default_food_spec();
  if (j.contains("transitions")) {
    spec.transitions.clear();
    for (std::size_t u = 0; u < j.at("transitions").size(); ++u)
      spec.transitions.push_back(detail::parse_matrix(j.at("transitions")[u],
                                                      "env.transitions[" + std::to_string(u) + "]"));
  }
  if (j.contains("emissions")) spec.emissions = detail::parse_matrix(j.at("emissions"), "env.emissions");
  if (j.contains("initial")) spec.initial = detail::parse_vector(j.at("initial"), "env.initial");
  return spec;
}

inline Json env_to_json(const EnvSpec& spec) {
  Json j;
  if (spec.kind == EnvKind::Bandit) {
    j["kind"] = "bandit";
    j["arms"] = detail::vector_json(spec.arms);
    return j;
  }
  j["kind"] = "food";
  Json blocks = Json::array();
  for (const Mat& block : spec.transitions) blocks.push_back(detail::matrix_json(block));
  j["transitions"] = blocks;
  j["emissions"] = detail::matrix_json(spec.emissions);
  j["initial"] = detail::vector_json(spec.initial);
  return j;
}

inline AgentConfig agent_from_json(const Json& j) {
  AgentConfig cfg;
  const std::string engine = j.at("engine").get<std::string>();
  if (engine == "structured") cfg.engine = EngineKind::Structured;
  else if (engine == "vmp") cfg.engine = EngineKind::Vmp;
  else if (engine == "bandit") cfg.engine = EngineKind::Bandit;
  else throw ConfigError({"agent.engine: expected structured|vmp|bandit"});
  cfg.sweeps = j.value("sweeps", 8);
  const std::string strategy = j.value("strategy", "vote");
  if (strategy == "vote") cfg.strategy = ActionStrategy::Vote;
  else if (strategy == "sample-policy") cfg.strategy = ActionStrategy::SamplePolicy;
  else throw ConfigError({"agent.strategy: expected vote|sample-policy"});
  cfg.gamma_fixed = j.value("gamma_fixed", false);
  cfg.seed = j.value("seed", std::uint64_t{0});
  return cfg;
}

inline Json agent_to_json(const AgentConfig& cfg) {
  Json j;
  j["engine"] = cfg.engine == EngineKind::Structured ? "structured"
               : cfg.engine == EngineKind::Vmp       ? "vmp"
                                                     : "bandit";
  j["sweeps"] = cfg.sweeps;
  j["strategy"] = cfg.strategy == ActionStrategy::Vote ? "vote" : "sample-policy";
  j["gamma_fixed"] = cfg.gamma_fixed;
  j["seed"] = cfg.seed;
  return j;
}

inline ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig cfg;
  cfg.model = model_from_json(j.at("model"));
  cfg.env = env_from_json(j.at("env"));
  cfg.agent = agent_from_json(j.at("agent"));
  if (j.contains("run")) {
    cfg.trials = j.at("run").value("trials", 1);
    cfg.output = j.at("run").value("output", "out");
  }
  std::vector<std::string> violations = validate(cfg.model);
  for (auto& e : validate(cfg.env)) violations.push_back(e);
  for (auto& e : validate(cfg.agent)) violations.push_back(e);
  if (cfg.trials < 1) violations.push_back("run.trials: must be >= 1");
  // the agent's observations must index into the model's outcome space
  if (cfg.agent.engine == EngineKind::Bandit) {
    if (cfg.env.kind != EnvKind::Bandit)
      violations.push_back("agent.engine: bandit requires env.kind \"bandit\"");
  } else {
    if (cfg.env.kind != EnvKind::Food)
      violations.push_back("agent.engine: " + std::string("structured/vmp requires env.kind \"food\""));
    else if (violations.empty() && cfg.env.emissions.rows() != cfg.model.dims.num_obs)
      violations.push_back("env.emissions: produces " + std::to_string(cfg.env.emissions.rows()) +
                           " outcomes but model.num_obs is " +
                           std::to_string(cfg.model.dims.num_obs));
  }
  if (!violations.empty()) throw ConfigError(violations);
  return cfg;
}

inline Json config_to_json(const ExperimentConfig& cfg) {
  Json j;
  j["model"] = model_to_json(cfg.model);
  j["env"] = env_to_json(cfg.env);
  j["agent"] = agent_to_json(cfg.agent);
  j["run"] = Json{{"trials", cfg.trials}, {"output", cfg.output}};
  return j;
}

// Parses and validates; parse errors carry the json library's line context,
// validation failures list every violated invariant.
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file: " + path});
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({std::string("parse error: ") + e.what()});
  }
  try {
    return config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError({std::string("schema error: ") + e.what()});
  }
}

}  // namespace actinf
