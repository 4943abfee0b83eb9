// Simulated environments, deterministic given a seed: the food problem and
// the k-armed bandit.
#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "actinf/model.hpp"

namespace actinf {

// mt19937_64 with a hand-rolled uniform draw so sampled trajectories are
// bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  int categorical(const Vec& p) {
    const double u = uniform01();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      acc += p[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(p.size()) - 1;
  }

 private:
  std::mt19937_64 eng_;
};

enum class EnvKind { Food, Bandit };

struct EnvSpec {
  EnvKind kind = EnvKind::Food;
  // food problem: true dynamics, all column-stochastic
  std::vector<Mat> transitions;  // per action, |S| x |S|
  Mat emissions;                 // |O| x |S|
  Vec initial;                   // |S|
  // bandit: reward probability per arm
  Vec arms;
  std::uint64_t seed = 0;
};

// Default food problem: states {full, empty}, observations {fed, hungry},
// actions {eat, sleep}. The published account gives no numeric dynamics, so
// these defaults are artifact parameters and fully configurable.
inline EnvSpec default_food_spec(std::uint64_t seed = 0) {
  EnvSpec spec;
  spec.kind = EnvKind::Food;
  spec.transitions.resize(2);
  spec.transitions[0] = (Mat(2, 2) << 0.9, 0.9, 0.1, 0.1).finished();  // eat
  spec.transitions[1] = (Mat(2, 2) << 0.3, 0.1, 0.7, 0.9).finished();  // sleep
  spec.emissions = (Mat(2, 2) << 0.9, 0.1, 0.1, 0.9).finished();
  spec.initial = (Vec(2) << 0.8, 0.2).finished();
  spec.seed = seed;
  return spec;
}

inline std::vector<std::string> validate(const EnvSpec& spec) {
  std::vector<std::string> v;
  if (spec.kind == EnvKind::Food) {
    if (spec.initial.size() == 0) v.push_back("env.initial: missing");
    if (spec.transitions.empty()) v.push_back("env.transitions: missing");
    if (spec.emissions.size() == 0) v.push_back("env.emissions: missing");
    if (!v.empty()) return v;
    const auto S = spec.initial.size();
    if (std::abs(spec.initial.sum() - 1.0) > 1e-9 || spec.initial.minCoeff() < 0.0)
      v.push_back("env.initial: not a probability vector");
    for (std::size_t u = 0; u < spec.transitions.size(); ++u)
      if (spec.transitions[u].rows() != S || spec.transitions[u].cols() != S ||
          !detail::column_stochastic(spec.transitions[u]))
        v.push_back("env.transitions[" + std::to_string(u) + "]: not column-stochastic " +
                    std::to_string(S) + "x" + std::to_string(S));
    if (spec.emissions.cols() != S || !detail::column_stochastic(spec.emissions))
      v.push_back("env.emissions: not column-stochastic with " + std::to_string(S) + " columns");
  } else {
    if (spec.arms.size() == 0) v.push_back("env.arms: missing");
    for (Eigen::Index i = 0; i < spec.arms.size(); ++i)
      if (!(spec.arms[i] >= 0.0 && spec.arms[i] <= 1.0))
        v.push_back("env.arms[" + std::to_string(i) + "]: probability outside [0,1]");
  }
  return v;
}

// One environment per run. reset() draws the initial hidden state and returns
// the first observation for the food problem; the bandit is stateless and
// returns no initial observation.
class Environment {
 public:
  explicit Environment(EnvSpec spec) : spec_(std::move(spec)), rng_(spec_.seed) {}

  std::optional<int> reset() {
    rng_ = Rng(spec_.seed);
    if (spec_.kind == EnvKind::Bandit) return std::nullopt;
    state_ = rng_.categorical(spec_.initial);
    return emit();
  }

  // Food: advance the hidden state by the chosen action's true transition
  // column and emit. Bandit: observation 0 is a reward, 1 a blank.
  int step(int action) {
    if (spec_.kind == EnvKind::Bandit) {
      if (action < 0 || action >= spec_.arms.size())
        throw std::out_of_range("Environment::step: bad arm index");
      return rng_.uniform01() < spec_.arms[action] ? 0 : 1;
    }
    if (action < 0 || action >= static_cast<int>(spec_.transitions.size()))
      throw std::out_of_range("Environment::step: bad action index");
    state_ = rng_.categorical(Vec(spec_.transitions[action].col(state_)));
    return emit();
  }

  int num_obs() const {
    return spec_.kind == EnvKind::Bandit ? 2 : static_cast<int>(spec_.emissions.rows());
  }
  const EnvSpec& spec() const { return spec_; }

 private:
  int emit() { return rng_.categorical(Vec(spec_.emissions.col(state_))); }

  EnvSpec spec_;
  Rng rng_;
  int state_ = 0;
};

}  // namespace actinf
