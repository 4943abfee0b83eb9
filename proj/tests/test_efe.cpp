#include <catch2/catch_amalgamated.hpp>

#include "support/test_models.hpp"

using namespace actinf;
using namespace testsupport;

TEST_CASE("predicted_outcomes") {
  const Vec s = (Vec(2) << 0.3, 0.7).finished();
  CHECK((predicted_outcomes(Mat::Identity(2, 2), s).vec() - s).lpNorm<Eigen::Infinity>() < 1e-15);

  const Mat uniform_cols = Mat::Constant(2, 2, 0.5);
  const Vec p = predicted_outcomes(uniform_cols, s).vec();
  CHECK(std::abs(p[0] - 0.5) < 1e-15);

  const Mat A = (Mat(2, 2) << 0.8, 0.3, 0.2, 0.7).finished();
  const Vec q = predicted_outcomes(A, (Vec(2) << 0.5, 0.5).finished()).vec();
  CHECK(std::abs(q[0] - 0.55) < 1e-15);
  CHECK(std::abs(q[1] - 0.45) < 1e-15);

  CHECK_THROWS_AS(predicted_outcomes(A, Vec(Vec::Constant(3, 1.0 / 3.0))), std::invalid_argument);
}

TEST_CASE("efe_classic zero cases") {
  // predicted outcomes equal to the preferences for every tau: ambiguity only
  const Vec C = (Vec(2) << 0.6, 0.4).finished();
  Mat A(2, 2);
  A.col(0) = C;
  A.col(1) = C;
  std::vector<std::vector<Vec>> marginals{{Vec::Constant(2, 0.5), (Vec(2) << 0.2, 0.8).finished()}};
  const Vec g = efe_classic(A, C, marginals, 0);
  CHECK(std::abs(g[0] - entropy_categorical(C)) < 1e-12);

  // zero-entropy likelihood columns and matching preferences: exactly zero
  const Vec s = (Vec(2) << 0.3, 0.7).finished();
  std::vector<std::vector<Vec>> m2{{Vec::Constant(2, 0.5), s}};
  CHECK(efe_classic(Mat::Identity(2, 2), s, m2, 0)[0] == 0.0);
}

TEST_CASE("efe_classic matches the enumeration oracle on a hand instance") {
  GenerativeModel m;
  m.dims = {2, 2, 1, 1, 0};
  m.a = (Mat(2, 2) << 0.8, 0.3, 0.2, 0.7).finished();
  m.b = {Mat::Identity(2, 2)};
  m.d = Vec::Constant(2, 0.5);
  m.C = (Vec(2) << 0.9, 0.1).finished();
  m.policies = enumerate_policies(1, 1);
  m.frozen_a = m.frozen_b = m.frozen_d = true;

  std::vector<std::vector<Vec>> marginals{{Vec::Constant(2, 0.5), Vec::Constant(2, 0.5)}};
  const Vec mine = efe_classic(m, marginals, 0);
  const Vec ref = oracle::brute_force_efe_classic(m, marginals, 0);
  CHECK(std::abs(mine[0] - ref[0]) < 1e-10);
}

TEST_CASE("efe_classic is non-negative and matches the oracle on random instances") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const GenerativeModel m = trial % 2 ? random_frozen_model(rng) : random_wide_frozen_model(rng);
    const int t = static_cast<int>(rng.uniform01() * (m.dims.horizon + 1));
    std::vector<std::vector<Vec>> marginals(m.policies.size());
    for (auto& chain : marginals)
      for (int tau = 0; tau <= m.dims.horizon; ++tau)
        chain.push_back(random_simplex(rng, m.dims.num_states));
    const Vec mine = efe_classic(m, marginals, t);
    const Vec ref = oracle::brute_force_efe_classic(m, marginals, t);
    for (int k = 0; k < m.policies.size(); ++k) {
      CHECK(mine[k] >= 0.0);
      CHECK(std::abs(mine[k] - ref[k]) < 1e-10);
    }
  }
}

TEST_CASE("efe_classic propagates divergent risk as an infinite marker") {
  const Mat A = (Mat(2, 2) << 0.8, 0.3, 0.2, 0.7).finished();
  const Vec C = (Vec(2) << 0.0, 1.0).finished();  // extreme preference
  std::vector<std::vector<Vec>> marginals{{Vec::Constant(2, 0.5), Vec::Constant(2, 0.5)}};
  CHECK(std::isinf(efe_classic(A, C, marginals, 0)[0]));
}

TEST_CASE("epistemic value vanishes when outcomes are state-independent") {
  Mat A(2, 2);
  A.col(0) = (Vec(2) << 0.4, 0.6).finished();
  A.col(1) = A.col(0);
  std::vector<std::vector<Vec>> marginals{{Vec::Constant(2, 0.5), (Vec(2) << 0.3, 0.7).finished()}};
  auto [epistemic, extrinsic] = efe_epistemic_extrinsic(A, Vec(Vec::Constant(2, 0.5)), marginals, 0);
  CHECK(std::abs(epistemic[0]) < 1e-12);
}

TEST_CASE("epistemic value of a perfect channel is ln 2") {
  std::vector<std::vector<Vec>> marginals{{Vec::Constant(2, 0.5), Vec::Constant(2, 0.5)}};
  auto [epistemic, extrinsic] =
      efe_epistemic_extrinsic(Mat::Identity(2, 2), Vec(Vec::Constant(2, 0.5)), marginals, 0);
  CHECK(std::abs(epistemic[0] - std::log(2.0)) < 1e-12);
}

TEST_CASE("epistemic value matches mutual information from the joint table") {
  Rng rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat A = random_stochastic(rng, 2, 2);
    const Vec s = random_simplex(rng, 2);
    std::vector<std::vector<Vec>> marginals{{Vec::Constant(2, 0.5), s}};
    auto [epistemic, extrinsic] = efe_epistemic_extrinsic(A, Vec(Vec::Constant(2, 0.5)), marginals, 0);

    // second route: I(S;O) = H(S) + H(O) - H(S,O) over the 4-cell joint
    double h_joint = 0.0;
    Vec o_marg = Vec::Zero(2);
    for (int o = 0; o < 2; ++o)
      for (int j = 0; j < 2; ++j) {
        const double joint = A(o, j) * s[j];
        o_marg[o] += joint;
        if (joint > 0.0) h_joint -= joint * std::log(joint);
      }
    const double mi = entropy_categorical(s) + entropy_categorical(o_marg) - h_joint;
    CHECK(std::abs(epistemic[0] - mi) < 1e-10);

    // extrinsic value is the expected log preference of predicted outcomes
    const double direct = o_marg[0] * std::log(0.5) + o_marg[1] * std::log(0.5);
    CHECK(std::abs(extrinsic[0] - direct) < 1e-12);
  }
}

TEST_CASE("efe_factorised closed cases") {
  // one-hot transition columns: zero conditional entropy for every policy
  GenerativeModel det;
  det.dims = {2, 2, 2, 2, 0};
  det.b = {(Mat(2, 2) << 1.0, 1.0, 0.0, 0.0).finished(),
           (Mat(2, 2) << 0.0, 0.0, 1.0, 1.0).finished()};
  det.frozen_b = true;
  det.policies = enumerate_policies(2, 2);
  std::vector<Vec> marginals{Vec::Constant(2, 0.5), Vec::Constant(2, 0.5), Vec::Constant(2, 0.5)};
  const Vec g_det = efe_factorised(det, marginals);
  for (int k = 0; k < g_det.size(); ++k) CHECK(g_det[k] == 0.0);

  // uniform columns over |S| = 2 with T = 3: exactly 3 ln 2
  GenerativeModel uni = det;
  uni.dims.horizon = 3;
  uni.b = {Mat::Constant(2, 2, 0.5), Mat::Constant(2, 2, 0.5)};
  uni.policies = enumerate_policies(2, 3);
  std::vector<Vec> m4(4, Vec::Constant(2, 0.5));
  const Vec g_uni = efe_factorised(uni, m4);
  for (int k = 0; k < g_uni.size(); ++k) CHECK(std::abs(g_uni[k] - 3.0 * std::log(2.0)) < 1e-12);

  // deterministic action 0 vs uniform action 1 at T = 1: (0, ln 2)
  GenerativeModel mix = det;
  mix.dims.horizon = 1;
  mix.b = {(Mat(2, 2) << 1.0, 0.0, 0.0, 1.0).finished(), Mat::Constant(2, 2, 0.5)};
  mix.policies = enumerate_policies(2, 1);
  std::vector<Vec> m1{Vec::Constant(2, 0.5), Vec::Constant(2, 0.5)};
  const Vec g_mix = efe_factorised(mix, m1);
  CHECK(g_mix[0] == 0.0);
  CHECK(std::abs(g_mix[1] - std::log(2.0)) < 1e-14);
}

TEST_CASE("efe_factorised depends only on the action sequence") {
  Rng rng(33);
  GenerativeModel m = random_frozen_model(rng);
  m.policies.seqs.push_back(m.policies.seqs.front());  // duplicate policy
  std::vector<Vec> marginals;
  for (int tau = 0; tau <= m.dims.horizon; ++tau)
    marginals.push_back(random_simplex(rng, m.dims.num_states));
  const Vec g = efe_factorised(m, marginals);
  CHECK(std::abs(g[0] - g[g.size() - 1]) < 1e-12);
}

TEST_CASE("efe_factorised is zero for every policy iff used columns are one-hot") {
  // forward: deterministic blocks give exactly zero (covered above); reverse:
  // any non-degenerate used column forces a strictly positive entry
  Rng rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    GenerativeModel m = random_frozen_model(rng);
    std::vector<Vec> marginals;
    for (int tau = 0; tau <= m.dims.horizon; ++tau)
      marginals.push_back(random_simplex(rng, m.dims.num_states));
    const Vec g = efe_factorised(m, marginals);
    for (int k = 0; k < m.policies.size(); ++k) CHECK(g[k] > 0.0);
  }
}

TEST_CASE("efe_factorised matches the brute-force sum on random instances") {
  Rng rng(35);
  for (int trial = 0; trial < 50; ++trial) {
    GenerativeModel m = trial % 2 ? random_frozen_model(rng) : random_dirichlet_model(rng);
    std::vector<Vec> marginals;
    for (int tau = 0; tau <= m.dims.horizon; ++tau)
      marginals.push_back(random_simplex(rng, m.dims.num_states));
    const Vec mine = efe_factorised(m, marginals);
    const Vec ref = oracle::brute_force_efe_factorised(m, marginals);
    for (int k = 0; k < m.policies.size(); ++k) CHECK(std::abs(mine[k] - ref[k]) < 1e-10);
  }
}
