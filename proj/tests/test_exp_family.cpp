#include <catch2/catch_amalgamated.hpp>

#include <boost/math/special_functions/digamma.hpp>

#include "actinf/exp_family.hpp"
#include "actinf/env.hpp"

using namespace actinf;

namespace {
constexpr double kEulerGamma = 0.57721566490153286061;
}

TEST_CASE("digamma matches closed forms") {
  // psi(1) = -gamma, psi(2) = 1 - gamma, psi(1/2) = -gamma - 2 ln 2
  CHECK(std::abs(digamma(1.0) + kEulerGamma) < 1e-13);
  CHECK(std::abs(digamma(2.0) - (1.0 - kEulerGamma)) < 1e-13);
  CHECK(std::abs(digamma(0.5) + kEulerGamma + 2.0 * std::log(2.0)) < 1e-13);
}

TEST_CASE("digamma satisfies the recurrence psi(x+1) = psi(x) + 1/x") {
  for (double x : {0.1, 0.5, 1.0, 2.0, 10.0, 100.0})
    CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) < 1e-12);
}

TEST_CASE("digamma agrees with an independent reference over [1e-3, 1e6]") {
  for (double exp10 = -3.0; exp10 <= 6.0; exp10 += 0.25) {
    const double x = std::pow(10.0, exp10);
    const double ref = static_cast<double>(boost::math::digamma(static_cast<long double>(x)));
    CHECK(std::abs(digamma(x) - ref) < 1e-12);
  }
}

TEST_CASE("digamma rejects non-positive arguments") {
  CHECK_THROWS_AS(digamma(0.0), std::domain_error);
  CHECK_THROWS_AS(digamma(-1.0), std::domain_error);
}

TEST_CASE("softmax basics") {
  auto p = softmax((Vec(2) << 0.0, 0.0).finished());
  CHECK(std::abs(p[0] - 0.5) < 1e-15);

  auto q = softmax((Vec(2) << std::log(2.0), 0.0).finished());
  CHECK(std::abs(q[0] - 2.0 / 3.0) < 1e-14);
  CHECK(std::abs(q[1] - 1.0 / 3.0) < 1e-14);

  auto r = softmax((Vec(2) << 1000.0, 1000.0).finished());
  CHECK(std::abs(r[0] - 0.5) < 1e-15);
}

TEST_CASE("softmax input errors") {
  CHECK_THROWS_AS(softmax(Vec()), std::invalid_argument);
  CHECK_THROWS_AS(softmax((Vec(2) << std::nan(""), 0.0).finished()), std::invalid_argument);
  CHECK_THROWS_AS(softmax((Vec(1) << -std::numeric_limits<double>::infinity()).finished()),
                  std::invalid_argument);
  // -inf entries are allowed and get zero weight
  auto p = softmax((Vec(2) << 0.0, -std::numeric_limits<double>::infinity()).finished());
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);
}

TEST_CASE("softmax output is a simplex point and shift invariant") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform01() * 4);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = 20.0 * (rng.uniform01() - 0.5);
    const double c = 2000.0 * (rng.uniform01() - 0.5);  // |c| <= 1e3
    const Vec p = softmax(v).vec();
    const Vec q = softmax(Vec(v.array() + c)).vec();
    CHECK(std::abs(p.sum() - 1.0) < 1e-12);
    CHECK(p.minCoeff() >= 0.0);
    CHECK((p - q).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("kl_categorical") {
  const Vec p = (Vec(2) << 0.3, 0.7).finished();
  CHECK(kl_categorical(p, p) == 0.0);

  const Vec onehot = (Vec(2) << 1.0, 0.0).finished();
  const Vec half = (Vec(2) << 0.5, 0.5).finished();
  CHECK(std::abs(kl_categorical(onehot, half) - std::log(2.0)) < 1e-14);
  CHECK(std::isinf(kl_categorical(half, onehot)));

  CHECK_THROWS_AS(kl_categorical(Vec(half), Vec(Vec::Constant(3, 1.0 / 3.0))),
                  std::invalid_argument);
}

TEST_CASE("kl_categorical is non-negative and zero only at equality") {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform01() * 3);
    Vec p(n), q(n);
    for (int i = 0; i < n; ++i) {
      p[i] = 0.01 + rng.uniform01();
      q[i] = 0.01 + rng.uniform01();
    }
    p /= p.sum();
    q /= q.sum();
    const double kl = kl_categorical(p, q);
    CHECK(kl >= 0.0);
    if ((p - q).lpNorm<Eigen::Infinity>() > 1e-3) CHECK(kl > 0.0);
    CHECK(kl_categorical(p, p) < 1e-9);
  }
}

TEST_CASE("entropy_categorical") {
  CHECK(entropy_categorical((Vec(2) << 1.0, 0.0).finished()) == 0.0);
  CHECK(std::abs(entropy_categorical((Vec(2) << 0.5, 0.5).finished()) - std::log(2.0)) < 1e-14);
  CHECK(std::abs(entropy_categorical(Vec(Vec::Constant(4, 0.25))) - std::log(4.0)) < 1e-14);
}

TEST_CASE("entropy is maximal exactly at the uniform distribution") {
  Rng rng(13);
  const int n = 3;
  const double h_uniform = entropy_categorical(Vec(Vec::Constant(n, 1.0 / n)));
  for (int trial = 0; trial < 200; ++trial) {
    Vec p(n);
    for (int i = 0; i < n; ++i) p[i] = 1.0 / n + 0.2 * (rng.uniform01() - 0.5);
    p = p.cwiseMax(1e-3);
    p /= p.sum();
    CHECK(entropy_categorical(p) <= h_uniform + 1e-15);
  }
}

TEST_CASE("dirichlet_mode") {
  const Vec m1 = dirichlet_mode((Vec(2) << 2.0, 2.0).finished()).vec();
  CHECK(std::abs(m1[0] - 0.5) < 1e-15);
  const Vec m2 = dirichlet_mode((Vec(2) << 3.0, 2.0).finished()).vec();
  CHECK(std::abs(m2[0] - 2.0 / 3.0) < 1e-15);
  const Vec m3 = dirichlet_mode(Vec(Vec::Constant(3, 2.0))).vec();
  CHECK(std::abs(m3[2] - 1.0 / 3.0) < 1e-15);
  CHECK_THROWS_AS(dirichlet_mode((Vec(2) << 1.0, 2.0).finished()), std::domain_error);
}

TEST_CASE("dirichlet_variance") {
  CHECK(std::abs(dirichlet_variance((Vec(2) << 2.0, 2.0).finished(), 0) - 0.05) < 1e-15);
  CHECK(std::abs(dirichlet_variance((Vec(2) << 1.0, 1.0).finished(), 0) - 1.0 / 12.0) < 1e-15);
  CHECK(std::abs(dirichlet_variance((Vec(2) << 100.0, 100.0).finished(), 0) - 0.25 / 201.0) < 1e-15);
  CHECK_THROWS_AS(dirichlet_variance((Vec(2) << 1.0, 1.0).finished(), 2), std::out_of_range);
}

TEST_CASE("expected_log_dirichlet") {
  // psi(1) - psi(2) = -1 and the (2,1) column via the recurrence
  const Mat ones = Mat::Ones(2, 1);
  const Mat e1 = expected_log_dirichlet(ones);
  CHECK(std::abs(e1(0, 0) + 1.0) < 1e-13);
  CHECK(std::abs(e1(1, 0) + 1.0) < 1e-13);

  const Mat col = (Mat(2, 1) << 2.0, 1.0).finished();
  const Mat e2 = expected_log_dirichlet(col);
  CHECK(std::abs(e2(0, 0) + 0.5) < 1e-13);
  CHECK(std::abs(e2(1, 0) + 1.5) < 1e-13);

  Rng rng(14);
  Mat block(3, 3);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) block(i, j) = 0.2 + 3.0 * rng.uniform01();
  const Mat e3 = expected_log_dirichlet(block);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(e3(i, j) - (digamma(block(i, j)) - digamma(block.col(j).sum()))) < 1e-12);
}

TEST_CASE("Dirichlet policy-prior limits: variance shrinks and mode centres") {
  const Vec G = (Vec(3) << 0.3, 1.2, 2.0).finished();
  double prev = std::numeric_limits<double>::infinity();
  for (double c = 10.0; c <= 1.0e6; c *= 10.0) {
    const Vec theta = Vec::Constant(3, c) - G;
    const double var = dirichlet_variance(theta, 0);
    CHECK(var < prev);
    prev = var;
    if (c == 1.0e6) {
      const Vec mode = dirichlet_mode(theta).vec();
      for (int i = 0; i < 3; ++i) CHECK(std::abs(mode[i] - 1.0 / 3.0) < 1e-3);
    }
  }
}

TEST_CASE("ProbVector and DirichletBlock invariants") {
  CHECK_THROWS_AS(ProbVector((Vec(2) << 0.6, 0.6).finished()), std::invalid_argument);
  CHECK_THROWS_AS(ProbVector((Vec(2) << -0.1, 1.1).finished()), std::invalid_argument);
  CHECK_THROWS_AS(ProbVector(Vec()), std::invalid_argument);
  CHECK_THROWS_AS(DirichletBlock((Mat(1, 1) << 0.0).finished()), std::invalid_argument);
  CHECK_THROWS_AS(OneHot(2, 2), std::invalid_argument);
  CHECK(OneHot(1, 3).vec()[1] == 1.0);
}
