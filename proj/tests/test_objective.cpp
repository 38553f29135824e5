#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "vecor/error.hpp"
#include "vecor/objective.hpp"
#include "vecor/rng.hpp"

using namespace vecor;

namespace {

NegativeCandidateSet random_set(Shape shape, int k, SeededRng& rng) {
  NegativeCandidateSet set;
  set.positive = BatchGrid(shape, Space::Velocity);
  for (auto& v : set.positive.data()) v = rng.normal();
  for (int j = 0; j < k; ++j) {
    BatchGrid n(shape, Space::Velocity);
    for (auto& v : n.data()) v = rng.normal();
    set.negatives.push_back(std::move(n));
  }
  set.shared_eps = BatchGrid(shape, Space::Noise);
  set.shared_t.assign(shape.b, 0.5);
  return set;
}

}  // namespace

TEST_CASE("config gate accepts and rejects per the open-interval rules") {
  CHECK_NOTHROW(validate_config(VecorConfig{0.05, 1, false}));
  CHECK_NOTHROW(validate_config(VecorConfig{0.05, 4, false}));
  CHECK_THROWS_AS(validate_config(VecorConfig{0.0, 1, false}), ConfigError);
  CHECK_NOTHROW(validate_config(VecorConfig{0.0, 1, true}));
  CHECK_THROWS_AS(validate_config(VecorConfig{1.0, 1, false}), ConfigError);
  CHECK_THROWS_AS(validate_config(VecorConfig{0.05, 0, false}), ConfigError);
  try {
    validate_config(VecorConfig{0.5, 2, false});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("\xce\xbbK < 1") != std::string::npos);
  }
}

TEST_CASE("fm loss substitution examples") {
  BatchGrid p(Shape{1, 2, 1, 1}, Space::Velocity, std::vector<double>{3.0, 4.0});
  BatchGrid t(Shape{1, 2, 1, 1}, Space::Velocity, std::vector<double>{0.0, 0.0});
  CHECK(fm_loss(p, t).total == 25.0);
  CHECK(fm_loss(p, p).total == 0.0);

  // B=2, per-sample squared norms (2, 4) -> mean 3
  BatchGrid p2(Shape{2, 2, 1, 1}, Space::Velocity,
               std::vector<double>{1.0, 1.0, 2.0, 0.0});
  BatchGrid t2(Shape{2, 2, 1, 1}, Space::Velocity,
               std::vector<double>{0.0, 0.0, 0.0, 0.0});
  CHECK(fm_loss(p2, t2).total == 3.0);
}

TEST_CASE("vecor loss with lambda=0 is the fm loss bit-for-bit") {
  SeededRng rng(1, "obj");
  auto set = random_set(Shape{4, 3, 1, 1}, 2, rng);
  BatchGrid pred(set.positive.shape(), Space::Velocity);
  for (auto& v : pred.data()) v = rng.normal();
  VecorConfig cfg{0.0, 2, /*allow_lambda_zero=*/true};
  CHECK(vecor_loss(pred, set, cfg).total == fm_loss(pred, set.positive).total);
}

TEST_CASE("vecor loss substitution at the positive") {
  // v_pred = v_pos, one negative at squared distance 4, lambda 0.05 -> -0.2
  NegativeCandidateSet set;
  set.positive = BatchGrid(Shape{1, 1, 1, 1}, Space::Velocity, 1.0);
  set.negatives.push_back(BatchGrid(Shape{1, 1, 1, 1}, Space::Velocity, 3.0));
  VecorConfig cfg{0.05, 1, false};
  LossReport r = vecor_loss(set.positive, set, cfg);
  CHECK(r.total == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(r.positive_term == 0.0);
  CHECK(r.negative_term == 4.0);
}

TEST_CASE("vecor loss matches a naive scalar-loop oracle at K=3") {
  SeededRng rng(2, "obj");
  const Shape shape{5, 2, 2, 2};
  auto set = random_set(shape, 3, rng);
  BatchGrid pred(shape, Space::Velocity);
  for (auto& v : pred.data()) v = rng.normal();
  VecorConfig cfg{0.1, 3, false};
  double ref = 0.0;
  for (std::size_t b = 0; b < shape.b; ++b) {
    double pos = 0.0;
    for (std::size_t i = 0; i < shape.sample_size(); ++i) {
      double d = pred.sample(b)[i] - set.positive.sample(b)[i];
      pos += d * d;
    }
    double neg = 0.0;
    for (const auto& n : set.negatives)
      for (std::size_t i = 0; i < shape.sample_size(); ++i) {
        double d = pred.sample(b)[i] - n.sample(b)[i];
        neg += d * d;
      }
    ref += pos - cfg.lambda * neg;
  }
  ref /= double(shape.b);
  CHECK(vecor_loss(pred, set, cfg).total == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("gradient vanishes at the closed-form optimum") {
  SeededRng rng(3, "obj");
  auto set = random_set(Shape{3, 2, 1, 1}, 2, rng);
  VecorConfig cfg{0.2, 2, false};
  BatchGrid opt = closed_form_optimum(set, cfg);
  BatchGrid g = vecor_grad(opt, set, cfg);
  for (double v : g.data()) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("lambda=0 gradient is the plain mse gradient") {
  NegativeCandidateSet set;
  set.positive = BatchGrid(Shape{1, 2, 1, 1}, Space::Velocity,
                           std::vector<double>{0.0, 0.0});
  set.negatives.push_back(BatchGrid(Shape{1, 2, 1, 1}, Space::Velocity, 5.0));
  BatchGrid pred(Shape{1, 2, 1, 1}, Space::Velocity,
                 std::vector<double>{1.0, 0.0});
  VecorConfig cfg{0.0, 1, true};
  BatchGrid g = vecor_grad(pred, set, cfg);
  CHECK(g[0] == 2.0);  // (2/B) * (pred - pos), B=1
  CHECK(g[1] == 0.0);
}

TEST_CASE("analytic gradient matches finite differences of the loss") {
  SeededRng rng(4, "obj");
  for (int trial = 0; trial < 100; ++trial) {
    const Shape shape{2, 2, 1, 1};
    int k = 1 + int(rng.int_range(0, 2));
    auto set = random_set(shape, k, rng);
    VecorConfig cfg{rng.uniform(0.01, 0.9 / k), k, false};
    BatchGrid pred(shape, Space::Velocity);
    for (auto& v : pred.data()) v = rng.normal();
    BatchGrid g = vecor_grad(pred, set, cfg);
    const double h = 1e-6;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      double saved = pred[i];
      pred[i] = saved + h;
      double lp = vecor_loss(pred, set, cfg).total;
      pred[i] = saved - h;
      double lm = vecor_loss(pred, set, cfg).total;
      pred[i] = saved;
      double fd = (lp - lm) / (2 * h);
      double rel = std::abs(g[i] - fd) / std::max({std::abs(g[i]), std::abs(fd), 1e-8});
      CHECK(rel < 1e-6);
    }
  }
}

TEST_CASE("closed form substitution examples") {
  NegativeCandidateSet set;
  set.positive = BatchGrid(Shape{1, 1, 1, 1}, Space::Velocity, 1.0);
  set.negatives.push_back(BatchGrid(Shape{1, 1, 1, 1}, Space::Velocity, 0.0));
  VecorConfig cfg{0.05, 1, false};
  CHECK(closed_form_optimum(set, cfg)[0] ==
        doctest::Approx(1.0 / 0.95).epsilon(1e-12));
}

TEST_CASE("identity negatives leave the optimum at the positive") {
  SeededRng rng(5, "obj");
  NegativeCandidateSet set;
  set.positive = BatchGrid(Shape{3, 2, 1, 1}, Space::Velocity);
  for (auto& v : set.positive.data()) v = rng.normal();
  for (int j = 0; j < 3; ++j) set.negatives.push_back(set.positive);
  VecorConfig cfg{0.2, 3, false};
  BatchGrid opt = closed_form_optimum(set, cfg);
  for (std::size_t i = 0; i < opt.size(); ++i)
    CHECK(opt[i] == doctest::Approx(set.positive[i]).epsilon(1e-14));
}

TEST_CASE("the optimum minimizes the loss (convex when lambda*K < 1)") {
  SeededRng rng(6, "obj");
  for (int trial = 0; trial < 20; ++trial) {
    auto set = random_set(Shape{2, 2, 1, 1}, 2, rng);
    VecorConfig cfg{0.3, 2, false};
    BatchGrid opt = closed_form_optimum(set, cfg);
    double best = vecor_loss(opt, set, cfg).total;
    for (int probe = 0; probe < 10; ++probe) {
      BatchGrid v = opt;
      for (auto& x : v.data()) x += 0.5 * rng.normal();
      CHECK(vecor_loss(v, set, cfg).total >= best - 1e-12);
    }
  }
}

TEST_CASE("candidate-count mismatch is rejected") {
  SeededRng rng(7, "obj");
  auto set = random_set(Shape{1, 2, 1, 1}, 2, rng);
  VecorConfig cfg{0.05, 3, false};
  BatchGrid pred(set.positive.shape(), Space::Velocity);
  CHECK_THROWS_AS(vecor_loss(pred, set, cfg), ConfigError);
  CHECK_THROWS_AS(vecor_grad(pred, set, cfg), ConfigError);
  CHECK_THROWS_AS(closed_form_optimum(set, cfg), ConfigError);
}
