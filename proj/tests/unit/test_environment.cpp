#include <doctest.h>

#include <cmath>

#include "support/stats.hpp"
#include "vts/environment.hpp"

using namespace vts;
using nlohmann::json;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("scenario A constants") {
  const auto m = scenario_a();
  REQUIRE(m.num_arms() == 2);
  CHECK(m.context_dim() == 2);
  for (const auto& arm : m.arms) {
    CHECK(arm.weights == std::vector<double>{0.5, 0.5});
    CHECK(arm.variances == std::vector<double>{1.0, 1.0});
  }
  CHECK(same_values(m.arms[0].regressors[0], v2(0, 0)));
  CHECK(same_values(m.arms[0].regressors[1], v2(1, 1)));
  CHECK(same_values(m.arms[1].regressors[0], v2(2, 2)));
  CHECK(same_values(m.arms[1].regressors[1], v2(3, 3)));
  CHECK(scenario_a() == m);
}

TEST_CASE("scenario B constants") {
  const auto m = scenario_b();
  REQUIRE(m.num_arms() == 2);
  CHECK(m.arms[0].weights == std::vector<double>{0.5, 0.5});
  CHECK(m.arms[1].weights == std::vector<double>{0.3, 0.7});
  CHECK(same_values(m.arms[0].regressors[0], v2(1, 1)));
  CHECK(same_values(m.arms[0].regressors[1], v2(2, 2)));
  CHECK(same_values(m.arms[1].regressors[0], v2(0, 0)));
  CHECK(same_values(m.arms[1].regressors[1], v2(3, 3)));
  for (const auto& arm : m.arms) CHECK(arm.variances == std::vector<double>{1.0, 1.0});
}

TEST_CASE("true expected reward") {
  CHECK(true_expected_reward(scenario_a(), 0, v2(1, 1)) == doctest::Approx(1.0));
  CHECK(true_expected_reward(scenario_a(), 1, v2(1, 1)) == doctest::Approx(5.0));
  CHECK(true_expected_reward(scenario_b(), 0, v2(1, 1)) == doctest::Approx(3.0));
  CHECK(true_expected_reward(scenario_b(), 1, v2(1, 1)) == doctest::Approx(4.2));
  for (std::size_t a = 0; a < 2; ++a) CHECK(true_expected_reward(scenario_b(), a, v2(0, 0)) == 0.0);
}

TEST_CASE("model validation") {
  auto m = scenario_b();
  m.arms[1].weights = {0.3, 0.6};
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = scenario_b();
  m.arms[0].variances[1] = 0.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = scenario_b();
  m.arms[0].regressors[1] = Vector::Zero(3);
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = scenario_b();
  m.arms[0].weights.pop_back();
  CHECK_THROWS_AS(m.validate(), ConfigError);
}

TEST_CASE("uniform contexts have the right moments and no correlation") {
  auto gen = ContextGenerator::uniform(2);
  RngStream rng(20, 0);
  std::vector<double> x0, x1, cross;
  for (int i = 0; i < 100000; ++i) {
    const auto x = draw_context(gen, rng);
    REQUIRE(x.size() == 2);
    x0.push_back(x(0));
    x1.push_back(x(1));
    cross.push_back((x(0) - 0.5) * (x(1) - 0.5));
  }
  CHECK(stats::z_score(x0, 0.5) < 4.0);
  CHECK(stats::z_score(x1, 0.5) < 4.0);
  CHECK(stats::z_score(cross, 0.0) < 4.0);
}

TEST_CASE("uniform contexts respect per-coordinate bounds") {
  auto gen = ContextGenerator::uniform(v2(-1, 10), v2(1, 20));
  RngStream rng(21, 0);
  std::vector<double> x1;
  for (int i = 0; i < 100000; ++i) {
    const auto x = gen.draw(rng);
    REQUIRE(x(0) > -1.0);
    REQUIRE(x(0) < 1.0);
    REQUIRE(x(1) > 10.0);
    REQUIRE(x(1) < 20.0);
    x1.push_back(x(1));
  }
  CHECK(stats::z_score(x1, 15.0) < 4.0);
  CHECK_THROWS_AS(ContextGenerator::uniform(v2(0, 1), v2(1, 1)), ConfigError);
  CHECK_THROWS_AS(ContextGenerator::uniform(v2(0, 0), Vector::Ones(3)), ConfigError);
}

TEST_CASE("fixed sequences play back in order and then stop") {
  auto gen = ContextGenerator::fixed_sequence({v2(1, 0), v2(0, 1)});
  RngStream rng(22, 0), untouched(22, 0);
  CHECK(same_values(gen.draw(rng), v2(1, 0)));
  CHECK(same_values(gen.draw(rng), v2(0, 1)));
  CHECK(gen.position() == 2);
  CHECK_THROWS_AS(gen.draw(rng), SequenceError);
  gen.rewind();
  CHECK(same_values(gen.draw(rng), v2(1, 0)));
  CHECK(rng.next_u64() == untouched.next_u64());
  CHECK_THROWS_AS(ContextGenerator::fixed_sequence({}), ConfigError);
  CHECK_THROWS_AS(ContextGenerator::fixed_sequence({v2(1, 0), Vector::Ones(3)}), ConfigError);
}

TEST_CASE("reward means at fixed contexts") {
  RngStream rng(23, 2);
  std::vector<double> at_zero, b_arm1;
  for (int i = 0; i < 100000; ++i) {
    at_zero.push_back(draw_reward(scenario_a(), 1, v2(0, 0), rng));
    b_arm1.push_back(draw_reward(scenario_b(), 1, v2(1, 1), rng));
  }
  CHECK(stats::z_score(at_zero, 0.0) < 4.0);
  CHECK(stats::z_score(b_arm1, 4.2) < 4.0);
}

TEST_CASE("a near-deterministic model returns its mean") {
  MixtureBanditModel m;
  m.arms = {ArmMixture{{1.0}, {v2(1, 1)}, {1e-8}}};
  RngStream rng(24, 2);
  for (int i = 0; i < 1000; ++i) CHECK(std::abs(draw_reward(m, 0, v2(2, 3), rng) - 5.0) < 1e-3);
}

TEST_CASE("Monte-Carlo reward means agree with the true mean") {
  RngStream pick(25, 0), rng(25, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto& model = trial % 2 ? scenario_a() : scenario_b();
    const std::size_t arm = pick.index(2);
    const Vector x = v2(pick.uniform(), pick.uniform());
    std::vector<double> y;
    for (int i = 0; i < 100000; ++i) y.push_back(draw_reward(model, arm, x, rng));
    CAPTURE(trial);
    CHECK(stats::z_score(y, true_expected_reward(model, arm, x)) < 4.0);
  }
}

TEST_CASE("reward draws reject a context of the wrong size") {
  RngStream rng(1, 2);
  CHECK_THROWS_AS(draw_reward(scenario_b(), 0, Vector::Zero(3), rng), ConfigError);
}

TEST_CASE("model and context JSON") {
  CHECK(model_from_json(json{{"scenario", "A"}}) == scenario_a());
  CHECK(model_from_json(json{{"scenario", "B"}}) == scenario_b());
  const auto custom = json::parse(R"({"scenario": "custom", "arms": [
      {"weights": [1.0], "regressors": [[1, 2, 3]], "variances": [0.5]},
      {"weights": [0.25, 0.75], "regressors": [[0, 0, 1], [1, 0, 0]], "variances": [1, 2]}]})");
  const auto m = model_from_json(custom);
  CHECK(m.context_dim() == 3);
  CHECK(m.arms[1].variances == std::vector<double>{1.0, 2.0});
  auto again = model_to_json(m);
  CHECK(model_from_json(again) == m);
  CHECK_THROWS_AS(model_from_json(json{{"scenario", "C"}}), ConfigError);
  CHECK_THROWS_AS(model_from_json(json{{"scenario", "custom"}}), ConfigError);

  const auto u = context_from_json(json::parse(R"({"kind": "uniform_iid", "low": 0, "high": [1, 2]})"), 2);
  CHECK(same_values(u.high(), v2(1, 2)));
  CHECK(context_from_json(context_to_json(u), 2) == u);
  const auto f = context_from_json(json::parse(R"({"kind": "fixed_sequence", "sequence": [[1, 0], [0, 1]]})"), 2);
  CHECK(f.kind() == ContextGenerator::Kind::FixedSequence);
  CHECK(context_from_json(context_to_json(f), 2) == f);
  CHECK_THROWS_AS(context_from_json(json::parse(R"({"kind": "uniform_iid", "low": [0, 0, 0]})"), 2),
                  ConfigError);
}
