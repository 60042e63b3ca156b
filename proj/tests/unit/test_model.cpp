#include <doctest.h>

#include "support/fixtures.hpp"
#include "vts/inference.hpp"
#include "vts/model.hpp"

using namespace vts;
using nlohmann::json;

TEST_CASE("BanditConfig validation") {
  CHECK_NOTHROW(BanditConfig::uniform(2, 2, 3).validate());
  CHECK_THROWS_AS(BanditConfig::uniform(0, 2, 1).validate(), ConfigError);
  CHECK_THROWS_AS(BanditConfig::uniform(2, 0, 1).validate(), ConfigError);
  CHECK_THROWS_AS(BanditConfig::uniform(2, 2, 0).validate(), ConfigError);
  BanditConfig short_list{3, 2, {1, 2}};
  CHECK_THROWS_AS(short_list.validate(), ConfigError);
}

TEST_CASE("default priors broadcast to every arm and component") {
  const auto cfg = BanditConfig{2, 3, {1, 3}};
  const auto p = PriorHyperparams::defaults(cfg);
  REQUIRE(p.arms.size() == 2);
  CHECK(p.arms[1].concentration == std::vector<double>{0.1, 0.1, 0.1});
  for (const auto& arm : p.arms) {
    for (const auto& c : arm.components) {
      CHECK(same_values(c.mean, Vector(Vector::Zero(3))));
      CHECK(same_values(c.scale.matrix(), Matrix(Matrix::Identity(3, 3))));
      CHECK(same_values(c.precision, Matrix(Matrix::Identity(3, 3))));
      CHECK(c.shape == 1.0);
      CHECK(c.rate == 1.0);
    }
  }
  CHECK_NOTHROW(p.validate(cfg));
  CHECK_THROWS_AS(p.validate(BanditConfig::uniform(2, 3, 2)), ConfigError);
  CHECK_THROWS_AS(p.validate(BanditConfig::uniform(2, 2, 1)), ConfigError);
}

TEST_CASE("init_state copies the prior into every component") {
  const auto cfg = BanditConfig::uniform(2, 2, 2);
  Vector u0(2);
  u0 << 0.5, -1.0;
  const auto priors = PriorHyperparams::broadcast(cfg, 0.3, u0, PDMatrix::identity(2), 2.0, 3.0);
  const auto s = init_state(cfg, priors);
  REQUIRE(s.num_arms() == 2);
  for (const auto& arm : s.arms) {
    CHECK_FALSE(arm.symmetry_broken);
    CHECK(arm.total_concentration() == doctest::Approx(0.6));
    for (const auto& c : arm.components) {
      CHECK(c.concentration == 0.3);
      CHECK(same_values(c.mean, u0));
      CHECK(c.shape == 2.0);
      CHECK(c.rate == 3.0);
    }
  }
}

TEST_CASE("InteractionHistory indexes observations per arm") {
  InteractionHistory h(3, 2);
  h.append(Vector::Constant(2, 1.0), 2, 0.5);
  h.append(Vector::Constant(2, 2.0), 0, 1.5);
  h.append(Vector::Constant(2, 3.0), 2, 2.5);
  CHECK(h.size() == 3);
  CHECK(h.count(0) == 1);
  CHECK(h.count(1) == 0);
  CHECK(h.steps_of(2) == std::vector<std::size_t>{0, 2});
  CHECK(h.context(2)[1] == 3.0);
  CHECK(h.arm(1) == 0);
  CHECK(h.reward(2) == 2.5);
  CHECK_THROWS_AS(h.append(Vector::Zero(3), 0, 0.0), ConfigError);
  CHECK_THROWS_AS(h.append(Vector::Zero(2), 3, 0.0), ConfigError);
}

TEST_CASE("binary serialization round-trips exactly") {
  RngStream rng(12, 0);
  const auto cfg = BanditConfig{2, 2, {1, 3}};
  const auto priors = PriorHyperparams::defaults(cfg);
  const auto h = fixtures::random_history(rng, 2, 2, 40);
  RngStream jitter(12, 3);
  InferenceOptions opt;
  opt.jitter_rng = &jitter;
  const auto fitted = run_inference(h, init_state(cfg, priors), priors, opt).state;

  const auto bytes = serialize(fitted);
  const auto back = deserialize_state(bytes);
  CHECK(back == fitted);
  CHECK(serialize(back) == bytes);

  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(deserialize_state(truncated), ConfigError);
  auto bad_magic = bytes;
  bad_magic[0] ^= 0xff;
  CHECK_THROWS_AS(deserialize_state(bad_magic), ConfigError);
}

TEST_CASE("BanditConfig JSON accepts a scalar or per-arm component count") {
  const auto a = json::parse(R"({"num_arms": 2, "context_dim": 3, "components_per_arm": 2})")
                     .get<BanditConfig>();
  CHECK(a == BanditConfig::uniform(2, 3, 2));
  const auto b = json::parse(R"({"num_arms": 2, "context_dim": 3, "components_per_arm": [1, 4]})")
                     .get<BanditConfig>();
  CHECK(b.components_per_arm == std::vector<std::size_t>{1, 4});
  CHECK(json(b).get<BanditConfig>() == b);
  CHECK_THROWS_AS(json::parse(R"({"num_arms": 2, "context_dim": 3, "components_per_arm": [1]})")
                      .get<BanditConfig>(),
                  ConfigError);
}

TEST_CASE("priors JSON: shared block, vector gamma0 and per-arm layout") {
  const auto cfg = BanditConfig::uniform(2, 2, 2);

  const auto shared = priors_from_json(
      json::parse(R"({"gamma0": 0.5, "u0": [1, 2], "V0": [[2, 0], [0, 2]], "alpha0": 3,
                      "beta0": 4})"),
      cfg);
  CHECK(shared.arms[1].concentration == std::vector<double>{0.5, 0.5});
  CHECK(shared.arms[0].components[1].scale.matrix()(0, 0) == 2.0);
  CHECK(shared.arms[0].components[1].precision(1, 1) == doctest::Approx(0.5));
  CHECK(priors_from_json(priors_to_json(shared), cfg) == shared);

  const auto vec = priors_from_json(json::parse(R"({"gamma0": [0.2, 0.7]})"), cfg);
  CHECK(vec.arms[0].concentration == std::vector<double>{0.2, 0.7});

  CHECK(priors_from_json(json::object(), cfg) == PriorHyperparams::defaults(cfg));

  CHECK_THROWS_AS(priors_from_json(json::parse(R"({"gamma0": [0.2]})"), cfg), ConfigError);
  CHECK_THROWS_AS(priors_from_json(json::parse(R"({"V0": [[1, 2], [2, 1]]})"), cfg), ConfigError);
  CHECK_THROWS_AS(priors_from_json(json::parse(R"({"alpha0": 0})"), cfg), ConfigError);
  CHECK_THROWS_AS(priors_from_json(json::parse(R"({"u0": [1, 2, 3]})"), cfg), ConfigError);
}

TEST_CASE("matrix and vector JSON helpers") {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  CHECK(same_values(matrix_from_json(to_json_value(m)), m));
  Vector v(3);
  v << 0.1, -2, 1e300;
  CHECK(same_values(vector_from_json(to_json_value(v)), v));
  CHECK_THROWS_AS(matrix_from_json(json::parse("[[1, 2], [3]]")), ConfigError);
  CHECK_THROWS_AS(vector_from_json(json::parse(R"([1, "a"])")), ConfigError);
}
