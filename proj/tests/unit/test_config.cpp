#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "vts/config.hpp"

using namespace vts;
using nlohmann::json;

namespace {

std::string error_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("defaults describe scenario B at desk scale") {
  const auto c = parse_config(json::object());
  CHECK(c.scenario == "B");
  CHECK(c.model == scenario_b());
  CHECK(c.horizon == 500);
  CHECK(c.realizations == 500);
  CHECK(c.components == std::vector<std::size_t>{1, 2, 3});
  CHECK(c.estimator == EstimatorKind::ProportionSampling);
  CHECK(c.regressor_source == RegressorSource::Sampled);
  CHECK(c.convergence.tolerance == 1e-6);
  CHECK(c.convergence.max_iterations == 100);
  CHECK(c.update_every == 1);
  CHECK_FALSE(c.shared_context);
  CHECK(c.resolved_priors(2) == PriorHyperparams::defaults(c.bandit_config(2)));
}

TEST_CASE("config JSON round-trips") {
  const auto j = json::parse(R"({
    "scenario": "custom",
    "arms": [{"weights": [1.0], "regressors": [[1, 0, 2]], "variances": [0.5]},
             {"weights": [0.4, 0.6], "regressors": [[0, 1, 0], [2, 2, 2]], "variances": [1, 3]},
             {"weights": [1.0], "regressors": [[0, 0, 0]], "variances": [2]}],
    "context": {"kind": "uniform_iid", "low": -1, "high": [1, 2, 3]},
    "horizon": 40, "realizations": 7, "components": [2, 4],
    "priors": {"gamma0": [0.5, 1.0], "alpha0": 2},
    "estimator": "assignment_sampling", "regressor_source": "posterior_mean",
    "convergence": {"tolerance": 1e-8, "max_iterations": 50, "check_invariants": true},
    "master_seed": 18446744073709551615, "update_every": 3, "shared_context": true,
    "output_dir": "elsewhere"})");
  // gamma0 has two entries, so K=4 must be reported as a prior error.
  CHECK(contains(error_of(j), "gamma0"));

  auto ok = j;
  ok["components"] = 2;
  const auto c = parse_config(ok);
  CHECK(c.model.num_arms() == 3);
  CHECK(c.components == std::vector<std::size_t>{2});
  CHECK(c.master_seed == 18446744073709551615ULL);
  CHECK(c.regressor_source == RegressorSource::PosteriorMean);
  CHECK(c.convergence.check_invariants);
  CHECK(c.resolved_priors(2).arms[2].concentration == std::vector<double>{0.5, 1.0});
  CHECK(parse_config(to_json(c)) == c);

  const auto b = parse_config(json{{"scenario", "A"}, {"components", {1, 3}}});
  CHECK(parse_config(to_json(b)) == b);
}

TEST_CASE("every problem in a config is reported at once") {
  const auto msg = error_of(json::parse(R"({
    "horizon": 0, "realizations": 0, "components": [0], "update_every": 0,
    "estimator": "greedy", "colour": "blue",
    "convergence": {"tolerance": -1}, "output_dir": ""})"));
  CAPTURE(msg);
  CHECK(contains(msg, "unknown key \"colour\""));
  CHECK(contains(msg, "estimator"));
  CHECK(contains(msg, "horizon"));
  CHECK(contains(msg, "realizations"));
  CHECK(contains(msg, "every K"));
  CHECK(contains(msg, "update_every"));
  CHECK(contains(msg, "tolerance"));
  CHECK(contains(msg, "output_dir"));
}

TEST_CASE("model, context and prior problems are configuration errors") {
  CHECK(contains(error_of(json{{"scenario", "Z"}}), "scenario"));
  CHECK(contains(error_of(json::parse(R"({"context": {"kind": "uniform_iid", "low": [0, 0, 0]}})")),
                 "context"));
  CHECK(contains(error_of(json::parse(R"({"context": {"kind": "fixed_sequence",
                                          "sequence": [[0, 1]]}, "horizon": 2})")),
                 "horizon needs 2"));
  CHECK(contains(error_of(json::parse(R"({"priors": {"V0": [[1, 2], [2, 1]]}})")), "V0"));
  CHECK(contains(error_of(json::parse(R"({"horizon": "long"})")), "horizon"));
  CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
}

TEST_CASE("profiles override the scale only") {
  auto c = parse_config(json{{"horizon", 10}, {"realizations", 3}, {"master_seed", 5}});
  apply_profile(c, "paper");
  CHECK(c.horizon == 500);
  CHECK(c.realizations == 5000);
  CHECK(c.master_seed == 5);
  apply_profile(c, "desk");
  CHECK(c.realizations == 500);
  CHECK_THROWS_AS(apply_profile(c, "huge"), ConfigError);
}

TEST_CASE("load_config reads files and reports malformed JSON") {
  const auto dir = std::filesystem::temp_directory_path() / "vts_test_config";
  std::filesystem::create_directories(dir);
  const auto good = dir / "good.json";
  std::ofstream(good) << R"({"scenario": "A", "horizon": 12})";
  CHECK(load_config(good.string()).horizon == 12);
  const auto bad = dir / "bad.json";
  std::ofstream(bad) << R"({"scenario": )";
  CHECK_THROWS_AS(load_config(bad.string()), ConfigError);
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("built-in scenarios are listed in the custom layout") {
  const auto j = builtin_scenarios_json();
  auto a = j.at("A");
  a["scenario"] = "custom";
  CHECK(model_from_json(a) == scenario_a());
  auto b = j.at("B");
  b["scenario"] = "custom";
  CHECK(model_from_json(b) == scenario_b());
}
