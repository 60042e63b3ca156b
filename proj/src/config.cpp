#include "vts/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace vts {

using nlohmann::json;

BanditConfig ExperimentConfig::bandit_config(std::size_t components_per_arm) const {
  return BanditConfig::uniform(model.num_arms(), model.context_dim(), components_per_arm);
}

PriorHyperparams ExperimentConfig::resolved_priors(std::size_t components_per_arm) const {
  return priors_from_json(priors, bandit_config(components_per_arm));
}

std::vector<std::string> ExperimentConfig::validation_errors() const {
  std::vector<std::string> errors;
  auto guard = [&](auto&& check) {
    try {
      check();
    } catch (const std::exception& e) {
      errors.emplace_back(e.what());
    }
  };
  guard([&] { model.validate(); });
  if (context.dim() != model.context_dim()) {
    errors.push_back("context dimension " + std::to_string(context.dim()) +
                     " does not match model dimension " + std::to_string(model.context_dim()));
  }
  if (horizon < 1) errors.emplace_back("horizon must be >= 1");
  if (realizations < 1) errors.emplace_back("realizations must be >= 1");
  if (components.empty()) errors.emplace_back("components must list at least one K");
  for (std::size_t k : components) {
    if (k < 1) errors.emplace_back("components: every K must be >= 1");
  }
  if (update_every < 1) errors.emplace_back("update_every must be >= 1");
  guard([&] { convergence.validate(); });
  if (context.kind() == ContextGenerator::Kind::FixedSequence &&
      context.sequence().size() < horizon) {
    errors.push_back("context.sequence has " + std::to_string(context.sequence().size()) +
                     " vectors, horizon needs " + std::to_string(horizon));
  }
  if (output_dir.empty()) errors.emplace_back("output_dir must not be empty");
  if (errors.empty()) {
    for (std::size_t k : components) guard([&] { (void)resolved_priors(k); });
  }
  return errors;
}

namespace {

std::string join(const std::vector<std::string>& errors) {
  std::ostringstream out;
  out << errors.size() << " configuration error" << (errors.size() == 1 ? "" : "s") << ":";
  for (const auto& e : errors) out << "\n  - " << e;
  return out.str();
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto errors = validation_errors();
  if (!errors.empty()) throw ConfigError(join(errors));
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  std::vector<std::string> errors;
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");

  static const std::set<std::string> known = {
      "scenario", "arms",     "context",        "horizon",      "realizations",
      "components", "priors", "estimator",      "regressor_source", "convergence",
      "master_seed", "update_every", "shared_context", "output_dir"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) errors.push_back("unknown key \"" + key + "\"");
  }

  auto field = [&](const char* name, auto&& apply) {
    if (!j.contains(name)) return;
    try {
      apply(j[name]);
    } catch (const std::exception& e) {
      errors.push_back(std::string(name) + ": " + e.what());
    }
  };

  bool model_ok = true;
  try {
    c.scenario = j.value("scenario", std::string("B"));
    c.model = model_from_json(j);
  } catch (const std::exception& e) {
    errors.push_back(std::string("scenario: ") + e.what());
    model_ok = false;
  }
  const std::size_t dim = model_ok ? c.model.context_dim() : 2;
  c.context = ContextGenerator::uniform(dim);
  field("context", [&](const json& v) { c.context = context_from_json(v, dim); });
  field("horizon", [&](const json& v) { c.horizon = v.get<std::size_t>(); });
  field("realizations", [&](const json& v) { c.realizations = v.get<std::size_t>(); });
  field("components", [&](const json& v) {
    c.components = v.is_number() ? std::vector<std::size_t>{v.get<std::size_t>()}
                                 : v.get<std::vector<std::size_t>>();
  });
  field("priors", [&](const json& v) {
    if (!v.is_object()) throw ConfigError("must be an object");
    c.priors = v;
  });
  field("estimator", [&](const json& v) { c.estimator = parse_estimator(v.get<std::string>()); });
  field("regressor_source", [&](const json& v) {
    c.regressor_source = parse_regressor_source(v.get<std::string>());
  });
  field("convergence", [&](const json& v) {
    c.convergence.tolerance = v.value("tolerance", c.convergence.tolerance);
    c.convergence.max_iterations = v.value("max_iterations", c.convergence.max_iterations);
    c.convergence.check_invariants = v.value("check_invariants", c.convergence.check_invariants);
  });
  field("master_seed", [&](const json& v) { c.master_seed = v.get<std::uint64_t>(); });
  field("update_every", [&](const json& v) { c.update_every = v.get<std::size_t>(); });
  field("shared_context", [&](const json& v) { c.shared_context = v.get<bool>(); });
  field("output_dir", [&](const json& v) { c.output_dir = v.get<std::string>(); });

  if (model_ok) {
    for (auto& e : c.validation_errors()) errors.push_back(std::move(e));
  }
  if (!errors.empty()) throw ConfigError(join(errors));
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j = c.scenario == "custom" ? model_to_json(c.model) : json{{"scenario", c.scenario}};
  j["context"] = context_to_json(c.context);
  j["horizon"] = c.horizon;
  j["realizations"] = c.realizations;
  j["components"] = c.components;
  j["priors"] = c.priors;
  j["estimator"] = to_string(c.estimator);
  j["regressor_source"] = to_string(c.regressor_source);
  j["convergence"] = json{{"tolerance", c.convergence.tolerance},
                          {"max_iterations", c.convergence.max_iterations},
                          {"check_invariants", c.convergence.check_invariants}};
  j["master_seed"] = c.master_seed;
  j["update_every"] = c.update_every;
  j["shared_context"] = c.shared_context;
  j["output_dir"] = c.output_dir;
  return j;
}

void apply_profile(ExperimentConfig& config, const std::string& profile) {
  if (profile == "desk") {
    config.horizon = 500;
    config.realizations = 500;
  } else if (profile == "paper") {
    config.horizon = 500;
    config.realizations = 5000;
  } else {
    throw ConfigError("unknown profile \"" + profile + "\" (expected desk or paper)");
  }
}

json builtin_scenarios_json() {
  json a = model_to_json(scenario_a());
  json b = model_to_json(scenario_b());
  return json{{"A", std::move(a)}, {"B", std::move(b)}};
}

}  // namespace vts
