#include "vts/environment.hpp"

#include <cmath>

#include "vts/model.hpp"

namespace vts {

using nlohmann::json;

bool ArmMixture::operator==(const ArmMixture& o) const {
  if (weights != o.weights || variances != o.variances) return false;
  if (regressors.size() != o.regressors.size()) return false;
  for (std::size_t k = 0; k < regressors.size(); ++k) {
    if (!same_values(regressors[k], o.regressors[k])) return false;
  }
  return true;
}

std::size_t MixtureBanditModel::context_dim() const {
  if (arms.empty() || arms.front().regressors.empty()) return 0;
  return static_cast<std::size_t>(arms.front().regressors.front().size());
}

void MixtureBanditModel::validate() const {
  if (arms.empty()) throw ConfigError("model must have at least one arm");
  const std::size_t d = context_dim();
  if (d == 0) throw ConfigError("model regressors must be non-empty");
  for (std::size_t a = 0; a < arms.size(); ++a) {
    const auto& arm = arms[a];
    const std::string where = "model.arms[" + std::to_string(a) + "]";
    const std::size_t K = arm.weights.size();
    if (K == 0 || arm.regressors.size() != K || arm.variances.size() != K) {
      throw ConfigError(where + ": weights, regressors and variances must have equal, "
                                "non-zero length");
    }
    double total = 0.0;
    for (double w : arm.weights) {
      if (!(w >= 0.0) || w > 1.0) throw ConfigError(where + ": weights must lie in [0, 1]");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw ConfigError(where + ": weights sum to " + std::to_string(total) + ", expected 1");
    }
    for (std::size_t k = 0; k < K; ++k) {
      if (static_cast<std::size_t>(arm.regressors[k].size()) != d) {
        throw ConfigError(where + ": regressors must all have dimension " + std::to_string(d));
      }
      if (!(arm.variances[k] > 0.0) || !std::isfinite(arm.variances[k])) {
        throw ConfigError(where + ": variances must be > 0");
      }
    }
  }
}

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

MixtureBanditModel scenario_a() {
  MixtureBanditModel m;
  m.arms.push_back({{0.5, 0.5}, {vec2(0, 0), vec2(1, 1)}, {1.0, 1.0}});
  m.arms.push_back({{0.5, 0.5}, {vec2(2, 2), vec2(3, 3)}, {1.0, 1.0}});
  return m;
}

MixtureBanditModel scenario_b() {
  MixtureBanditModel m;
  m.arms.push_back({{0.5, 0.5}, {vec2(1, 1), vec2(2, 2)}, {1.0, 1.0}});
  m.arms.push_back({{0.3, 0.7}, {vec2(0, 0), vec2(3, 3)}, {1.0, 1.0}});
  return m;
}

ContextGenerator ContextGenerator::uniform(std::size_t dim, double low, double high) {
  const auto d = static_cast<Eigen::Index>(dim);
  return uniform(Vector::Constant(d, low), Vector::Constant(d, high));
}

ContextGenerator ContextGenerator::uniform(Vector low, Vector high) {
  if (low.size() == 0 || low.size() != high.size()) {
    throw ConfigError("uniform context bounds must be non-empty and of equal dimension");
  }
  for (Eigen::Index i = 0; i < low.size(); ++i) {
    if (!(low[i] < high[i]) || !std::isfinite(low[i]) || !std::isfinite(high[i])) {
      throw ConfigError("uniform context bounds need low < high in every coordinate");
    }
  }
  ContextGenerator g;
  g.kind_ = Kind::UniformIid;
  g.low_ = std::move(low);
  g.high_ = std::move(high);
  return g;
}

ContextGenerator ContextGenerator::fixed_sequence(std::vector<Vector> sequence) {
  if (sequence.empty()) throw ConfigError("fixed context sequence must not be empty");
  for (const auto& v : sequence) {
    if (v.size() != sequence.front().size() || v.size() == 0) {
      throw ConfigError("fixed context sequence vectors must share a non-zero dimension");
    }
  }
  ContextGenerator g;
  g.kind_ = Kind::FixedSequence;
  g.sequence_ = std::move(sequence);
  return g;
}

std::size_t ContextGenerator::dim() const {
  if (kind_ == Kind::UniformIid) return static_cast<std::size_t>(low_.size());
  return static_cast<std::size_t>(sequence_.front().size());
}

Vector ContextGenerator::draw(RngStream& rng) {
  if (kind_ == Kind::FixedSequence) {
    if (cursor_ >= sequence_.size()) {
      throw SequenceError("fixed context sequence exhausted after " +
                          std::to_string(sequence_.size()) + " vectors");
    }
    return sequence_[cursor_++];
  }
  Vector x(low_.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(low_[i], high_[i]);
  return x;
}

bool ContextGenerator::operator==(const ContextGenerator& o) const {
  if (kind_ != o.kind_ || cursor_ != o.cursor_) return false;
  if (kind_ == Kind::UniformIid) return same_values(low_, o.low_) && same_values(high_, o.high_);
  if (sequence_.size() != o.sequence_.size()) return false;
  for (std::size_t i = 0; i < sequence_.size(); ++i) {
    if (!same_values(sequence_[i], o.sequence_[i])) return false;
  }
  return true;
}

Vector draw_context(ContextGenerator& gen, RngStream& rng) { return gen.draw(rng); }

double true_expected_reward(const MixtureBanditModel& model, std::size_t arm, const Vector& x) {
  const auto& m = model.arms.at(arm);
  double mu = 0.0;
  for (std::size_t k = 0; k < m.weights.size(); ++k) mu += m.weights[k] * x.dot(m.regressors[k]);
  return mu;
}

double draw_reward(const MixtureBanditModel& model, std::size_t arm, const Vector& x,
                   RngStream& rng) {
  const auto& m = model.arms.at(arm);
  if (static_cast<std::size_t>(x.size()) != model.context_dim()) {
    throw ConfigError("draw_reward: context dimension mismatch");
  }
  const std::size_t k = sample_categorical(m.weights, rng);
  return x.dot(m.regressors[k]) + std::sqrt(m.variances[k]) * rng.standard_normal();
}

MixtureBanditModel model_from_json(const json& j) {
  const std::string scenario = j.value("scenario", std::string("B"));
  if (scenario == "A") return scenario_a();
  if (scenario == "B") return scenario_b();
  if (scenario != "custom") {
    throw ConfigError("scenario must be \"A\", \"B\" or \"custom\", got \"" + scenario + "\"");
  }
  if (!j.contains("arms") || !j["arms"].is_array()) {
    throw ConfigError("custom scenario requires an \"arms\" array");
  }
  MixtureBanditModel m;
  try {
    for (const auto& ja : j["arms"]) {
      ArmMixture arm;
      arm.weights = ja.at("weights").get<std::vector<double>>();
      for (const auto& r : ja.at("regressors")) arm.regressors.push_back(vector_from_json(r));
      arm.variances = ja.at("variances").get<std::vector<double>>();
      m.arms.push_back(std::move(arm));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("custom scenario: ") + e.what());
  }
  m.validate();
  return m;
}

json model_to_json(const MixtureBanditModel& model) {
  json arms = json::array();
  for (const auto& arm : model.arms) {
    json regs = json::array();
    for (const auto& r : arm.regressors) regs.push_back(to_json_value(r));
    arms.push_back(json{{"weights", arm.weights},
                        {"regressors", std::move(regs)},
                        {"variances", arm.variances}});
  }
  return json{{"scenario", "custom"}, {"arms", std::move(arms)}};
}

json context_to_json(const ContextGenerator& gen) {
  if (gen.kind() == ContextGenerator::Kind::UniformIid) {
    return json{{"kind", "uniform_iid"},
                {"low", to_json_value(gen.low())},
                {"high", to_json_value(gen.high())}};
  }
  json seq = json::array();
  for (const auto& v : gen.sequence()) seq.push_back(to_json_value(v));
  return json{{"kind", "fixed_sequence"}, {"sequence", std::move(seq)}};
}

ContextGenerator context_from_json(const json& j, std::size_t dim) {
  const std::string kind = j.value("kind", std::string("uniform_iid"));
  const auto d = static_cast<Eigen::Index>(dim);
  if (kind == "uniform_iid") {
    auto bound = [&](const char* key, double fallback) -> Vector {
      if (!j.contains(key)) return Vector::Constant(d, fallback);
      if (j[key].is_number()) return Vector::Constant(d, j[key].get<double>());
      Vector v = vector_from_json(j[key]);
      if (v.size() != d) {
        throw ConfigError(std::string("context.") + key + " must have dimension " +
                          std::to_string(dim));
      }
      return v;
    };
    return ContextGenerator::uniform(bound("low", 0.0), bound("high", 1.0));
  }
  if (kind == "fixed_sequence") {
    std::vector<Vector> seq;
    for (const auto& v : j.at("sequence")) seq.push_back(vector_from_json(v));
    auto gen = ContextGenerator::fixed_sequence(std::move(seq));
    if (gen.dim() != dim) {
      throw ConfigError("context.sequence vectors must have dimension " + std::to_string(dim));
    }
    return gen;
  }
  throw ConfigError("context.kind must be \"uniform_iid\" or \"fixed_sequence\", got \"" + kind +
                    "\"");
}

}  // namespace vts
