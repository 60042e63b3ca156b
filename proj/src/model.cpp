#include "vts/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <string>

namespace vts {

using nlohmann::json;

BanditConfig BanditConfig::uniform(std::size_t num_arms, std::size_t context_dim,
                                   std::size_t components) {
  return {num_arms, context_dim, std::vector<std::size_t>(num_arms, components)};
}

void BanditConfig::validate() const {
  if (num_arms < 1) throw ConfigError("num_arms must be >= 1");
  if (context_dim < 1) throw ConfigError("context_dim must be >= 1");
  if (components_per_arm.size() != num_arms) {
    throw ConfigError("components_per_arm has " + std::to_string(components_per_arm.size()) +
                      " entries, expected num_arms = " + std::to_string(num_arms));
  }
  for (std::size_t a = 0; a < num_arms; ++a) {
    if (components_per_arm[a] < 1) {
      throw ConfigError("components_per_arm[" + std::to_string(a) + "] must be >= 1");
    }
  }
}

ComponentPrior::ComponentPrior(Vector mean, PDMatrix scale, double shape, double rate)
    : mean(std::move(mean)), scale(std::move(scale)), shape(shape), rate(rate) {
  precision = this->scale.inverse();
}

bool ComponentPrior::operator==(const ComponentPrior& o) const {
  return same_values(mean, o.mean) && scale == o.scale && shape == o.shape && rate == o.rate;
}

bool ComponentState::operator==(const ComponentState& o) const {
  return concentration == o.concentration && same_values(mean, o.mean) &&
         same_values(scale, o.scale) && same_values(precision, o.precision) &&
         shape == o.shape && rate == o.rate;
}

PriorHyperparams PriorHyperparams::broadcast(const BanditConfig& config, double gamma0,
                                             const Vector& u0, const PDMatrix& V0, double alpha0,
                                             double beta0) {
  config.validate();
  PriorHyperparams p;
  p.arms.resize(config.num_arms);
  const ComponentPrior component(u0, V0, alpha0, beta0);
  for (std::size_t a = 0; a < config.num_arms; ++a) {
    const std::size_t k = config.components(a);
    p.arms[a].concentration.assign(k, gamma0);
    p.arms[a].components.assign(k, component);
  }
  p.validate(config);
  return p;
}

PriorHyperparams PriorHyperparams::defaults(const BanditConfig& config) {
  config.validate();
  const auto d = static_cast<Eigen::Index>(config.context_dim);
  return broadcast(config, 0.1, Vector::Zero(d), PDMatrix::identity(d), 1.0, 1.0);
}

void PriorHyperparams::validate(const BanditConfig& config) const {
  config.validate();
  if (arms.size() != config.num_arms) {
    throw ConfigError("priors cover " + std::to_string(arms.size()) + " arms, config has " +
                      std::to_string(config.num_arms));
  }
  const auto d = static_cast<Eigen::Index>(config.context_dim);
  for (std::size_t a = 0; a < arms.size(); ++a) {
    const auto& arm = arms[a];
    const std::string where = "priors.arms[" + std::to_string(a) + "]";
    const std::size_t k = config.components(a);
    if (arm.concentration.size() != k || arm.components.size() != k) {
      throw ConfigError(where + ": expected " + std::to_string(k) + " components");
    }
    for (double g : arm.concentration) {
      if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError(where + ": gamma0 must be > 0");
    }
    for (const auto& c : arm.components) {
      if (c.mean.size() != d || c.scale.dim() != d) {
        throw ConfigError(where + ": u0/V0 must have dimension " + std::to_string(d));
      }
      if (!(c.shape > 0.0) || !(c.rate > 0.0) || !std::isfinite(c.shape) ||
          !std::isfinite(c.rate)) {
        throw ConfigError(where + ": alpha0 and beta0 must be > 0");
      }
      if (!c.mean.allFinite()) throw ConfigError(where + ": u0 must be finite");
    }
  }
}

double ArmState::total_concentration() const {
  double s = 0.0;
  for (const auto& c : components) s += c.concentration;
  return s;
}

double ArmResponsibilities::column_sum(std::size_t k) const {
  double s = 0.0;
  for (std::size_t t = 0; t < rows; ++t) s += values[t * cols + k];
  return s;
}

InteractionHistory::InteractionHistory(std::size_t num_arms, std::size_t context_dim)
    : context_dim_(context_dim), arm_steps_(num_arms) {
  if (num_arms < 1 || context_dim < 1) {
    throw ConfigError("InteractionHistory: num_arms and context_dim must be >= 1");
  }
}

void InteractionHistory::append(const Vector& context, std::size_t arm, double reward) {
  if (static_cast<std::size_t>(context.size()) != context_dim_) {
    throw ConfigError("InteractionHistory::append: context has dimension " +
                      std::to_string(context.size()) + ", expected " +
                      std::to_string(context_dim_));
  }
  if (arm >= arm_steps_.size()) {
    throw ConfigError("InteractionHistory::append: arm index " + std::to_string(arm) +
                      " out of range");
  }
  arm_steps_[arm].push_back(arms_.size());
  contexts_.insert(contexts_.end(), context.data(), context.data() + context.size());
  arms_.push_back(arm);
  rewards_.push_back(reward);
}

VariationalState init_state(const BanditConfig& config, const PriorHyperparams& priors) {
  priors.validate(config);
  VariationalState state;
  state.arms.resize(config.num_arms);
  for (std::size_t a = 0; a < config.num_arms; ++a) {
    const auto& prior = priors.arms[a];
    auto& arm = state.arms[a];
    arm.components.resize(prior.components.size());
    for (std::size_t k = 0; k < prior.components.size(); ++k) {
      const auto& p = prior.components[k];
      auto& c = arm.components[k];
      c.concentration = prior.concentration[k];
      c.mean = p.mean;
      c.scale = p.scale.matrix();
      c.precision = p.precision;
      c.shape = p.shape;
      c.rate = p.rate;
    }
  }
  return state;
}

// ---- binary serialization -------------------------------------------------------------

namespace {

constexpr std::uint32_t kStateMagic = 0x56545331;  // "VTS1"

class Writer {
 public:
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void vec(const Vector& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v[i]);
  }
  void mat(const Matrix& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) f64(m(i, j));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint64_t u64() {
    if (pos_ + 8 > in_.size()) throw ConfigError("deserialize_state: truncated input");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t count() {
    const std::uint64_t n = u64();
    if (n > (in_.size() - pos_) / 8 + 1) throw ConfigError("deserialize_state: bad length");
    return static_cast<std::size_t>(n);
  }
  Vector vec() {
    Vector v(static_cast<Eigen::Index>(count()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f64();
    return v;
  }
  Matrix mat() {
    const auto r = static_cast<Eigen::Index>(count());
    const auto c = static_cast<Eigen::Index>(count());
    Matrix m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = f64();
    return m;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const VariationalState& state) {
  Writer w;
  w.u64(kStateMagic);
  w.u64(state.arms.size());
  for (const auto& arm : state.arms) {
    w.u64(arm.symmetry_broken ? 1 : 0);
    w.u64(arm.components.size());
    for (const auto& c : arm.components) {
      w.f64(c.concentration);
      w.vec(c.mean);
      w.mat(c.scale);
      w.mat(c.precision);
      w.f64(c.shape);
      w.f64(c.rate);
    }
  }
  return w.take();
}

VariationalState deserialize_state(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.u64() != kStateMagic) throw ConfigError("deserialize_state: bad magic");
  VariationalState state;
  state.arms.resize(r.count());
  for (auto& arm : state.arms) {
    arm.symmetry_broken = r.u64() != 0;
    arm.components.resize(r.count());
    for (auto& c : arm.components) {
      c.concentration = r.f64();
      c.mean = r.vec();
      c.scale = r.mat();
      c.precision = r.mat();
      c.shape = r.f64();
      c.rate = r.f64();
    }
  }
  if (!r.done()) throw ConfigError("deserialize_state: trailing bytes");
  return state;
}

// ---- JSON -----------------------------------------------------------------------------

Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("expected a numeric array, got " + j.dump());
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError("expected a number, got " + j[i].dump());
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ConfigError("expected a nested numeric array (matrix), got " + j.dump());
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Vector row = vector_from_json(j[static_cast<std::size_t>(i)]);
    if (row.size() != cols) throw ConfigError("ragged matrix rows in " + j.dump());
    m.row(i) = row.transpose();
  }
  return m;
}

json to_json_value(const Vector& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

json to_json_value(const Matrix& m) {
  json j = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    j.push_back(std::move(row));
  }
  return j;
}

void to_json(json& j, const BanditConfig& config) {
  j = json{{"num_arms", config.num_arms},
           {"context_dim", config.context_dim},
           {"components_per_arm", config.components_per_arm}};
}

void from_json(const json& j, BanditConfig& config) {
  try {
    config.num_arms = j.at("num_arms").get<std::size_t>();
    config.context_dim = j.at("context_dim").get<std::size_t>();
    const auto& k = j.at("components_per_arm");
    if (k.is_number()) {
      config.components_per_arm.assign(config.num_arms, k.get<std::size_t>());
    } else {
      config.components_per_arm = k.get<std::vector<std::size_t>>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("BanditConfig: ") + e.what());
  }
  config.validate();
}

namespace {

json component_prior_json(const ComponentPrior& c) {
  return json{{"u0", to_json_value(c.mean)},
              {"V0", to_json_value(c.scale.matrix())},
              {"alpha0", c.shape},
              {"beta0", c.rate}};
}

ComponentPrior component_prior_from(const json& j, const ComponentPrior& fallback) {
  Vector u0 = j.contains("u0") ? vector_from_json(j["u0"]) : fallback.mean;
  PDMatrix V0 = fallback.scale;
  if (j.contains("V0")) {
    try {
      V0 = PDMatrix(matrix_from_json(j["V0"]));
    } catch (const LinearAlgebraError& e) {
      throw ConfigError(std::string("V0: ") + e.what());
    }
  }
  const double alpha0 = j.contains("alpha0") ? j["alpha0"].get<double>() : fallback.shape;
  const double beta0 = j.contains("beta0") ? j["beta0"].get<double>() : fallback.rate;
  return ComponentPrior(std::move(u0), std::move(V0), alpha0, beta0);
}

std::vector<double> concentration_from(const json& j, std::size_t k) {
  if (j.is_number()) return std::vector<double>(k, j.get<double>());
  auto v = j.get<std::vector<double>>();
  if (v.size() != k) {
    throw ConfigError("gamma0 vector has " + std::to_string(v.size()) + " entries, expected " +
                      std::to_string(k));
  }
  return v;
}

}  // namespace

json priors_to_json(const PriorHyperparams& priors) {
  json arms = json::array();
  for (const auto& arm : priors.arms) {
    json comps = json::array();
    for (const auto& c : arm.components) comps.push_back(component_prior_json(c));
    arms.push_back(json{{"gamma0", arm.concentration}, {"components", std::move(comps)}});
  }
  return json{{"arms", std::move(arms)}};
}

PriorHyperparams priors_from_json(const json& j, const BanditConfig& config) {
  config.validate();
  const auto d = static_cast<Eigen::Index>(config.context_dim);
  const ComponentPrior base(Vector::Zero(d), PDMatrix::identity(d), 1.0, 1.0);
  PriorHyperparams p;
  p.arms.resize(config.num_arms);
  try {
    if (!j.is_object()) throw ConfigError("priors must be a JSON object");
    if (j.contains("arms")) {
      const auto& arms = j["arms"];
      if (!arms.is_array() || arms.size() != config.num_arms) {
        throw ConfigError("priors.arms must list exactly " + std::to_string(config.num_arms) +
                          " arms");
      }
      for (std::size_t a = 0; a < config.num_arms; ++a) {
        const std::size_t k = config.components(a);
        const auto& ja = arms[a];
        p.arms[a].concentration = concentration_from(ja.value("gamma0", json(0.1)), k);
        const auto& comps = ja.at("components");
        if (!comps.is_array() || comps.size() != k) {
          throw ConfigError("priors.arms[" + std::to_string(a) + "].components must have " +
                            std::to_string(k) + " entries");
        }
        for (const auto& jc : comps) p.arms[a].components.push_back(component_prior_from(jc, base));
      }
    } else {
      const ComponentPrior shared = component_prior_from(j, base);
      for (std::size_t a = 0; a < config.num_arms; ++a) {
        const std::size_t k = config.components(a);
        p.arms[a].concentration = concentration_from(j.value("gamma0", json(0.1)), k);
        p.arms[a].components.assign(k, shared);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("priors: ") + e.what());
  }
  p.validate(config);
  return p;
}

}  // namespace vts
