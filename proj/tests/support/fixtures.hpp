#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "vts/environment.hpp"
#include "vts/model.hpp"
#include "vts/numerics.hpp"

namespace fixtures {

// n observations spread over `num_arms` arms, contexts U(0,1)^d, rewards from a random
// linear model per arm plus unit noise.
inline vts::InteractionHistory random_history(vts::RngStream& rng, std::size_t num_arms,
                                              std::size_t d, std::size_t n) {
  std::vector<vts::Vector> w(num_arms, vts::Vector(d));
  for (auto& v : w)
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.uniform(-3.0, 3.0);
  vts::InteractionHistory h(num_arms, d);
  for (std::size_t t = 0; t < n; ++t) {
    vts::Vector x(d);
    for (std::size_t i = 0; i < d; ++i) x(i) = rng.uniform();
    const std::size_t a = rng.index(num_arms);
    h.append(x, a, x.dot(w[a]) + rng.standard_normal());
  }
  return h;
}

// n pulls of one arm of `model` with U(0,1)^d contexts. `labels` receives the true
// component of every draw when given.
inline vts::InteractionHistory mixture_history(const vts::MixtureBanditModel& model,
                                               std::size_t arm, std::size_t n,
                                               vts::RngStream& rng,
                                               std::vector<std::size_t>* labels = nullptr) {
  const auto& m = model.arms.at(arm);
  const std::size_t d = model.context_dim();
  vts::InteractionHistory h(1, d);
  for (std::size_t t = 0; t < n; ++t) {
    vts::Vector x(d);
    for (std::size_t i = 0; i < d; ++i) x(i) = rng.uniform();
    const std::size_t z = vts::sample_categorical(m.weights, rng);
    const double y = x.dot(m.regressors[z]) + std::sqrt(m.variances[z]) * rng.standard_normal();
    h.append(x, 0, y);
    if (labels) labels->push_back(z);
  }
  return h;
}

}  // namespace fixtures
