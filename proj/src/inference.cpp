#include "vts/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <omp.h>

namespace vts {

void ConvergenceSettings::validate() const {
  if (!(tolerance > 0.0) || !std::isfinite(tolerance)) {
    throw ConfigError("convergence tolerance must be > 0");
  }
  if (max_iterations < 1) throw ConfigError("convergence max_iterations must be >= 1");
}

namespace {

std::string where(std::size_t arm, std::size_t k) {
  return "arm " + std::to_string(arm) + ", component " + std::to_string(k);
}

// Per-component terms of the log-responsibility that do not depend on the datum.
struct ComponentTerms {
  double offset;     // -1/2 (ln beta - psi(alpha)) + psi(gamma_k) - psi(sum gamma)
  double precision;  // alpha / beta
  const double* mean;
  const double* scale;  // column-major d x d
};

std::vector<ComponentTerms> component_terms(const ArmState& arm_state, std::size_t arm) {
  const auto& comps = arm_state.components;
  double total = 0.0;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const auto& c = comps[k];
    if (!(c.rate > 0.0) || !std::isfinite(c.rate) || !(c.shape > 0.0) ||
        !(c.concentration > 0.0) || !std::isfinite(c.concentration)) {
      throw NumericalError("compute_responsibilities: invalid variational parameters at " +
                           where(arm, k) + " (gamma=" + std::to_string(c.concentration) +
                           ", alpha=" + std::to_string(c.shape) +
                           ", beta=" + std::to_string(c.rate) + ")");
    }
    total += c.concentration;
  }
  const double psi_total = digamma(total);
  std::vector<ComponentTerms> terms;
  terms.reserve(comps.size());
  for (const auto& c : comps) {
    terms.push_back({-0.5 * (std::log(c.rate) - digamma(c.shape)) + digamma(c.concentration) -
                         psi_total,
                     c.shape / c.rate, c.mean.data(), c.scale.data()});
  }
  return terms;
}

// Returns false if a log-responsibility was not finite.
bool responsibility_row(std::span<const double> x, double y,
                        const std::vector<ComponentTerms>& terms, double* out) {
  const std::size_t d = x.size();
  const std::size_t K = terms.size();
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < K; ++k) {
    const auto& c = terms[k];
    double quad = 0.0;
    double fit = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double sx = 0.0;
      for (std::size_t i = 0; i < d; ++i) sx += c.scale[j * d + i] * x[i];
      quad += x[j] * sx;
      fit += x[j] * c.mean[j];
    }
    const double resid = y - fit;
    const double lr = c.offset - 0.5 * (quad + resid * resid * c.precision);
    if (!std::isfinite(lr)) return false;
    out[k] = lr;
    max_log = std::max(max_log, lr);
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    out[k] = std::exp(out[k] - max_log);
    sum += out[k];
  }
  for (std::size_t k = 0; k < K; ++k) out[k] /= sum;
  return true;
}

}  // namespace

ArmResponsibilities compute_responsibilities(const InteractionHistory& history,
                                             const VariationalState& state, std::size_t arm,
                                             KernelMode mode) {
  const auto& arm_state = state.arms.at(arm);
  const auto& steps = history.steps_of(arm);
  const std::size_t K = arm_state.components.size();
  ArmResponsibilities resp(steps.size(), K);
  const auto terms = component_terms(arm_state, arm);
  if (K == 1) {
    std::fill(resp.values.begin(), resp.values.end(), 1.0);
    return resp;
  }

  const auto rows = static_cast<std::ptrdiff_t>(steps.size());
  std::ptrdiff_t bad_row = -1;
  if (mode == KernelMode::Parallel && steps.size() >= kParallelRowThreshold) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < rows; ++t) {
      const std::size_t step = steps[static_cast<std::size_t>(t)];
      if (!responsibility_row(history.context(step), history.reward(step), terms,
                              resp.values.data() + t * static_cast<std::ptrdiff_t>(K))) {
#pragma omp critical(vts_bad_row)
        bad_row = bad_row < 0 ? t : std::min(bad_row, t);
      }
    }
  } else {
    for (std::ptrdiff_t t = 0; t < rows && bad_row < 0; ++t) {
      const std::size_t step = steps[static_cast<std::size_t>(t)];
      if (!responsibility_row(history.context(step), history.reward(step), terms,
                              resp.values.data() + t * static_cast<std::ptrdiff_t>(K))) {
        bad_row = t;
      }
    }
  }
  if (bad_row >= 0) {
    throw NumericalError("compute_responsibilities: non-finite log-responsibility for arm " +
                         std::to_string(arm) + " at history step " +
                         std::to_string(steps[static_cast<std::size_t>(bad_row)]));
  }
  return resp;
}

std::vector<WeightedStats> accumulate_stats(const InteractionHistory& history,
                                            const ArmResponsibilities& resp, std::size_t arm) {
  const auto& steps = history.steps_of(arm);
  if (resp.rows != steps.size()) {
    throw ConfigError("accumulate_stats: responsibilities have " + std::to_string(resp.rows) +
                      " rows, arm has " + std::to_string(steps.size()) + " observations");
  }
  const auto d = static_cast<Eigen::Index>(history.context_dim());
  std::vector<WeightedStats> stats(resp.cols);
  for (auto& s : stats) {
    s.xx = Matrix::Zero(d, d);
    s.xy = Vector::Zero(d);
  }
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const auto x = history.context(steps[t]);
    const double y = history.reward(steps[t]);
    for (std::size_t k = 0; k < resp.cols; ++k) {
      const double r = resp(t, k);
      auto& s = stats[k];
      s.count += r;
      s.yy += r * y * y;
      for (Eigen::Index j = 0; j < d; ++j) {
        const double rxj = r * x[static_cast<std::size_t>(j)];
        s.xy[j] += rxj * y;
        for (Eigen::Index i = j; i < d; ++i) s.xx(i, j) += rxj * x[static_cast<std::size_t>(i)];
      }
    }
  }
  for (auto& s : stats) s.xx.triangularView<Eigen::StrictlyUpper>() = s.xx.transpose();
  return stats;
}

ArmState update_parameters(const InteractionHistory& history, const ArmResponsibilities& resp,
                           const PriorHyperparams& priors, std::size_t arm,
                           UpdateDiagnostics* diagnostics) {
  const auto& prior = priors.arms.at(arm);
  if (resp.cols != prior.components.size()) {
    throw ConfigError("update_parameters: responsibilities have " + std::to_string(resp.cols) +
                      " columns, arm " + std::to_string(arm) + " has " +
                      std::to_string(prior.components.size()) + " components");
  }
  const auto stats = accumulate_stats(history, resp, arm);
  const auto d = static_cast<Eigen::Index>(history.context_dim());

  ArmState out;
  out.components.resize(prior.components.size());
  for (std::size_t k = 0; k < prior.components.size(); ++k) {
    const auto& p = prior.components[k];
    const auto& s = stats[k];
    auto& c = out.components[k];
    if (resp.rows == 0) {
      c.concentration = prior.concentration[k];
      c.mean = p.mean;
      c.scale = p.scale.matrix();
      c.precision = p.precision;
      c.shape = p.shape;
      c.rate = p.rate;
      continue;
    }

    c.precision = s.xx + p.precision;
    const Eigen::LLT<Matrix> llt(c.precision);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("update_parameters: posterior precision not positive definite at " +
                           where(arm, k));
    }
    const Vector prior_term = p.precision * p.mean;
    const Vector rhs = s.xy + prior_term;
    c.mean = llt.solve(rhs);
    const Matrix scale = llt.solve(Matrix::Identity(d, d));
    c.scale = 0.5 * (scale + scale.transpose());

    c.concentration = prior.concentration[k] + s.count;
    c.shape = p.shape + 0.5 * s.count;
    c.rate = p.rate + 0.5 * s.yy + 0.5 * (p.mean.dot(prior_term) - c.mean.dot(rhs));
    if (!std::isfinite(c.rate) || !c.mean.allFinite()) {
      throw NumericalError("update_parameters: non-finite posterior at " + where(arm, k));
    }
    if (c.rate < 1e-12) {
      c.rate = 1e-12;
      if (diagnostics) ++diagnostics->rate_clamps;
    }
  }
  return out;
}

namespace {

void jitter_rows(ArmResponsibilities& resp, RngStream& rng) {
  const std::vector<double> noise_concentration(resp.cols, 10.0);
  for (std::size_t t = 0; t < resp.rows; ++t) {
    const auto noise = sample_dirichlet(noise_concentration, rng);
    double sum = 0.0;
    for (std::size_t k = 0; k < resp.cols; ++k) {
      resp(t, k) *= noise[k];
      sum += resp(t, k);
    }
    for (std::size_t k = 0; k < resp.cols; ++k) resp(t, k) /= sum;
  }
}

double max_abs_change(const ArmResponsibilities& a, const ArmResponsibilities& b) {
  double delta = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    delta = std::max(delta, std::abs(a.values[i] - b.values[i]));
  }
  return delta;
}

}  // namespace

InferenceResult run_inference(const InteractionHistory& history, const VariationalState& state,
                              const PriorHyperparams& priors, const InferenceOptions& options) {
  options.settings.validate();
  if (state.num_arms() != history.num_arms() || priors.arms.size() != history.num_arms()) {
    throw ConfigError("run_inference: state, priors and history disagree on the number of arms");
  }

  InferenceResult result;
  result.state = state;
  result.responsibilities.arms.resize(state.num_arms());

  Responsibilities previous;
  for (std::size_t sweep = 1; sweep <= options.settings.max_iterations; ++sweep) {
    double delta = 0.0;
    UpdateDiagnostics diagnostics;
    for (std::size_t a = 0; a < state.num_arms(); ++a) {
      auto resp = compute_responsibilities(history, result.state, a, options.mode);
      auto& arm_state = result.state.arms[a];
      bool broken = arm_state.symmetry_broken;
      if (options.jitter_rng && !broken && resp.cols > 1 && resp.rows > 0) {
        jitter_rows(resp, *options.jitter_rng);
        broken = true;
      }
      arm_state = update_parameters(history, resp, priors, a, &diagnostics);
      arm_state.symmetry_broken = broken;

      if (sweep == 1) {
        // nothing to compare against; mixtures with data always take a second sweep
        if (resp.cols > 1 && resp.rows > 0) delta = std::numeric_limits<double>::infinity();
      } else {
        delta = std::max(delta, max_abs_change(resp, previous.arms[a]));
      }
      result.responsibilities.arms[a] = std::move(resp);
    }
    result.rate_clamps += diagnostics.rate_clamps;
    result.iterations = sweep;
    result.final_delta = delta;

    if (options.settings.check_invariants) {
      check_inference_invariants(history, result.state, result.responsibilities, priors);
      ++result.invariant_checks;
    }
    if (options.observer) options.observer(sweep, result.state, result.responsibilities);
    if (delta < options.settings.tolerance) {
      result.converged = true;
      break;
    }
    previous = result.responsibilities;
  }
  return result;
}

void check_inference_invariants(const InteractionHistory& history, const VariationalState& state,
                                const Responsibilities& resp, const PriorHyperparams& priors) {
  for (std::size_t a = 0; a < state.num_arms(); ++a) {
    const auto& r = resp.arms.at(a);
    if (r.rows != history.count(a)) {
      throw InvariantError("arm " + std::to_string(a) + ": responsibility rows (" +
                           std::to_string(r.rows) + ") != observations (" +
                           std::to_string(history.count(a)) + ")");
    }
    for (std::size_t t = 0; t < r.rows; ++t) {
      double sum = 0.0;
      for (double v : r.row(t)) {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw InvariantError("arm " + std::to_string(a) + ": responsibility outside [0,1]");
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        throw InvariantError("arm " + std::to_string(a) + ", row " + std::to_string(t) +
                             ": responsibilities sum to " + std::to_string(sum));
      }
    }
    double mass = 0.0;
    const auto& comps = state.arms[a].components;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      mass += comps[k].concentration - priors.arms[a].concentration[k];
    }
    if (std::abs(mass - static_cast<double>(history.count(a))) > 1e-9) {
      throw InvariantError("arm " + std::to_string(a) + ": responsibility mass " +
                           std::to_string(mass) + " != observation count " +
                           std::to_string(history.count(a)));
    }
  }
}

double elbo_diagnostic(const InteractionHistory& history, const VariationalState& state,
                       const ArmResponsibilities& resp, const PriorHyperparams& priors,
                       std::size_t arm) {
  const auto& comps = state.arms.at(arm).components;
  const auto& prior = priors.arms.at(arm);
  const auto& steps = history.steps_of(arm);
  const std::size_t K = comps.size();
  const auto d = static_cast<Eigen::Index>(history.context_dim());
  const double log_2pi = std::log(2.0 * std::numbers::pi);

  double total_conc = 0.0;
  double total_conc0 = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    total_conc += comps[k].concentration;
    total_conc0 += prior.concentration[k];
  }
  const double psi_total = digamma(total_conc);

  double elbo = 0.0;

  // E[ln p(y | z, w, sigma2)] + E[ln p(z | pi)] - E[ln q(z)]
  for (std::size_t k = 0; k < K; ++k) {
    const auto& c = comps[k];
    const double e_log_var = std::log(c.rate) - digamma(c.shape);
    const double e_prec = c.shape / c.rate;
    const double e_log_weight = digamma(c.concentration) - psi_total;
    for (std::size_t t = 0; t < steps.size(); ++t) {
      const double r = resp(t, k);
      if (r == 0.0) continue;
      const auto xs = history.context(steps[t]);
      const Eigen::Map<const Vector> x(xs.data(), d);
      const double resid = history.reward(steps[t]) - x.dot(c.mean);
      const double e_sq = x.dot(c.scale * x) + resid * resid * e_prec;
      elbo += r * (-0.5 * log_2pi - 0.5 * e_log_var - 0.5 * e_sq + e_log_weight);
      elbo -= r * std::log(r);
    }
  }

  // -KL(Dir(gamma~) || Dir(gamma0))
  double kl_dir = std::lgamma(total_conc) - std::lgamma(total_conc0);
  for (std::size_t k = 0; k < K; ++k) {
    const double g = comps[k].concentration;
    const double g0 = prior.concentration[k];
    kl_dir += -std::lgamma(g) + std::lgamma(g0) + (g - g0) * (digamma(g) - psi_total);
  }
  elbo -= kl_dir;

  // -KL(NIG(u~, V~, alpha~, beta~) || NIG(u0, V0, alpha0, beta0))
  for (std::size_t k = 0; k < K; ++k) {
    const auto& c = comps[k];
    const auto& p = prior.components[k];
    const double a = c.shape, b = c.rate, a0 = p.shape, b0 = p.rate;
    const double kl_gamma = (a - a0) * digamma(a) - std::lgamma(a) + std::lgamma(a0) +
                            a0 * (std::log(b) - std::log(b0)) + a * (b0 - b) / b;
    const Eigen::LLT<Matrix> llt(c.precision);
    const double log_det_scale = -2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const Vector diff = p.mean - c.mean;
    const double kl_normal =
        0.5 * ((p.precision * c.scale).trace() + (a / b) * diff.dot(p.precision * diff) -
               static_cast<double>(d) + p.scale.log_det() - log_det_scale);
    elbo -= kl_gamma + kl_normal;
  }
  return elbo;
}

}  // namespace vts
