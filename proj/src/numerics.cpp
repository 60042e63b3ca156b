#include "vts/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace vts {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_id) noexcept {
  return mix64(mix64(master_seed) ^ mix64(stream_id + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t a, std::uint64_t b) noexcept {
  return derive_seed(derive_seed(master_seed, a), b);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : seed_(derive_seed(master_seed, stream_id)), stream_id_(stream_id), engine_(seed_) {}

double RngStream::uniform() {
  // (k + 0.5) / 2^53 never hits 0 or 1
  const std::uint64_t k = engine_() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double low, double high) { return low + (high - low) * uniform(); }

double RngStream::standard_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  // Marsaglia polar method
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::size_t RngStream::index(std::size_t n) {
  if (n == 0) throw DomainError("RngStream::index: empty range");
  const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return std::min(i, n - 1);
}

RngStream RngStream::split(std::uint64_t child_id) const { return RngStream(seed_, child_id); }

double digamma(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError("digamma: argument must be positive and finite, got " + std::to_string(x));
  }
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli terms B_2n / (2n x^2n), n = 1..7
  const double series =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 -
                                      inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12))))));
  return result + std::log(x) - 0.5 * inv - series;
}

namespace {

void check_gamma_args(double shape, double rate) {
  if (!(shape > 0.0) || !std::isfinite(shape) || !(rate > 0.0) || !std::isfinite(rate)) {
    throw DomainError("sample_gamma: shape and rate must be positive and finite (shape=" +
                      std::to_string(shape) + ", rate=" + std::to_string(rate) + ")");
  }
}

// Marsaglia-Tsang for shape >= 1, unit rate.
double marsaglia_tsang(double shape, RngStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

double sample_gamma(double shape, double rate, RngStream& rng) {
  check_gamma_args(shape, rate);
  if (shape >= 1.0) return marsaglia_tsang(shape, rng) / rate;
  return std::exp(sample_log_gamma(shape, rng)) / rate;
}

double sample_log_gamma(double shape, RngStream& rng) {
  check_gamma_args(shape, 1.0);
  if (shape >= 1.0) return std::log(marsaglia_tsang(shape, rng));
  // boost: G(a) = G(a + 1) * U^(1/a)
  const double g = marsaglia_tsang(shape + 1.0, rng);
  return std::log(g) + std::log(rng.uniform()) / shape;
}

std::vector<double> sample_dirichlet(std::span<const double> concentrations, RngStream& rng) {
  if (concentrations.empty()) throw DomainError("sample_dirichlet: empty concentration vector");
  for (double c : concentrations) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw DomainError("sample_dirichlet: concentrations must be positive, got " +
                        std::to_string(c));
    }
  }
  if (concentrations.size() == 1) return {1.0};

  std::vector<double> logs(concentrations.size());
  for (std::size_t k = 0; k < concentrations.size(); ++k) {
    logs[k] = sample_log_gamma(concentrations[k], rng);
  }
  const double norm = log_sum_exp(logs);
  std::vector<double> out(logs.size());
  double total = 0.0;
  for (std::size_t k = 0; k < logs.size(); ++k) {
    out[k] = std::exp(logs[k] - norm);
    total += out[k];
  }
  for (double& p : out) p /= total;
  return out;
}

std::size_t sample_categorical(std::span<const double> probabilities, RngStream& rng) {
  if (probabilities.empty()) throw DomainError("sample_categorical: empty probability vector");
  if (probabilities.size() == 1) return 0;
  const double total = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DomainError("sample_categorical: probabilities must have a positive finite sum");
  }
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    acc += probabilities[k];
    if (u < acc) return k;
  }
  return probabilities.size() - 1;
}

PDMatrix::PDMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw LinearAlgebraError("PDMatrix: matrix must be square and non-empty");
  }
  if (!m_.allFinite()) throw LinearAlgebraError("PDMatrix: non-finite entries");
  const double scale = std::max(m_.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw LinearAlgebraError("PDMatrix: matrix is not symmetric");
  }
  llt_.compute(m_);
  if (llt_.info() != Eigen::Success) {
    throw LinearAlgebraError("PDMatrix: Cholesky factorization failed (not positive definite)");
  }
}

bool PDMatrix::operator==(const PDMatrix& other) const { return same_values(m_, other.m_); }

PDMatrix PDMatrix::identity(Eigen::Index dim) { return PDMatrix(Matrix::Identity(dim, dim)); }

Matrix PDMatrix::inverse() const {
  Matrix inv = llt_.solve(Matrix::Identity(dim(), dim()));
  return 0.5 * (inv + inv.transpose());
}

double PDMatrix::log_det() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

Vector solve_pd(const PDMatrix& a, const Vector& b) {
  if (b.size() != a.dim()) throw LinearAlgebraError("solve_pd: dimension mismatch");
  return a.llt().solve(b);
}

Matrix solve_pd(const PDMatrix& a, const Matrix& b) {
  if (b.rows() != a.dim()) throw LinearAlgebraError("solve_pd: dimension mismatch");
  return a.llt().solve(b);
}

NigDraw sample_normal_inverse_gamma(const Vector& u, const PDMatrix& scale, double alpha,
                                    double beta, RngStream& rng) {
  if (u.size() != scale.dim()) {
    throw LinearAlgebraError("sample_normal_inverse_gamma: mean and scale dimensions differ");
  }
  const double sigma2 = 1.0 / sample_gamma(alpha, beta, rng);
  Vector z(u.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.standard_normal();
  // Cholesky factor of sigma2 * V is sqrt(sigma2) * L
  const Vector lz = scale.llt().matrixL() * z;
  Vector w = u + std::sqrt(sigma2) * lz;
  return {std::move(w), sigma2};
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - m);
  return m + std::log(sum);
}

bool same_values(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

bool same_values(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.size() == 0 || a == b);
}

}  // namespace vts
