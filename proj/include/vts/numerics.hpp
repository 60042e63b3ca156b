#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "vts/error.hpp"

namespace vts {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// SplitMix64 finalizer. Used to derive independent stream seeds from a master seed.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Counter-based seed derivation: the result depends only on the arguments, in order.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_id) noexcept;
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t a, std::uint64_t b) noexcept;

// Deterministic random stream. One owner at a time; copies replay the same sequence.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double uniform(double low, double high);
  double standard_normal();
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  // A child stream seeded from this stream's identity and `child_id`, independent of
  // how many draws this stream has already produced.
  RngStream split(std::uint64_t child_id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

double digamma(double x);

double sample_gamma(double shape, double rate, RngStream& rng);
// log of a Gamma(shape, 1) draw; stays finite for very small shapes where the draw
// itself underflows.
double sample_log_gamma(double shape, RngStream& rng);
std::vector<double> sample_dirichlet(std::span<const double> concentrations, RngStream& rng);
std::size_t sample_categorical(std::span<const double> probabilities, RngStream& rng);

// Symmetric positive definite matrix with its Cholesky factor.
class PDMatrix {
 public:
  PDMatrix() = default;
  explicit PDMatrix(Matrix m);

  static PDMatrix identity(Eigen::Index dim);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  Matrix lower() const { return llt_.matrixL(); }
  const Eigen::LLT<Matrix>& llt() const noexcept { return llt_; }
  Matrix inverse() const;
  double log_det() const;

  bool operator==(const PDMatrix& other) const;

 private:
  Matrix m_;
  Eigen::LLT<Matrix> llt_;
};

Vector solve_pd(const PDMatrix& a, const Vector& b);
Matrix solve_pd(const PDMatrix& a, const Matrix& b);

struct NigDraw {
  Vector w;
  double sigma2;
};

// sigma2 ~ InverseGamma(alpha, beta), then w ~ Normal(u, sigma2 * V).
NigDraw sample_normal_inverse_gamma(const Vector& u, const PDMatrix& scale, double alpha,
                                    double beta, RngStream& rng);

// log(sum(exp(values))) with max subtraction. Empty input gives -inf.
double log_sum_exp(std::span<const double> values);

// Exact equality that tolerates shape mismatch (returns false instead of asserting).
bool same_values(const Matrix& a, const Matrix& b);
bool same_values(const Vector& a, const Vector& b);

}  // namespace vts
