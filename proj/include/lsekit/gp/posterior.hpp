#pragma once

#include "lsekit/gp/kernel.hpp"
#include "lsekit/rng.hpp"
#include "lsekit/types.hpp"

namespace lsekit::gp {

// Observations y_j = f(x_j) + eps_j with eps_j ~ N(0, noise_variance).
struct Dataset {
  PointSet inputs;
  Vector outputs;
  double noise_variance = 0.0;

  Eigen::Index size() const { return inputs.rows(); }
  Eigen::Index dim() const { return inputs.cols(); }

  // Appends one observation. The first append fixes the dimension.
  void add(PointRef x, double y);

  // Throws ConfigError on length mismatch, negative or non-finite noise.
  void validate() const;
};

struct MeanVar {
  double mean;
  double var;
};

// Nugget schedule used whenever a covariance needs stabilising: start at
// kJitterStart * amplitude and multiply by 10 up to kJitterMax * amplitude.
inline constexpr double kJitterStart = 1e-10;
inline constexpr double kJitterMax = 1e-6;

// Exact GP posterior given a dataset. Immutable once built; every query is
// const and safe to call from many threads.
class Posterior {
 public:
  // Builds the Cholesky factor of K + noise*I. When noise is zero, or the
  // factorisation fails, a diagonal jitter is added following the nugget
  // schedule; NumericalError if even the largest jitter fails.
  static Posterior fit(Dataset data, const KernelSpec& kernel);

  MeanVar mean_var(PointRef x) const;

  // Batched moments at every row of `xs`; identical to looping mean_var.
  void mean_var(const PointSet& xs, Vector& mean, Vector& var,
                Exec exec = Exec::parallel) const;
  Vector mean(const PointSet& xs, Exec exec = Exec::parallel) const;

  // Joint posterior covariance of f at xs. Symmetric; diagonal equals the
  // pointwise variance.
  Matrix cov(const PointSet& xs) const;

  // Posterior after appending (x, y). Extends the Cholesky factor by one
  // row in O(t^2) instead of refactorising; falls back to a full refit if
  // the extension loses positive definiteness.
  Posterior with_observation(PointRef x, double y) const;

  const Dataset& dataset() const { return data_; }
  const KernelSpec& kernel() const { return kernel_; }
  const Matrix& chol() const { return chol_; }
  const Vector& weights() const { return weights_; }
  // Extra diagonal added on top of the noise variance (0 if none needed).
  double jitter() const { return jitter_; }

 private:
  Posterior(Dataset data, KernelSpec kernel) : data_(std::move(data)), kernel_(kernel) {}

  void refresh_weights();

  Dataset data_;
  KernelSpec kernel_;
  Matrix chol_;
  Vector weights_;
  double jitter_ = 0.0;
};

inline Posterior fit_posterior(Dataset data, const KernelSpec& kernel) {
  return Posterior::fit(std::move(data), kernel);
}

inline MeanVar posterior_mean_var(const Posterior& post, PointRef x) { return post.mean_var(x); }

// NumericalError when xs is empty.
Matrix posterior_cov(const Posterior& post, const PointSet& xs);

// Draws `count` samples of N(mean, cov), one per column of the result.
// The covariance is factorised with a nugget of kJitterStart * scale,
// escalated x10 up to kJitterMax * scale. A covariance that is identically
// zero yields the mean vector for every draw.
Matrix sample_mvn(const Vector& mean, const Matrix& cov, int count, Rng& rng, double scale);

// Joint draws of f restricted to xs under the posterior (the prior when the
// posterior has no data). One draw per column.
Matrix sample_paths(const Posterior& post, const PointSet& xs, int count, Rng& rng);

}  // namespace lsekit::gp
