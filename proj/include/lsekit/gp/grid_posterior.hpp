#pragma once

#include "lsekit/gp/kernel.hpp"
#include "lsekit/gp/posterior.hpp"
#include "lsekit/types.hpp"

#include <vector>

namespace lsekit::gp {

// GP posterior restricted to a fixed finite candidate set, updated one
// observation at a time. Observations must be at candidate points.
//
// Each update appends one row v to the factor V = L^{-1} K(X_obs, X):
//   v(x)  = cov_t(x_new, x) / sqrt(var_t(x_new) + noise)
//   mean += v * (y - mean(x_new)) / sqrt(var_t(x_new) + noise)
//   var  -= v^2
// which costs O(t |X|) per step. With `track_covariance` the full |X| x |X|
// posterior covariance is kept instead (O(|X|^2) per step), as needed by
// MILE.
class GridPosterior {
 public:
  GridPosterior(const KernelSpec& kernel, PointSet candidates, double noise_variance,
                bool track_covariance = false);

  // NumericalError if the update pivot is not positive (e.g. repeated
  // observation of a point with zero noise).
  void observe(Eigen::Index candidate, double y);

  const Vector& mean() const { return mean_; }
  const Vector& var() const { return var_; }
  // Requires track_covariance.
  const Matrix& covariance() const;
  bool tracks_covariance() const { return track_cov_; }

  const PointSet& candidates() const { return candidates_; }
  const std::vector<Eigen::Index>& observed() const { return observed_; }
  const std::vector<double>& observations() const { return ys_; }
  double noise_variance() const { return noise_; }
  const KernelSpec& kernel() const { return kernel_; }

  // Dataset of everything observed so far.
  Dataset dataset() const;

 private:
  KernelSpec kernel_;
  PointSet candidates_;
  double noise_;
  double effective_noise_;
  bool track_cov_;
  Vector mean_;
  Vector var_;
  Matrix cov_;
  std::vector<Vector> factor_rows_;
  std::vector<Eigen::Index> observed_;
  std::vector<double> ys_;
};

}  // namespace lsekit::gp
