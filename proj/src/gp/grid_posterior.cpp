#include "lsekit/gp/grid_posterior.hpp"

#include "lsekit/error.hpp"
#include "lsekit/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace lsekit::gp {

GridPosterior::GridPosterior(const KernelSpec& kernel, PointSet candidates, double noise_variance,
                             bool track_covariance)
    : kernel_(kernel),
      candidates_(std::move(candidates)),
      noise_(noise_variance),
      effective_noise_(noise_variance == 0.0 ? kJitterStart * kernel.amplitude : noise_variance),
      track_cov_(track_covariance) {
  kernel_.validate();
  if (!(noise_variance >= 0.0)) throw ConfigError("noise variance must be nonnegative");
  if (candidates_.rows() == 0) throw ConfigError("GridPosterior: empty candidate set");
  const Eigen::Index n = candidates_.rows();
  mean_ = Vector::Zero(n);
  var_ = Vector::Constant(n, kernel_.amplitude);
  if (track_cov_) cov_ = kernels::gram(kernel_, candidates_, candidates_);
}

const Matrix& GridPosterior::covariance() const {
  if (!track_cov_) throw ConfigError("GridPosterior: covariance tracking was not enabled");
  return cov_;
}

void GridPosterior::observe(Eigen::Index candidate, double y) {
  const Eigen::Index n = candidates_.rows();
  if (candidate < 0 || candidate >= n) {
    throw ConfigError("GridPosterior::observe: candidate index out of range");
  }
  Vector row;
  if (track_cov_) {
    row = cov_.col(candidate);
  } else {
    row.resize(n);
    const double* xj = candidates_.row(candidate).data();
    const Eigen::Index dim = candidates_.cols();
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
      row[i] = kernel_.from_sqdist(squared_distance(xj, candidates_.row(i).data(), dim));
    }
    for (const Vector& prev : factor_rows_) row.noalias() -= prev[candidate] * prev;
  }
  const double pivot_sq = row[candidate] + effective_noise_;
  if (!(pivot_sq > 0.0) || !std::isfinite(pivot_sq)) {
    throw NumericalError("GridPosterior: nonpositive update pivot at candidate " +
                         std::to_string(candidate) + "; the observation is redundant under "
                         "zero noise");
  }
  const double pivot = std::sqrt(pivot_sq);
  row /= pivot;
  const double residual = (y - mean_[candidate]) / pivot;
  mean_.noalias() += residual * row;
  var_.array() = (var_.array() - row.array().square()).max(0.0);
  if (track_cov_) {
    cov_.noalias() -= row * row.transpose();
  } else {
    factor_rows_.push_back(std::move(row));
  }
  observed_.push_back(candidate);
  ys_.push_back(y);
}

Dataset GridPosterior::dataset() const {
  Dataset data;
  data.noise_variance = noise_;
  data.inputs.resize(static_cast<Eigen::Index>(observed_.size()), candidates_.cols());
  data.outputs.resize(static_cast<Eigen::Index>(observed_.size()));
  for (std::size_t i = 0; i < observed_.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    data.inputs.row(r) = candidates_.row(observed_[i]);
    data.outputs[r] = ys_[i];
  }
  return data;
}

}  // namespace lsekit::gp
