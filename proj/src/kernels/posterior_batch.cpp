#include "lsekit/error.hpp"
#include "lsekit/kernels/kernels.hpp"

#include <algorithm>

namespace lsekit::kernels {

namespace {

void check_queries(const PosteriorFactors& post, const PointSet& queries) {
  if (post.inputs.rows() > 0 && queries.rows() > 0 && post.inputs.cols() != queries.cols()) {
    throw ConfigError("posterior query: dimension mismatch (" +
                      std::to_string(queries.cols()) + " vs " +
                      std::to_string(post.inputs.cols()) + ")");
  }
}

// (mean, var) at x; `cross` is t-long scratch.
inline void moments_at(const PosteriorFactors& post, const double* x, Eigen::Index dim,
                       Vector& cross, double& mean, double& var) {
  const Eigen::Index t = post.inputs.rows();
  const double prior = post.kernel.amplitude;
  if (t == 0) {
    mean = 0.0;
    var = prior;
    return;
  }
  for (Eigen::Index i = 0; i < t; ++i) {
    cross[i] = post.kernel.from_sqdist(gp::squared_distance(x, post.inputs.row(i).data(), dim));
  }
  mean = cross.dot(post.weights);
  post.chol.triangularView<Eigen::Lower>().solveInPlace(cross);
  var = std::max(0.0, prior - cross.squaredNorm());
}

inline double mean_at(const PosteriorFactors& post, const double* x, Eigen::Index dim) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < post.inputs.rows(); ++i) {
    acc += post.weights[i] *
           post.kernel.from_sqdist(gp::squared_distance(x, post.inputs.row(i).data(), dim));
  }
  return acc;
}

}  // namespace

void posterior_moments_serial(const PosteriorFactors& post, const PointSet& queries,
                              Vector& mean, Vector& var) {
  check_queries(post, queries);
  const Eigen::Index n = queries.rows();
  mean.resize(n);
  var.resize(n);
  Vector cross(post.inputs.rows());
  for (Eigen::Index q = 0; q < n; ++q) {
    moments_at(post, queries.row(q).data(), queries.cols(), cross, mean[q], var[q]);
  }
}

void posterior_moments_omp(const PosteriorFactors& post, const PointSet& queries, Vector& mean,
                           Vector& var) {
  check_queries(post, queries);
  const Eigen::Index n = queries.rows();
  mean.resize(n);
  var.resize(n);
#pragma omp parallel
  {
    Vector cross(post.inputs.rows());
#pragma omp for schedule(static)
    for (Eigen::Index q = 0; q < n; ++q) {
      moments_at(post, queries.row(q).data(), queries.cols(), cross, mean[q], var[q]);
    }
  }
}

void posterior_moments(const PosteriorFactors& post, const PointSet& queries, Vector& mean,
                       Vector& var, Exec exec) {
  if (exec == Exec::serial) {
    posterior_moments_serial(post, queries, mean, var);
  } else {
    posterior_moments_omp(post, queries, mean, var);
  }
}

void posterior_mean_serial(const PosteriorFactors& post, const PointSet& queries, Vector& mean) {
  check_queries(post, queries);
  mean.resize(queries.rows());
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    mean[q] = mean_at(post, queries.row(q).data(), queries.cols());
  }
}

void posterior_mean_omp(const PosteriorFactors& post, const PointSet& queries, Vector& mean) {
  check_queries(post, queries);
  const Eigen::Index n = queries.rows();
  mean.resize(n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index q = 0; q < n; ++q) {
    mean[q] = mean_at(post, queries.row(q).data(), queries.cols());
  }
}

void posterior_mean(const PosteriorFactors& post, const PointSet& queries, Vector& mean,
                    Exec exec) {
  if (exec == Exec::serial) {
    posterior_mean_serial(post, queries, mean);
  } else {
    posterior_mean_omp(post, queries, mean);
  }
}

}  // namespace lsekit::kernels
