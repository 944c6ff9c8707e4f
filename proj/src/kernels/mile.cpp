#include "lsekit/error.hpp"
#include "lsekit/kernels/kernels.hpp"

#include <cmath>
#include <numbers>

namespace lsekit::kernels {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

namespace {

constexpr double kSaturation = 8.5;

void check(const MileInputs& in) {
  const Eigen::Index n = in.mean.size();
  if (in.var.size() != n || in.cov.rows() != n || in.cov.cols() != n) {
    throw ConfigError("mile_scores: mean/var/cov sizes disagree");
  }
}

inline double score_column(const MileInputs& in, Eigen::Index col) {
  const Eigen::Index n = in.mean.size();
  const double denom = std::sqrt(in.var[col] + in.noise_variance);
  const double* cov_col = in.cov.col(col).data();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double gap = in.mean[i] - in.theta;
    const double nu = denom > 0.0 ? std::abs(cov_col[i]) / denom : 0.0;
    if (nu == 0.0) {
      acc += gap >= 0.0 ? 1.0 : 0.0;
    } else if (gap > kSaturation * nu) {
      acc += 1.0;
    } else if (gap < -kSaturation * nu) {
      // contributes < 1e-17
    } else {
      acc += normal_cdf(gap / nu);
    }
  }
  return acc;
}

}  // namespace

Vector mile_scores_serial(const MileInputs& in) {
  check(in);
  Vector out(in.mean.size());
  for (Eigen::Index c = 0; c < out.size(); ++c) out[c] = score_column(in, c);
  return out;
}

Vector mile_scores_omp(const MileInputs& in) {
  check(in);
  const Eigen::Index n = in.mean.size();
  Vector out(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index c = 0; c < n; ++c) out[c] = score_column(in, c);
  return out;
}

Vector mile_scores(const MileInputs& in, Exec exec) {
  return exec == Exec::serial ? mile_scores_serial(in) : mile_scores_omp(in);
}

}  // namespace lsekit::kernels
