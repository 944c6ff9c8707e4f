#include "lsekit/error.hpp"
#include "lsekit/kernels/kernels.hpp"

#include <algorithm>

namespace lsekit::kernels {

namespace {

void check(const Matrix& samples, std::span<const MembershipFlags> classes) {
  for (const auto& c : classes) {
    if (static_cast<Eigen::Index>(c.size()) != samples.rows()) {
      throw ConfigError("max_loss_table: classification length " + std::to_string(c.size()) +
                        " does not match " + std::to_string(samples.rows()) + " points");
    }
  }
}

inline double max_loss(const double* path, const MembershipFlags& cls, double theta) {
  double worst = 0.0;
  for (std::size_t x = 0; x < cls.size(); ++x) {
    // H-classified points lose theta - f when f < theta, L-classified f - theta.
    const double loss = cls[x] ? theta - path[x] : path[x] - theta;
    worst = std::max(worst, loss);
  }
  return worst;
}

}  // namespace

Matrix max_loss_table_serial(const Matrix& samples, std::span<const MembershipFlags> classes,
                             double theta) {
  check(samples, classes);
  const auto n_classes = static_cast<Eigen::Index>(classes.size());
  Matrix out(n_classes, samples.cols());
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    for (Eigen::Index i = 0; i < n_classes; ++i) {
      out(i, j) = max_loss(samples.col(j).data(), classes[i], theta);
    }
  }
  return out;
}

Matrix max_loss_table_omp(const Matrix& samples, std::span<const MembershipFlags> classes,
                          double theta) {
  check(samples, classes);
  const auto n_classes = static_cast<Eigen::Index>(classes.size());
  const Eigen::Index m = samples.cols();
  Matrix out(n_classes, m);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n_classes; ++i) {
      out(i, j) = max_loss(samples.col(j).data(), classes[i], theta);
    }
  }
  return out;
}

Matrix max_loss_table(const Matrix& samples, std::span<const MembershipFlags> classes,
                      double theta, Exec exec) {
  return exec == Exec::serial ? max_loss_table_serial(samples, classes, theta)
                              : max_loss_table_omp(samples, classes, theta);
}

}  // namespace lsekit::kernels
