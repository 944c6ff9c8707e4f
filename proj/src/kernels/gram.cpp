#include "lsekit/error.hpp"
#include "lsekit/kernels/kernels.hpp"

namespace lsekit::kernels {

namespace {

void check_dims(const PointSet& a, const PointSet& b) {
  if (a.rows() > 0 && b.rows() > 0 && a.cols() != b.cols()) {
    throw ConfigError("gram: point dimensions differ (" + std::to_string(a.cols()) + " vs " +
                      std::to_string(b.cols()) + ")");
  }
}

}  // namespace

Matrix gram_serial(const gp::KernelSpec& kernel, const PointSet& a, const PointSet& b) {
  check_dims(a, b);
  Matrix out(a.rows(), b.rows());
  const Eigen::Index dim = a.cols();
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out(i, j) = kernel.from_sqdist(gp::squared_distance(a.row(i).data(), b.row(j).data(), dim));
    }
  }
  return out;
}

Matrix gram_omp(const gp::KernelSpec& kernel, const PointSet& a, const PointSet& b) {
  check_dims(a, b);
  Matrix out(a.rows(), b.rows());
  const Eigen::Index dim = a.cols();
  const Eigen::Index cols = b.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out(i, j) = kernel.from_sqdist(gp::squared_distance(a.row(i).data(), b.row(j).data(), dim));
    }
  }
  return out;
}

Matrix gram(const gp::KernelSpec& kernel, const PointSet& a, const PointSet& b, Exec exec) {
  return exec == Exec::serial ? gram_serial(kernel, a, b) : gram_omp(kernel, a, b);
}

}  // namespace lsekit::kernels
