#pragma once

#include "lsekit/types.hpp"

#include <string>
#include <string_view>

namespace lsekit::gp {

enum class KernelVariant { gaussian, matern32 };

std::string_view to_string(KernelVariant v);
KernelVariant kernel_variant_from_string(std::string_view name);

// Stationary covariance function.
//
//   gaussian:  amplitude * exp(-|x - x'|^2 / lengthscale)
//   matern32:  amplitude * (1 + sqrt(3) r / lengthscale) * exp(-sqrt(3) r / lengthscale)
//
// For the Gaussian variant `lengthscale` divides the squared distance
// directly; it is not a squared lengthscale and there is no factor 2.
struct KernelSpec {
  KernelVariant variant = KernelVariant::gaussian;
  double amplitude = 1.0;
  double lengthscale = 1.0;

  static KernelSpec gaussian(double amplitude, double lengthscale) {
    return {KernelVariant::gaussian, amplitude, lengthscale};
  }
  static KernelSpec matern32(double amplitude, double lengthscale) {
    return {KernelVariant::matern32, amplitude, lengthscale};
  }

  // Throws ConfigError unless amplitude > 0 and lengthscale > 0.
  void validate() const;

  // Covariance as a function of the squared Euclidean distance.
  double from_sqdist(double sqdist) const;

  bool operator==(const KernelSpec&) const = default;
};

// Throws ConfigError on dimension mismatch.
double kernel_eval(const KernelSpec& kernel, PointRef x, PointRef x_prime);

double squared_distance(const double* a, const double* b, Eigen::Index dim);

}  // namespace lsekit::gp
