#include "lsekit/gp/kernel.hpp"

#include "lsekit/error.hpp"

#include <cmath>

namespace lsekit::gp {

std::string_view to_string(KernelVariant v) {
  switch (v) {
    case KernelVariant::gaussian: return "gaussian";
    case KernelVariant::matern32: return "matern32";
  }
  return "unknown";
}

KernelVariant kernel_variant_from_string(std::string_view name) {
  if (name == "gaussian") return KernelVariant::gaussian;
  if (name == "matern32") return KernelVariant::matern32;
  throw ConfigError("unknown kernel variant '" + std::string(name) +
                    "' (expected gaussian or matern32)");
}

void KernelSpec::validate() const {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw ConfigError("kernel amplitude must be positive and finite");
  }
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw ConfigError("kernel lengthscale must be positive and finite");
  }
}

double KernelSpec::from_sqdist(double sqdist) const {
  switch (variant) {
    case KernelVariant::gaussian:
      return amplitude * std::exp(-sqdist / lengthscale);
    case KernelVariant::matern32: {
      const double scaled = std::sqrt(3.0 * sqdist) / lengthscale;
      return amplitude * (1.0 + scaled) * std::exp(-scaled);
    }
  }
  return 0.0;
}

double squared_distance(const double* a, const double* b, Eigen::Index dim) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double diff = a[k] - b[k];
    acc += diff * diff;
  }
  return acc;
}

double kernel_eval(const KernelSpec& kernel, PointRef x, PointRef x_prime) {
  if (x.size() != x_prime.size()) {
    throw ConfigError("kernel_eval: dimension mismatch (" + std::to_string(x.size()) +
                      " vs " + std::to_string(x_prime.size()) + ")");
  }
  return kernel.from_sqdist(squared_distance(x.data(), x_prime.data(), x.size()));
}

}  // namespace lsekit::gp
