#include "lsekit/discretize.hpp"

#include "lsekit/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lsekit::disc {

void GridSpec::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !(r > 0.0)) {
    throw ConfigError("grid spec requires a > 0, b > 0 and r > 0");
  }
  if (d < 1) throw ConfigError("grid spec requires d >= 1");
  if (origin.size() != 0 && origin.size() != d) {
    throw ConfigError("grid spec origin has the wrong dimension");
  }
}

std::int64_t tau_t(const GridSpec& spec, int t) {
  spec.validate();
  if (t < 1) throw ConfigError("tau_t requires t >= 1");
  const double ad = spec.a * spec.d;
  if (ad < 1.0) {
    throw ConfigError("tau_t: a*d = " + std::to_string(ad) +
                      " < 1, so sqrt(log(a d)) is undefined; the derivative tail constant a "
                      "must satisfy a*d >= 1 for this schedule");
  }
  const double tt = static_cast<double>(t);
  const double raw = spec.b * spec.d * spec.r * tt * tt *
                     (std::sqrt(std::log(ad)) + std::sqrt(std::numbers::pi) / 2.0);
  const double tau = std::ceil(raw);
  if (!(tau < 9.0e18)) throw ConfigError("tau_t overflows a 64-bit integer");
  return static_cast<std::int64_t>(tau);
}

double covering_radius(const GridSpec& spec, std::int64_t tau) {
  return spec.d * spec.r / static_cast<double>(tau);
}

Lattice::Lattice(std::int64_t tau, double r, int d, Point origin)
    : tau_(tau), r_(r), d_(d), origin_(std::move(origin)) {
  if (tau < 1 || !(r > 0.0) || d < 1) throw ConfigError("lattice requires tau >= 1, r > 0, d >= 1");
  if (origin_.size() == 0) origin_ = Point::Zero(d);
  if (origin_.size() != d) throw ConfigError("lattice origin has the wrong dimension");
}

double Lattice::cardinality() const { return std::pow(static_cast<double>(tau_), d_); }

double Lattice::coordinate(int axis, std::int64_t k) const {
  return origin_[axis] + (static_cast<double>(k) + 0.5) * r_ / static_cast<double>(tau_);
}

Point Lattice::nearest(PointRef x) const {
  if (x.size() != d_) throw ConfigError("nearest: point has the wrong dimension");
  Point out(d_);
  const double h = r_ / static_cast<double>(tau_);
  for (int axis = 0; axis < d_; ++axis) {
    const double lo = origin_[axis];
    if (!(x[axis] >= lo) || !(x[axis] <= lo + r_)) {
      std::ostringstream msg;
      msg << "nearest: coordinate " << axis << " = " << x[axis] << " lies outside [" << lo
          << ", " << lo + r_ << "]";
      throw ConfigError(msg.str());
    }
    // L1 distance separates over axes, so the per-axis nearest centres form
    // the nearest point, and per-axis ties to the smaller centre give the
    // lexicographically smallest among all tied points.
    auto k = static_cast<std::int64_t>(std::floor((x[axis] - lo) / h - 0.5));
    k = std::clamp<std::int64_t>(k, 0, tau_ - 1);
    if (k + 1 < tau_) {
      const double here = std::abs(x[axis] - coordinate(axis, k));
      const double next = std::abs(x[axis] - coordinate(axis, k + 1));
      if (next < here) ++k;
    }
    if (k > 0) {
      const double here = std::abs(x[axis] - coordinate(axis, k));
      const double prev = std::abs(x[axis] - coordinate(axis, k - 1));
      if (prev <= here) --k;
    }
    out[axis] = coordinate(axis, k);
  }
  return out;
}

PointSet Lattice::points(double cap) const {
  const double count = cardinality();
  if (count > cap) {
    std::ostringstream msg;
    msg << "lattice of " << tau_ << "^" << d_ << " = " << count << " points exceeds the cap of "
        << cap << "; use a smaller dimension or iteration count";
    throw ConfigError(msg.str());
  }
  const auto n = static_cast<Eigen::Index>(count);
  PointSet grid(n, d_);
  std::vector<std::int64_t> idx(d_, 0);
  for (Eigen::Index row = 0; row < n; ++row) {
    for (int axis = 0; axis < d_; ++axis) grid(row, axis) = coordinate(axis, idx[axis]);
    for (int axis = d_ - 1; axis >= 0; --axis) {
      if (++idx[axis] < tau_) break;
      idx[axis] = 0;
    }
  }
  return grid;
}

DiscretizationState build_grid(const GridSpec& spec, int t, double cap) {
  const std::int64_t tau = tau_t(spec, t);
  Lattice lattice(tau, spec.r, spec.d, spec.origin);
  PointSet grid = lattice.points(cap);
  return {t, tau, std::move(lattice), std::move(grid)};
}

Point nearest_in_grid(const DiscretizationState& state, PointRef x) {
  return state.lattice.nearest(x);
}

}  // namespace lsekit::disc
