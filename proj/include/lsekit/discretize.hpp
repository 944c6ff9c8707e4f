#pragma once

#include "lsekit/types.hpp"

#include <cstdint>
#include <optional>

namespace lsekit::disc {

// Lattice parameters for the max-value-loss discretisation of a box
// [origin, origin + r]^d. `a` and `b` are the tail constants bounding the
// sup of the partial derivatives of f: P(sup |df/dx_j| > L) <= a exp(-(L/b)^2).
struct GridSpec {
  double a = 1.0;
  double b = 1.0;
  double r = 1.0;
  int d = 1;
  // Lower corner of the box; empty means the origin.
  Point origin;

  // ConfigError unless a, b, r > 0 and d >= 1.
  void validate() const;
};

// Per-axis resolution ceil(b d r t^2 (sqrt(log(a d)) + sqrt(pi)/2)).
// ConfigError when a*d < 1 (the square-rooted log would be negative) or
// t < 1.
std::int64_t tau_t(const GridSpec& spec, int t);

// Cell-centre lattice with tau points per axis over [origin, origin + r]^d:
// coordinate k on an axis is origin + (k + 1/2) r / tau. Nearest-point
// queries run in O(d) without materialising the tau^d points.
class Lattice {
 public:
  Lattice(std::int64_t tau, double r, int d, Point origin = {});

  std::int64_t tau() const { return tau_; }
  int dim() const { return d_; }
  double r() const { return r_; }
  const Point& origin() const { return origin_; }
  // tau^d as a double (may exceed any integer type).
  double cardinality() const;

  double coordinate(int axis, std::int64_t k) const;

  // Nearest lattice point in L1; ties go to the lexicographically smallest
  // coordinate vector. ConfigError if x lies outside the box.
  Point nearest(PointRef x) const;

  // Materialises all tau^d points, last axis fastest. ConfigError when the
  // count exceeds `cap`.
  PointSet points(double cap) const;

 private:
  std::int64_t tau_;
  double r_;
  int d_;
  Point origin_;
};

inline constexpr double kDefaultGridCap = 1e7;

struct DiscretizationState {
  int t = 1;
  std::int64_t tau = 1;
  Lattice lattice;
  PointSet grid;
};

// tau_t-resolution lattice with every point materialised; ConfigError
// (suggesting a smaller d or t) when tau_t^d exceeds `cap`.
DiscretizationState build_grid(const GridSpec& spec, int t, double cap = kDefaultGridCap);

Point nearest_in_grid(const DiscretizationState& state, PointRef x);

// Worst-case L1 distance to the lattice, d r / tau.
double covering_radius(const GridSpec& spec, std::int64_t tau);

}  // namespace lsekit::disc
