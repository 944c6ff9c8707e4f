#pragma once

#include "lsekit/gp/kernel.hpp"
#include "lsekit/rng.hpp"
#include "lsekit/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lsekit::lab {

// ---- analytic test functions ---------------------------------------------------

enum class Analytic { sinusoidal, himmelblau, sphere, rosenbrock, styblinski_tang };

std::string_view to_string(Analytic fn);
Analytic analytic_from_string(std::string_view name);
// Input dimension the function is defined for (2 or 5).
int analytic_dim(Analytic fn);

// sin(10 x1) + cos(4 x2) - cos(3 x1 x2)
double eval_sinusoidal(double x1, double x2);
// -(x1^2 + x2 - 11)^2 - (x1 + x2^2 - 7)^2 + 100
double eval_himmelblau(double x1, double x2);
// The 5-d functions throw ConfigError unless x has exactly 5 entries.
double eval_sphere(std::span<const double> x);
double eval_rosenbrock(std::span<const double> x);
double eval_styblinski_tang(std::span<const double> x);

double eval_analytic(Analytic fn, PointRef x);

// ---- domains -------------------------------------------------------------------

// Uniform lattice on [l1,u1] x [l2,u2] with n1 x n2 points, endpoints
// included, x1 outer and x2 inner. ConfigError unless n >= 2 and l < u.
PointSet make_grid(double l1, double u1, double l2, double u2, int n1, int n2);
// Same for any dimension; the first axis varies slowest.
PointSet make_grid(std::span<const double> lower, std::span<const double> upper,
                   std::span<const int> n);

// `count` points uniform in the box.
PointSet sample_box(std::span<const double> lower, std::span<const double> upper, int count,
                    Rng& rng);

// ---- black boxes -----------------------------------------------------------------

// The unknown function. Analytic boxes evaluate anywhere; tabulated ones
// (including frozen GP sample paths) only at their own points.
class BlackBox {
 public:
  enum class Kind { analytic, gp_sample, tabulated };

  static BlackBox analytic(Analytic fn);
  static BlackBox tabulated(PointSet points, Vector values, Kind kind = Kind::tabulated);

  Kind kind() const { return kind_; }
  Analytic function() const { return fn_; }
  bool is_tabulated() const { return kind_ != Kind::analytic; }

  // ConfigError for a tabulated box queried off its points.
  double eval(PointRef x) const;
  Vector eval_many(const PointSet& xs) const;

  // Tabulated boxes only.
  const PointSet& points() const { return points_; }
  const Vector& values() const { return values_; }

 private:
  Kind kind_ = Kind::analytic;
  Analytic fn_ = Analytic::sinusoidal;
  PointSet points_;
  Vector values_;
};

// One joint draw of f ~ GP(0, kernel) over `grid`, frozen into a table.
BlackBox gen_gp_sample(const gp::KernelSpec& kernel, const PointSet& grid, Rng& rng);
// The Case-1 generator: kernel exp(-|x - x'|^2 / 2).
BlackBox gen_gp_sample_case1(std::uint64_t seed, const PointSet& grid);

// y = f + eps, eps ~ N(0, noise_variance).
double observe(double f_val, double noise_variance, Rng& rng);

// ---- carrier-lifetime data --------------------------------------------------------

inline constexpr double kLifetimeMin = 0.091587;
inline constexpr double kLifetimeMax = 7.4613;
inline constexpr int kLifetimeNx1 = 89;
inline constexpr int kLifetimeNx2 = 74;
// Lattice coordinates are 2a + 6 for a = 1..n.
inline double lifetime_coordinate(int a) { return 2.0 * a + 6.0; }

// Lifetime map read from CSV. The black box is f = -lifetime + 3, so the
// threshold for "lifetime below 3" is theta = 0.
struct IngestedDataset {
  PointSet coordinates;
  Vector raw_values;
  Vector transformed;

  BlackBox blackbox() const;
};

// CSV: UTF-8, header `x1,x2,lifetime`, decimal floats, LF or CRLF.
// ConfigError with the offending row number on malformed rows or duplicate
// coordinates; with `strict`, also unless the rows form exactly the
// 89 x 74 lattice.
IngestedDataset ingest_lifetime_csv(const std::string& path, bool strict);
IngestedDataset parse_lifetime_csv(std::string_view text, bool strict);

// Smooth synthetic lifetime map on the 89 x 74 lattice spanning exactly
// [kLifetimeMin, kLifetimeMax], in the ingestion CSV format.
std::string synthetic_lifetime_csv(std::uint64_t seed);

}  // namespace lsekit::lab
