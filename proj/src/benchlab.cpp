#include "lsekit/benchlab.hpp"

#include "lsekit/error.hpp"
#include "lsekit/gp/posterior.hpp"
#include "lsekit/kernels/kernels.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

namespace lsekit::lab {

std::string_view to_string(Analytic fn) {
  switch (fn) {
    case Analytic::sinusoidal: return "sinusoidal";
    case Analytic::himmelblau: return "himmelblau";
    case Analytic::sphere: return "sphere";
    case Analytic::rosenbrock: return "rosenbrock";
    case Analytic::styblinski_tang: return "styblinski_tang";
  }
  return "unknown";
}

Analytic analytic_from_string(std::string_view name) {
  for (Analytic fn : {Analytic::sinusoidal, Analytic::himmelblau, Analytic::sphere,
                      Analytic::rosenbrock, Analytic::styblinski_tang}) {
    if (to_string(fn) == name) return fn;
  }
  throw ConfigError("unknown analytic function '" + std::string(name) + "'");
}

int analytic_dim(Analytic fn) {
  return fn == Analytic::sinusoidal || fn == Analytic::himmelblau ? 2 : 5;
}

double eval_sinusoidal(double x1, double x2) {
  return std::sin(10.0 * x1) + std::cos(4.0 * x2) - std::cos(3.0 * x1 * x2);
}

double eval_himmelblau(double x1, double x2) {
  const double a = x1 * x1 + x2 - 11.0;
  const double b = x1 + x2 * x2 - 7.0;
  return -a * a - b * b + 100.0;
}

namespace {

void require_dim5(std::span<const double> x, std::string_view name) {
  if (x.size() != 5) {
    throw ConfigError(std::string(name) + " is defined on R^5, got dimension " +
                      std::to_string(x.size()));
  }
}

}  // namespace

double eval_sphere(std::span<const double> x) {
  require_dim5(x, "sphere");
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return 41.65518 - acc;
}

double eval_rosenbrock(std::span<const double> x) {
  require_dim5(x, "rosenbrock");
  double acc = 0.0;
  for (std::size_t d = 0; d + 1 < x.size(); ++d) {
    const double a = x[d + 1] - x[d] * x[d];
    const double b = 1.0 - x[d];
    acc += 100.0 * a * a + b * b;
  }
  return 53458.91 - acc;
}

double eval_styblinski_tang(std::span<const double> x) {
  require_dim5(x, "styblinski_tang");
  double acc = 0.0;
  for (double v : x) acc += v * v * v * v - 16.0 * v * v + 5.0 * v;
  return -20.8875 - acc / 2.0;
}

double eval_analytic(Analytic fn, PointRef x) {
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  switch (fn) {
    case Analytic::sinusoidal:
    case Analytic::himmelblau:
      if (x.size() != 2) {
        throw ConfigError(std::string(to_string(fn)) + " is defined on R^2, got dimension " +
                          std::to_string(x.size()));
      }
      return fn == Analytic::sinusoidal ? eval_sinusoidal(x[0], x[1]) : eval_himmelblau(x[0], x[1]);
    case Analytic::sphere: return eval_sphere(xs);
    case Analytic::rosenbrock: return eval_rosenbrock(xs);
    case Analytic::styblinski_tang: return eval_styblinski_tang(xs);
  }
  return 0.0;
}

PointSet make_grid(double l1, double u1, double l2, double u2, int n1, int n2) {
  const double lower[] = {l1, l2};
  const double upper[] = {u1, u2};
  const int n[] = {n1, n2};
  return make_grid(lower, upper, n);
}

PointSet make_grid(std::span<const double> lower, std::span<const double> upper,
                   std::span<const int> n) {
  const std::size_t d = lower.size();
  if (d == 0 || upper.size() != d || n.size() != d) {
    throw ConfigError("make_grid: lower/upper/n must share a nonzero dimension");
  }
  Eigen::Index total = 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (n[k] < 2) throw ConfigError("make_grid: need at least 2 points per axis");
    if (!(lower[k] < upper[k])) throw ConfigError("make_grid: degenerate bounds on axis " + std::to_string(k));
    total *= n[k];
  }
  PointSet grid(total, static_cast<Eigen::Index>(d));
  std::vector<int> idx(d, 0);
  for (Eigen::Index row = 0; row < total; ++row) {
    for (std::size_t k = 0; k < d; ++k) {
      const double step = (upper[k] - lower[k]) / (n[k] - 1);
      // The last point is set to the bound exactly.
      grid(row, static_cast<Eigen::Index>(k)) = idx[k] == n[k] - 1 ? upper[k] : lower[k] + idx[k] * step;
    }
    for (std::size_t k = d; k-- > 0;) {
      if (++idx[k] < n[k]) break;
      idx[k] = 0;
    }
  }
  return grid;
}

PointSet sample_box(std::span<const double> lower, std::span<const double> upper, int count,
                    Rng& rng) {
  if (lower.size() != upper.size() || lower.empty()) {
    throw ConfigError("sample_box: bounds dimension mismatch");
  }
  PointSet out(count, static_cast<Eigen::Index>(lower.size()));
  for (int i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < lower.size(); ++k) {
      out(i, static_cast<Eigen::Index>(k)) = lower[k] + (upper[k] - lower[k]) * rng.uniform();
    }
  }
  return out;
}

BlackBox BlackBox::analytic(Analytic fn) {
  BlackBox box;
  box.kind_ = Kind::analytic;
  box.fn_ = fn;
  return box;
}

BlackBox BlackBox::tabulated(PointSet points, Vector values, Kind kind) {
  if (points.rows() != values.size()) throw ConfigError("tabulated black box: size mismatch");
  if (kind == Kind::analytic) throw ConfigError("tabulated black box needs a tabulated kind");
  BlackBox box;
  box.kind_ = kind;
  box.points_ = std::move(points);
  box.values_ = std::move(values);
  return box;
}

double BlackBox::eval(PointRef x) const {
  if (kind_ == Kind::analytic) return eval_analytic(fn_, x);
  if (x.size() != points_.cols()) throw ConfigError("black box: query has the wrong dimension");
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    if (points_.row(i) == x) return values_[i];
  }
  throw ConfigError("tabulated black box queried at a point it does not contain");
}

Vector BlackBox::eval_many(const PointSet& xs) const {
  Vector out(xs.rows());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) out[i] = eval(xs.row(i));
  return out;
}

BlackBox gen_gp_sample(const gp::KernelSpec& kernel, const PointSet& grid, Rng& rng) {
  kernel.validate();
  const Matrix cov = kernels::gram(kernel, grid, grid);
  const Matrix draw = gp::sample_mvn(Vector::Zero(grid.rows()), cov, 1, rng, kernel.amplitude);
  return BlackBox::tabulated(grid, draw.col(0), BlackBox::Kind::gp_sample);
}

BlackBox gen_gp_sample_case1(std::uint64_t seed, const PointSet& grid) {
  Rng rng(seed);
  return gen_gp_sample(gp::KernelSpec::gaussian(1.0, 2.0), grid, rng);
}

double observe(double f_val, double noise_variance, Rng& rng) {
  if (noise_variance == 0.0) return f_val;
  return f_val + std::sqrt(noise_variance) * rng.normal();
}

BlackBox IngestedDataset::blackbox() const {
  return BlackBox::tabulated(coordinates, transformed);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
  return res.ec == std::errc() && res.ptr == field.data() + field.size() && std::isfinite(out);
}

[[noreturn]] void row_error(std::size_t row, const std::string& what) {
  throw ConfigError("lifetime CSV row " + std::to_string(row) + ": " + what);
}

}  // namespace

IngestedDataset parse_lifetime_csv(std::string_view text, bool strict) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<std::pair<double, double>> coords;
  std::vector<double> values;
  std::vector<std::size_t> lines;
  std::set<std::pair<double, double>> seen;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "x1,x2,lifetime") {
        throw ConfigError("lifetime CSV: expected header 'x1,x2,lifetime', got '" +
                          std::string(line) + "'");
      }
      header_seen = true;
      continue;
    }
    double f[3];
    std::size_t start = 0;
    for (int k = 0; k < 3; ++k) {
      const std::size_t comma = line.find(',', start);
      const bool last = k == 2;
      if (last != (comma == std::string_view::npos)) row_error(line_no, "expected 3 fields");
      const std::string_view field =
          line.substr(start, last ? std::string_view::npos : comma - start);
      if (!parse_double(field, f[k])) {
        row_error(line_no, "field " + std::to_string(k + 1) + " ('" + std::string(field) +
                               "') is not a finite decimal number");
      }
      start = comma + 1;
    }
    if (!seen.insert({f[0], f[1]}).second) {
      row_error(line_no, "duplicate coordinate (" + std::to_string(f[0]) + ", " +
                             std::to_string(f[1]) + ")");
    }
    coords.emplace_back(f[0], f[1]);
    values.push_back(f[2]);
    lines.push_back(line_no);
  }
  if (!header_seen) throw ConfigError("lifetime CSV: missing header");
  if (values.empty()) throw ConfigError("lifetime CSV: no data rows");

  if (strict) {
    const std::size_t expected = static_cast<std::size_t>(kLifetimeNx1) * kLifetimeNx2;
    if (values.size() != expected) {
      throw ConfigError("lifetime CSV layout: expected " + std::to_string(expected) +
                        " rows (89 x 74 lattice), got " + std::to_string(values.size()));
    }
    for (std::size_t i = 0; i < coords.size(); ++i) {
      const auto [x1, x2] = coords[i];
      const auto on_axis = [](double v, int n) {
        const double a = (v - 6.0) / 2.0;
        return a == std::floor(a) && a >= 1.0 && a <= n;
      };
      if (!on_axis(x1, kLifetimeNx1) || !on_axis(x2, kLifetimeNx2)) {
        row_error(lines[i], "coordinate (" + std::to_string(x1) + ", " + std::to_string(x2) +
                                ") is off the 2a+6 lattice");
      }
    }
  }

  IngestedDataset out;
  const auto n = static_cast<Eigen::Index>(values.size());
  out.coordinates.resize(n, 2);
  out.raw_values.resize(n);
  out.transformed.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.coordinates(i, 0) = coords[static_cast<std::size_t>(i)].first;
    out.coordinates(i, 1) = coords[static_cast<std::size_t>(i)].second;
    out.raw_values[i] = values[static_cast<std::size_t>(i)];
    out.transformed[i] = -out.raw_values[i] + 3.0;
  }
  return out;
}

IngestedDataset ingest_lifetime_csv(const std::string& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open lifetime CSV '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lifetime_csv(buf.str(), strict);
}

std::string synthetic_lifetime_csv(std::uint64_t seed) {
  Rng rng(seed);
  // Good material with a handful of low-lifetime defect patches and a slow
  // gradient across the ingot.
  struct Patch {
    double cx, cy, width, depth;
  };
  std::vector<Patch> patches;
  for (int k = 0; k < 7; ++k) {
    patches.push_back({8.0 + 176.0 * rng.uniform(), 8.0 + 146.0 * rng.uniform(),
                       10.0 + 25.0 * rng.uniform(), 0.5 + rng.uniform()});
  }
  const int n = kLifetimeNx1 * kLifetimeNx2;
  std::vector<double> raw(static_cast<std::size_t>(n));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int a = 1; a <= kLifetimeNx1; ++a) {
    for (int b = 1; b <= kLifetimeNx2; ++b) {
      const double x1 = lifetime_coordinate(a);
      const double x2 = lifetime_coordinate(b);
      double v = 1.0 + 0.3 * (x1 / 184.0) - 0.2 * (x2 / 154.0);
      for (const Patch& p : patches) {
        const double d2 = (x1 - p.cx) * (x1 - p.cx) + (x2 - p.cy) * (x2 - p.cy);
        v -= p.depth * std::exp(-d2 / (2.0 * p.width * p.width));
      }
      raw[static_cast<std::size_t>((a - 1) * kLifetimeNx2 + (b - 1))] = v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  std::string out = "x1,x2,lifetime\n";
  char buf[64];
  for (int a = 1; a <= kLifetimeNx1; ++a) {
    for (int b = 1; b <= kLifetimeNx2; ++b) {
      const double v = raw[static_cast<std::size_t>((a - 1) * kLifetimeNx2 + (b - 1))];
      double life = kLifetimeMin + (v - lo) / (hi - lo) * (kLifetimeMax - kLifetimeMin);
      if (v == lo) life = kLifetimeMin;
      if (v == hi) life = kLifetimeMax;
      const auto res = std::to_chars(buf, buf + sizeof buf, life);
      out += std::to_string(static_cast<int>(lifetime_coordinate(a)));
      out += ',';
      out += std::to_string(static_cast<int>(lifetime_coordinate(b)));
      out += ',';
      out.append(buf, res.ptr);
      out += '\n';
    }
  }
  return out;
}

}  // namespace lsekit::lab
