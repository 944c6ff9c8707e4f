#include "lsekit/level_set.hpp"

#include "lsekit/error.hpp"
#include "lsekit/gp/grid_posterior.hpp"
#include "lsekit/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lsekit::ls {

std::size_t Classification::count_h() const {
  return static_cast<std::size_t>(std::count(in_h.begin(), in_h.end(), std::uint8_t{1}));
}

Classification classify(const Vector& mean, double theta) {
  Classification out;
  out.theta = theta;
  out.in_h.resize(static_cast<std::size_t>(mean.size()));
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    out.in_h[static_cast<std::size_t>(i)] = mean[i] >= theta ? 1 : 0;
  }
  return out;
}

Classification classify(const gp::Posterior& post, const PointSet& xs, double theta) {
  Vector mean;
  Vector var;
  post.mean_var(xs, mean, var);
  return classify(mean, theta);
}

double loss_point(double f_val, double theta, Side side) {
  // f >= theta belongs to H*, f < theta to L*; at f == theta both
  // assignments give zero loss.
  if (side == Side::H) return f_val < theta ? theta - f_val : 0.0;
  return f_val >= theta ? f_val - theta : 0.0;
}

namespace {

void check_lengths(const Classification& cls, std::span<const double> truth) {
  if (cls.size() != truth.size()) {
    throw ConfigError("classification has " + std::to_string(cls.size()) +
                      " points but truth has " + std::to_string(truth.size()));
  }
}

}  // namespace

double loss_r(const Classification& cls, std::span<const double> truth) {
  check_lengths(cls, truth);
  if (truth.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) acc += loss_point(truth[i], cls.theta, cls.side(i));
  return acc / static_cast<double>(truth.size());
}

double maxvalue_loss(const Classification& cls, std::span<const double> truth) {
  check_lengths(cls, truth);
  double worst = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    worst = std::max(worst, loss_point(truth[i], cls.theta, cls.side(i)));
  }
  return worst;
}

MembershipFlags true_superlevel(std::span<const double> truth, double theta) {
  MembershipFlags out(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) out[i] = truth[i] >= theta ? 1 : 0;
  return out;
}

FScore fscore(const Classification& cls, const MembershipFlags& true_h) {
  if (cls.size() != true_h.size()) throw ConfigError("fscore: length mismatch");
  std::size_t est = 0;
  std::size_t truth = 0;
  std::size_t both = 0;
  for (std::size_t i = 0; i < true_h.size(); ++i) {
    est += cls.in_h[i];
    truth += true_h[i];
    both += cls.in_h[i] & true_h[i];
  }
  FScore out;
  out.precision = est == 0 ? (truth == 0 ? 1.0 : 0.0)
                           : static_cast<double>(both) / static_cast<double>(est);
  out.recall = truth == 0 ? (est == 0 ? 1.0 : 0.0)
                          : static_cast<double>(both) / static_cast<double>(truth);
  const double denom = out.precision + out.recall;
  out.fscore = denom == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / denom;
  return out;
}

double expected_loss_closed_form(double mu, double sigma, double theta, Side side) {
  if (!(sigma >= 0.0)) throw ConfigError("expected_loss_closed_form requires sigma >= 0");
  if (sigma == 0.0) {
    return side == Side::H ? std::max(theta - mu, 0.0) : std::max(mu - theta, 0.0);
  }
  const double alpha = (mu - theta) / sigma;
  if (side == Side::L) {
    // E[(f - theta)^+]
    return sigma * (kernels::normal_pdf(-alpha) + alpha * (1.0 - kernels::normal_cdf(-alpha)));
  }
  // E[(theta - f)^+]
  return sigma * (kernels::normal_pdf(alpha) - alpha * (1.0 - kernels::normal_cdf(alpha)));
}

double expected_avg_loss(const Vector& mean, const Vector& var, const Classification& cls) {
  if (static_cast<std::size_t>(mean.size()) != cls.size() || var.size() != mean.size()) {
    throw ConfigError("expected_avg_loss: length mismatch");
  }
  if (mean.size() == 0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    acc += expected_loss_closed_form(mean[i], std::sqrt(std::max(var[i], 0.0)), cls.theta,
                                     cls.side(static_cast<std::size_t>(i)));
  }
  return acc / static_cast<double>(mean.size());
}

double expected_avg_loss(const gp::Posterior& post, const Classification& cls,
                         const PointSet& xs) {
  Vector mean;
  Vector var;
  post.mean_var(xs, mean, var);
  return expected_avg_loss(mean, var, cls);
}

TCheckResult estimate_t_check(const Matrix& sample_paths,
                              std::span<const Classification> stored, double theta, Exec exec) {
  if (stored.empty()) throw ConfigError("estimate_t_check: no stored classifications");
  std::vector<MembershipFlags> flags;
  flags.reserve(stored.size());
  for (const auto& c : stored) flags.push_back(c.in_h);
  const Matrix table = kernels::max_loss_table(sample_paths, flags, theta, exec);
  TCheckResult out;
  out.expected_max_loss.resize(stored.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < stored.size(); ++i) {
    const double avg = table.row(static_cast<Eigen::Index>(i)).mean();
    out.expected_max_loss[i] = avg;
    if (avg <= best) {
      best = avg;
      out.index = static_cast<int>(i) + 1;
    }
  }
  return out;
}

TCheckResult estimate_t_check(const gp::Posterior& post, std::span<const Classification> stored,
                              const PointSet& xs, double theta, int samples, Rng& rng,
                              Exec exec) {
  if (samples < 1) throw ConfigError("estimate_t_check requires at least one sample path");
  const Matrix paths = gp::sample_paths(post, xs, samples, rng);
  return estimate_t_check(paths, stored, theta, exec);
}

std::vector<double> info_gain_greedy(const gp::KernelSpec& kernel, const PointSet& candidates,
                                     double noise_variance, int horizon) {
  if (!(noise_variance > 0.0)) throw ConfigError("info_gain_greedy requires noise variance > 0");
  if (horizon < 1) throw ConfigError("info_gain_greedy requires horizon >= 1");
  gp::GridPosterior tracker(kernel, candidates, noise_variance);
  std::vector<double> gains;
  gains.reserve(static_cast<std::size_t>(horizon));
  double total = 0.0;
  for (int step = 0; step < horizon; ++step) {
    Eigen::Index best = 0;
    tracker.var().maxCoeff(&best);
    total += 0.5 * std::log1p(tracker.var()[best] / noise_variance);
    gains.push_back(total);
    tracker.observe(best, 0.0);
  }
  return gains;
}

namespace {

double log_term(double noise_variance) {
  if (!(noise_variance > 0.0)) {
    throw ConfigError("theorem constants are undefined for zero noise variance");
  }
  return std::log1p(1.0 / noise_variance);
}

}  // namespace

double c1(double noise_variance) { return 4.0 / log_term(noise_variance); }

double c1_tilde(double noise_variance, double n_candidates) {
  return (4.0 + 4.0 * std::log(n_candidates)) / log_term(noise_variance);
}

double c1_check(double noise_variance) { return 2.0 / log_term(noise_variance); }

double bound_rhs(const BoundInputs& in) {
  if (in.t < 1) throw ConfigError("bound_rhs requires t >= 1");
  const double t = static_cast<double>(in.t);
  const double gamma = std::max(in.gamma, 0.0);
  constexpr double kPiSqOver6 = std::numbers::pi * std::numbers::pi / 6.0;
  switch (in.kind) {
    case BoundKind::avg_cumulative:
      return std::sqrt(c1(in.noise_variance) * t * gamma);
    case BoundKind::avg_rate:
      return std::sqrt(c1(in.noise_variance) * gamma / t);
    case BoundKind::max_finite_cumulative:
      return std::sqrt(c1_tilde(in.noise_variance, in.n_candidates) * t * gamma);
    case BoundKind::max_finite_rate:
      return std::sqrt(c1_tilde(in.noise_variance, in.n_candidates) * gamma / t);
    case BoundKind::max_infinite_cumulative:
      return kPiSqOver6 + std::sqrt(c1_check(in.noise_variance) * t * gamma * (2.0 + in.s_t));
    case BoundKind::max_infinite_rate:
      return kPiSqOver6 / t + std::sqrt(c1_check(in.noise_variance) * gamma * (2.0 + in.s_t) / t);
  }
  return 0.0;
}

}  // namespace lsekit::ls
