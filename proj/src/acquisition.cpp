#include "lsekit/acquisition.hpp"

#include "lsekit/discretize.hpp"
#include "lsekit/error.hpp"
#include "lsekit/kernels/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace lsekit::acq {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInfiniteLseCardinality = 1e15;
}  // namespace

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::random: return "random";
    case Rule::us: return "us";
    case Rule::straddle: return "straddle";
    case Rule::lse: return "lse";
    case Rule::mile: return "mile";
    case Rule::rand_straddle: return "rand_straddle";
    case Rule::rand_straddle_max_finite: return "rand_straddle_max_finite";
    case Rule::rand_straddle_max_infinite: return "rand_straddle_max_infinite";
  }
  return "unknown";
}

Rule rule_from_string(std::string_view name) {
  for (Rule r : {Rule::random, Rule::us, Rule::straddle, Rule::lse, Rule::mile,
                 Rule::rand_straddle, Rule::rand_straddle_max_finite,
                 Rule::rand_straddle_max_infinite}) {
    if (to_string(r) == name) return r;
  }
  throw ConfigError("unknown acquisition rule '" + std::string(name) +
                    "' (expected random, us, straddle, lse, mile, rand_straddle, "
                    "rand_straddle_max_finite or rand_straddle_max_infinite)");
}

void AcquisitionSpec::validate() const {
  if (rule == Rule::straddle && !(beta_sqrt >= 0.0)) {
    throw ConfigError("straddle requires beta_sqrt >= 0");
  }
  if (rule == Rule::lse) {
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("lse requires delta in (0, 1)");
    if (lse_cardinality && !(*lse_cardinality >= 1.0)) {
      throw ConfigError("lse cardinality must be >= 1");
    }
  }
  if (rule == Rule::rand_straddle_max_infinite) {
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("rand_straddle_max_infinite requires a, b > 0");
    if (r && !(*r > 0.0)) throw ConfigError("rand_straddle_max_infinite requires r > 0");
  }
}

double sample_beta_chi2(Rng& rng) { return -2.0 * std::log(rng.uniform_open0()); }

double beta_lse_theoretical(double n_candidates, int t, double delta) {
  if (t < 1) throw ConfigError("beta_lse_theoretical requires t >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("beta_lse_theoretical requires delta in (0,1)");
  const double tt = static_cast<double>(t);
  return std::sqrt(2.0 * std::log(n_candidates * std::numbers::pi * std::numbers::pi * tt * tt /
                                  (6.0 * delta)));
}

double beta_maxloss_finite(double n_candidates, Rng& rng) {
  if (!(n_candidates >= 1.0)) throw ConfigError("beta_maxloss_finite requires |X| >= 1");
  return sample_beta_chi2(rng) + 2.0 * std::log(n_candidates);
}

double beta_maxloss_infinite(double a, double b, double r, int d, int t, Rng& rng) {
  disc::GridSpec spec{a, b, r, d, {}};
  const auto tau = disc::tau_t(spec, t);
  return 2.0 * d * std::log(static_cast<double>(tau)) + sample_beta_chi2(rng);
}

ConfidenceBand confidence_band(const Vector& mean, const Vector& var, double beta_sqrt) {
  if (!(beta_sqrt >= 0.0)) throw ConfigError("confidence_band requires beta_sqrt >= 0");
  const Vector width = beta_sqrt * var.cwiseMax(0.0).cwiseSqrt();
  return {mean + width, mean - width};
}

ConfidenceBand confidence_band(const gp::Posterior& post, const PointSet& xs, double beta_sqrt) {
  Vector mean;
  Vector var;
  post.mean_var(xs, mean, var);
  return confidence_band(mean, var, beta_sqrt);
}

Vector randomized_straddle_score(const ConfidenceBand& band, double theta) {
  return lse_score(band, theta).cwiseMax(0.0);
}

Vector straddle_score(const Vector& mean, const Vector& var, double theta, double beta_sqrt) {
  return lse_score(confidence_band(mean, var, beta_sqrt), theta);
}

Vector straddle_score(const gp::Posterior& post, const PointSet& xs, double theta,
                      double beta_sqrt) {
  return lse_score(confidence_band(post, xs, beta_sqrt), theta);
}

const ConfidenceBand& BandIntersection::update(const ConfidenceBand& band) {
  if (empty()) {
    running_ = band;
  } else {
    if (band.ucb.size() != running_.ucb.size()) {
      throw ConfigError("LSE band intersection needs a persistent candidate set");
    }
    running_.ucb = running_.ucb.cwiseMin(band.ucb);
    running_.lcb = running_.lcb.cwiseMax(band.lcb);
  }
  return running_;
}

Vector lse_score(const ConfidenceBand& band, double theta) {
  return (band.ucb.array() - theta).min(theta - band.lcb.array()).matrix();
}

Vector mile_score(const Vector& mean, const Vector& var, const Matrix& cov, double noise_variance,
                  double theta, Exec exec) {
  return kernels::mile_scores({mean, var, cov, noise_variance, theta}, exec);
}

Vector mile_score(const gp::Posterior& post, const PointSet& xs, double theta, Exec exec) {
  Vector mean;
  Vector var;
  post.mean_var(xs, mean, var, exec);
  const Matrix cov = post.cov(xs);
  return mile_score(mean, var, cov, post.dataset().noise_variance, theta, exec);
}

Eigen::Index argmax_lowest(const Vector& scores, const std::vector<std::uint8_t>* mask) {
  Eigen::Index best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (mask && (*mask)[static_cast<std::size_t>(i)]) continue;
    if (best < 0 || scores[i] > best_score) {
      best = i;
      best_score = scores[i];
    }
  }
  if (best < 0) throw ConfigError("no selectable candidate (empty or fully masked set)");
  return best;
}

Acquirer::Acquirer(AcquisitionSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

Selection Acquirer::select(const CandidateMoments& moments, double theta,
                           const SelectionContext& ctx, Rng& rng) {
  const Eigen::Index n = moments.mean.size();
  if (n == 0) throw ConfigError("select: empty candidate set");
  if (moments.var.size() != n) throw ConfigError("select: mean/var sizes disagree");
  if (ctx.mask && static_cast<Eigen::Index>(ctx.mask->size()) != n) {
    throw ConfigError("select: mask size disagrees with candidates");
  }

  Selection out;
  out.beta = kNaN;
  switch (spec_.rule) {
    case Rule::random: {
      std::vector<Eigen::Index> open;
      open.reserve(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!ctx.mask || !(*ctx.mask)[static_cast<std::size_t>(i)]) open.push_back(i);
      }
      if (open.empty()) throw ConfigError("no selectable candidate (fully masked set)");
      out.index = open[rng.uniform_index(open.size())];
      out.score = kNaN;
      scores_ = Vector::Zero(n);
      return out;
    }
    case Rule::us:
      scores_ = moments.var;
      break;
    case Rule::straddle:
      out.beta = spec_.beta_sqrt * spec_.beta_sqrt;
      scores_ = straddle_score(moments.mean, moments.var, theta, spec_.beta_sqrt);
      break;
    case Rule::lse: {
      const double cardinality = spec_.lse_cardinality.value_or(
          ctx.finite_domain ? ctx.domain_cardinality : kInfiniteLseCardinality);
      const double beta_sqrt = beta_lse_theoretical(cardinality, ctx.t, spec_.delta);
      out.beta = beta_sqrt * beta_sqrt;
      const ConfidenceBand band = confidence_band(moments.mean, moments.var, beta_sqrt);
      const bool intersect = spec_.use_intersection.value_or(ctx.finite_domain);
      if (intersect) {
        if (!ctx.finite_domain) {
          throw ConfigError("lse band intersection requires a finite, persistent candidate set");
        }
        scores_ = lse_score(intersection_.update(band), theta);
      } else {
        scores_ = lse_score(band, theta);
      }
      break;
    }
    case Rule::mile:
      if (!ctx.finite_domain) {
        throw ConfigError("mile does not support continuous domains (unsupported rule)");
      }
      if (!moments.cov) throw ConfigError("mile requires the full candidate covariance");
      scores_ = mile_score(moments.mean, moments.var, *moments.cov, moments.noise_variance, theta);
      break;
    case Rule::rand_straddle:
    case Rule::rand_straddle_max_finite:
    case Rule::rand_straddle_max_infinite: {
      if (spec_.rule == Rule::rand_straddle) {
        out.beta = sample_beta_chi2(rng);
      } else if (spec_.rule == Rule::rand_straddle_max_finite) {
        if (!ctx.finite_domain) {
          throw ConfigError("rand_straddle_max_finite requires a finite domain");
        }
        out.beta = beta_maxloss_finite(ctx.domain_cardinality, rng);
      } else {
        out.beta = beta_maxloss_infinite(spec_.a, spec_.b, spec_.r.value_or(ctx.box_size), ctx.dim,
                                         ctx.t, rng);
      }
      scores_ = randomized_straddle_score(
          confidence_band(moments.mean, moments.var, std::sqrt(out.beta)), theta);
      break;
    }
  }
  out.index = argmax_lowest(scores_, ctx.mask);
  out.score = scores_[out.index];
  return out;
}

Selection select_next(const AcquisitionSpec& spec, const gp::Posterior& post,
                      const PointSet& candidates, double theta, Rng& rng, int t) {
  if (candidates.rows() == 0) throw ConfigError("select_next: empty candidate set");
  Vector mean;
  Vector var;
  post.mean_var(candidates, mean, var);
  Matrix cov;
  CandidateMoments moments{mean, var, nullptr, post.dataset().noise_variance};
  if (spec.rule == Rule::mile) {
    cov = post.cov(candidates);
    moments.cov = &cov;
  }
  SelectionContext ctx;
  ctx.t = t;
  ctx.dim = static_cast<int>(candidates.cols());
  ctx.domain_cardinality = static_cast<double>(candidates.rows());
  Acquirer acquirer(spec);
  return acquirer.select(moments, theta, ctx, rng);
}

}  // namespace lsekit::acq
