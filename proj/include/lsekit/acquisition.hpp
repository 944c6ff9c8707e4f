#pragma once

#include "lsekit/gp/posterior.hpp"
#include "lsekit/rng.hpp"
#include "lsekit/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lsekit::acq {

enum class Rule {
  random,
  us,
  straddle,
  lse,
  mile,
  rand_straddle,
  rand_straddle_max_finite,
  rand_straddle_max_infinite,
};

std::string_view to_string(Rule rule);
Rule rule_from_string(std::string_view name);

// Which acquisition to run plus the parameters of its confidence policy.
struct AcquisitionSpec {
  Rule rule = Rule::rand_straddle;
  // straddle: fixed beta^{1/2}.
  double beta_sqrt = 3.0;
  // lse: failure probability in the theoretical beta schedule.
  double delta = 0.05;
  // lse: running intersection of confidence bands (finite domains only).
  // Unset means "on for finite domains, off for continuous ones".
  std::optional<bool> use_intersection;
  // lse: |X| used in the beta schedule; unset means the candidate count
  // (finite) or 1e15 (continuous).
  std::optional<double> lse_cardinality;
  // rand_straddle_max_infinite: Lipschitz tail constants and box size.
  double a = 1.0;
  double b = 1.0;
  std::optional<double> r;

  // Throws ConfigError on out-of-range parameters.
  void validate() const;

  bool operator==(const AcquisitionSpec&) const = default;
};

// Pointwise credible band mean +- beta^{1/2} * sd.
struct ConfidenceBand {
  Vector ucb;
  Vector lcb;
};

// ---- confidence parameters -------------------------------------------------

// beta ~ chi^2 with 2 degrees of freedom, by inverse transform -2 ln U,
// U uniform on (0, 1].
double sample_beta_chi2(Rng& rng);

// sqrt(2 log(|X| pi^2 t^2 / (6 delta))).
double beta_lse_theoretical(double n_candidates, int t, double delta);

// xi + 2 log|X| with xi ~ chi^2_2.
double beta_maxloss_finite(double n_candidates, Rng& rng);

// 2 d log(tau_t) + xi with tau_t from the discretisation schedule.
double beta_maxloss_infinite(double a, double b, double r, int d, int t, Rng& rng);

// ---- scores ------------------------------------------------------------------

ConfidenceBand confidence_band(const Vector& mean, const Vector& var, double beta_sqrt);
ConfidenceBand confidence_band(const gp::Posterior& post, const PointSet& xs, double beta_sqrt);

// max{min{ucb - theta, theta - lcb}, 0}.
Vector randomized_straddle_score(const ConfidenceBand& band, double theta);

// beta^{1/2} sd - |mean - theta|; may be negative.
Vector straddle_score(const Vector& mean, const Vector& var, double theta, double beta_sqrt);
Vector straddle_score(const gp::Posterior& post, const PointSet& xs, double theta,
                      double beta_sqrt);

// Running intersection of confidence bands over a persistent candidate set:
// tilde_ucb = min over past ucb, tilde_lcb = max over past lcb.
class BandIntersection {
 public:
  // Folds this iteration's band in and returns the running intersection.
  const ConfidenceBand& update(const ConfidenceBand& band);
  const ConfidenceBand& current() const { return running_; }
  bool empty() const { return running_.ucb.size() == 0; }

 private:
  ConfidenceBand running_;
};

// min{tilde_ucb - theta, theta - tilde_lcb}. Pass the raw band when the
// intersection is disabled.
Vector lse_score(const ConfidenceBand& band, double theta);

// Expected one-step-ahead super-level count for each candidate.
Vector mile_score(const gp::Posterior& post, const PointSet& xs, double theta,
                  Exec exec = Exec::parallel);
Vector mile_score(const Vector& mean, const Vector& var, const Matrix& cov, double noise_variance,
                  double theta, Exec exec = Exec::parallel);

// ---- selection ---------------------------------------------------------------

// Posterior state at the candidates for one selection step.
struct CandidateMoments {
  const Vector& mean;
  const Vector& var;
  // Full covariance; only MILE needs it.
  const Matrix* cov = nullptr;
  double noise_variance = 0.0;
};

// How the domain looks to the selector.
struct SelectionContext {
  int t = 1;                  // iteration, 1-based
  bool finite_domain = true;  // false: candidates are a fresh random sample
  int dim = 1;
  // |X| for beta_maxloss_finite and the default LSE schedule.
  double domain_cardinality = 1.0;
  // r for rand_straddle_max_infinite when the spec leaves it unset.
  double box_size = 1.0;
  // Candidates excluded from the argmax (already observed, no re-observation).
  const std::vector<std::uint8_t>* mask = nullptr;
};

struct Selection {
  Eigen::Index index = 0;
  double beta = 0.0;   // beta_t (not its square root); NaN when the rule has none
  double score = 0.0;  // winning acquisition value; NaN for random
};

// Stateful selector: owns the LSE band intersection across iterations.
class Acquirer {
 public:
  explicit Acquirer(AcquisitionSpec spec);

  const AcquisitionSpec& spec() const { return spec_; }

  // Draws beta_t (one draw per call, shared by all candidates), scores the
  // candidates and returns the argmax with ties to the lowest index.
  Selection select(const CandidateMoments& moments, double theta, const SelectionContext& ctx,
                   Rng& rng);

  // Score vector of the last select() call.
  const Vector& last_scores() const { return scores_; }

 private:
  AcquisitionSpec spec_;
  BandIntersection intersection_;
  Vector scores_;
};

// Argmax with ties to the lowest index, skipping masked entries.
// ConfigError if nothing is selectable.
Eigen::Index argmax_lowest(const Vector& scores, const std::vector<std::uint8_t>* mask = nullptr);

// One-shot selection on a fitted posterior (no state carried across calls).
Selection select_next(const AcquisitionSpec& spec, const gp::Posterior& post,
                      const PointSet& candidates, double theta, Rng& rng, int t = 1);

}  // namespace lsekit::acq
