#pragma once

#include "lsekit/gp/kernel.hpp"
#include "lsekit/gp/posterior.hpp"
#include "lsekit/rng.hpp"
#include "lsekit/types.hpp"

#include <span>
#include <vector>

namespace lsekit::ls {

enum class Side { H, L };

// Split of the evaluation points into the estimated super-level set H
// (posterior mean >= theta) and its complement L.
struct Classification {
  double theta = 0.0;
  MembershipFlags in_h;

  std::size_t size() const { return in_h.size(); }
  std::size_t count_h() const;
  Side side(std::size_t i) const { return in_h[i] ? Side::H : Side::L; }
};

Classification classify(const Vector& mean, double theta);
Classification classify(const gp::Posterior& post, const PointSet& xs, double theta);

// 0 when correctly classified, |f - theta| otherwise.
double loss_point(double f_val, double theta, Side side);

// Mean of loss_point over the evaluation points. ConfigError on length
// mismatch.
double loss_r(const Classification& cls, std::span<const double> truth);
double maxvalue_loss(const Classification& cls, std::span<const double> truth);

// True super-level flags f >= theta.
MembershipFlags true_superlevel(std::span<const double> truth, double theta);

struct FScore {
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
};

// Empty denominators: |H_est| = 0 gives precision 1 iff |H_true| = 0 (else
// 0); |H_true| = 0 gives recall 1 iff |H_est| = 0 (else 0); precision +
// recall = 0 gives F = 0.
FScore fscore(const Classification& cls, const MembershipFlags& true_h);

// Posterior-expected loss of a point with f ~ N(mu, sigma^2) that sits on
// `side`. sigma = 0 returns the deterministic limit.
double expected_loss_closed_form(double mu, double sigma, double theta, Side side);

// Average expected loss of a stored classification under the current
// posterior moments.
double expected_avg_loss(const Vector& mean, const Vector& var, const Classification& cls);
double expected_avg_loss(const gp::Posterior& post, const Classification& cls,
                         const PointSet& xs);

// Monte-Carlo estimate of which stored classification has the smallest
// posterior-expected max-value loss. Draws `samples` joint paths of f at xs
// and returns the 1-based index i minimising the mean of max_x loss_i;
// ties go to the largest index.
struct TCheckResult {
  int index = 1;
  std::vector<double> expected_max_loss;  // per stored classification
};
TCheckResult estimate_t_check(const gp::Posterior& post,
                              std::span<const Classification> stored, const PointSet& xs,
                              double theta, int samples, Rng& rng,
                              Exec exec = Exec::parallel);
// Same estimator from precomputed sample paths (one per column).
TCheckResult estimate_t_check(const Matrix& sample_paths,
                              std::span<const Classification> stored, double theta,
                              Exec exec = Exec::parallel);

// Greedy estimate of the maximum information gain: at each of `horizon`
// steps add the candidate with the largest posterior variance (repeats
// allowed) and accumulate 1/2 log(1 + var / noise). Returns the cumulative
// gains g_1..g_horizon. By submodularity g_t >= (1 - 1/e) gamma_t.
std::vector<double> info_gain_greedy(const gp::KernelSpec& kernel, const PointSet& candidates,
                                     double noise_variance, int horizon);

// ---- theorem right-hand sides ---------------------------------------------

enum class BoundKind {
  avg_cumulative,       // E[R_t]   <= sqrt(C1 t gamma_t)
  avg_rate,             // E[r_t]   <= sqrt(C1 gamma_t / t)
  max_finite_cumulative,  // E[~R_t] <= sqrt(~C1 t gamma_t)
  max_finite_rate,      // E[~r_t^] <= sqrt(~C1 gamma_t / t)
  max_infinite_cumulative,  // E[~R_t] <= pi^2/6 + sqrt(vC1 t gamma_t (2 + s_t))
  max_infinite_rate,    // E[~r_t^] <= pi^2/(6t) + sqrt(vC1 gamma_t (2 + s_t) / t)
};

struct BoundInputs {
  BoundKind kind = BoundKind::avg_cumulative;
  int t = 1;
  double gamma = 0.0;
  double noise_variance = 1.0;
  double n_candidates = 1.0;  // |X| for the finite max-value bounds
  double s_t = 0.0;           // 2 d log(tau_t) for the infinite max-value bounds
};

// 4 / log(1 + 1/noise)
double c1(double noise_variance);
// (4 + 4 log|X|) / log(1 + 1/noise)
double c1_tilde(double noise_variance, double n_candidates);
// 2 / log(1 + 1/noise)
double c1_check(double noise_variance);

// ConfigError when noise_variance <= 0.
double bound_rhs(const BoundInputs& in);

}  // namespace lsekit::ls
