#pragma once

// Data-parallel inner loops. Every kernel has a plain serial reference
// (`*_serial`) and an OpenMP version (`*_omp`) that must produce identical
// results; the dispatching overload picks one from an Exec policy. Without
// OpenMP the `*_omp` entry points run the serial loop.

#include "lsekit/gp/kernel.hpp"
#include "lsekit/types.hpp"

#include <span>

namespace lsekit::kernels {

// ---- Gram matrices -------------------------------------------------------

Matrix gram_serial(const gp::KernelSpec& kernel, const PointSet& a, const PointSet& b);
Matrix gram_omp(const gp::KernelSpec& kernel, const PointSet& a, const PointSet& b);
Matrix gram(const gp::KernelSpec& kernel, const PointSet& a, const PointSet& b,
            Exec exec = Exec::parallel);

// ---- Posterior moments at many query points --------------------------------

// Borrowed view of a fitted posterior: training inputs, the lower Cholesky
// factor of (K + noise I + jitter I) and the weight vector solving it for y.
struct PosteriorFactors {
  const gp::KernelSpec& kernel;
  const PointSet& inputs;
  const Matrix& chol;
  const Vector& weights;
};

// mean(x) = k(x)^T w,  var(x) = k(x,x) - |L^{-1} k(x)|^2, clamped at 0.
void posterior_moments_serial(const PosteriorFactors& post, const PointSet& queries,
                              Vector& mean, Vector& var);
void posterior_moments_omp(const PosteriorFactors& post, const PointSet& queries,
                           Vector& mean, Vector& var);
void posterior_moments(const PosteriorFactors& post, const PointSet& queries, Vector& mean,
                       Vector& var, Exec exec = Exec::parallel);

void posterior_mean_serial(const PosteriorFactors& post, const PointSet& queries, Vector& mean);
void posterior_mean_omp(const PosteriorFactors& post, const PointSet& queries, Vector& mean);
void posterior_mean(const PosteriorFactors& post, const PointSet& queries, Vector& mean,
                    Exec exec = Exec::parallel);

// ---- MILE expected super-level counts --------------------------------------

// Finite-candidate posterior state needed by the one-step-lookahead count.
struct MileInputs {
  const Vector& mean;
  const Vector& var;
  const Matrix& cov;  // full posterior covariance over the candidates
  double noise_variance;
  double theta;
};

// score(x) = sum_{x'} Phi((mean(x') - theta) / nu(x'|x)),
// nu(x'|x) = |cov(x', x)| / sqrt(var(x) + noise); nu = 0 gives the indicator.
// Terms with |z| > 8.5 are taken as exactly 0 or 1 (the neglected tail is
// below 1e-17 per term).
Vector mile_scores_serial(const MileInputs& in);
Vector mile_scores_omp(const MileInputs& in);
Vector mile_scores(const MileInputs& in, Exec exec = Exec::parallel);

// ---- Max-value loss of stored classifications on sample paths --------------

// samples: n x M, one sample path per column. Returns a (#classifications x M)
// table whose (i, j) entry is max_x loss(samples(x, j), classification_i(x)).
Matrix max_loss_table_serial(const Matrix& samples, std::span<const MembershipFlags> classes,
                             double theta);
Matrix max_loss_table_omp(const Matrix& samples, std::span<const MembershipFlags> classes,
                          double theta);
Matrix max_loss_table(const Matrix& samples, std::span<const MembershipFlags> classes,
                      double theta, Exec exec = Exec::parallel);

double normal_cdf(double z);
double normal_pdf(double z);

}  // namespace lsekit::kernels
