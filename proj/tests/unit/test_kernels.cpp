#include "lsekit/gp/posterior.hpp"
#include "lsekit/kernels/kernels.hpp"

#include <doctest.h>

using namespace lsekit;

namespace {

PointSet cloud(int n, int d, Rng& rng) {
  PointSet x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) x(i, k) = 4.0 * rng.uniform() - 2.0;
  }
  return x;
}

}  // namespace

TEST_CASE("kernels: parallel paths equal the serial reference exactly") {
  Rng rng(3);
  const gp::KernelSpec k = gp::KernelSpec::matern32(1.5, 0.9);
  const PointSet a = cloud(70, 3, rng);
  const PointSet b = cloud(90, 3, rng);
  CHECK(kernels::gram_serial(k, a, b) == kernels::gram_omp(k, a, b));

  gp::Dataset d;
  d.noise_variance = 0.01;
  d.inputs = a;
  d.outputs = Vector::Random(70);
  const auto post = gp::Posterior::fit(d, k);
  const kernels::PosteriorFactors f{post.kernel(), post.dataset().inputs, post.chol(), post.weights()};
  Vector m1, v1, m2, v2, m3, m4;
  kernels::posterior_moments_serial(f, b, m1, v1);
  kernels::posterior_moments_omp(f, b, m2, v2);
  CHECK(m1 == m2);
  CHECK(v1 == v2);
  kernels::posterior_mean_serial(f, b, m3);
  kernels::posterior_mean_omp(f, b, m4);
  CHECK(m3 == m4);
  CHECK((m3 - m1).cwiseAbs().maxCoeff() < 1e-12);

  Vector mean, var;
  post.mean_var(b, mean, var);
  const Matrix cov = post.cov(b);
  const kernels::MileInputs in{mean, var, cov, 0.01, 0.2};
  CHECK(kernels::mile_scores_serial(in) == kernels::mile_scores_omp(in));

  Matrix samples(90, 25);
  for (Eigen::Index i = 0; i < samples.size(); ++i) samples.data()[i] = rng.normal();
  std::vector<MembershipFlags> cls(7, MembershipFlags(90));
  for (auto& c : cls) {
    for (auto& v : c) v = rng.uniform() < 0.5;
  }
  CHECK(kernels::max_loss_table_serial(samples, cls, 0.1) ==
        kernels::max_loss_table_omp(samples, cls, 0.1));
}

TEST_CASE("kernels: empty training set gives prior moments") {
  const gp::KernelSpec k = gp::KernelSpec::gaussian(2.5, 1.0);
  PointSet inputs(0, 2);
  Matrix chol(0, 0);
  Vector w(0);
  Rng rng(1);
  const PointSet q = cloud(4, 2, rng);
  Vector mean, var;
  kernels::posterior_moments({k, inputs, chol, w}, q, mean, var);
  CHECK(mean.isZero());
  CHECK((var.array() == 2.5).all());
}

TEST_CASE("kernels: normal cdf and pdf") {
  CHECK(kernels::normal_cdf(0.0) == 0.5);
  CHECK(kernels::normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
  CHECK(kernels::normal_pdf(0.3) == doctest::Approx(0.3813878154605241).epsilon(1e-14));
  CHECK(kernels::normal_cdf(-40.0) == 0.0);
}

TEST_CASE("kernels: mile with zero cross-covariance counts current super-level points") {
  Vector mean(3);
  mean << 1.0, -1.0, 0.5;
  const Vector var = Vector::Ones(3);
  const Matrix cov = Matrix::Identity(3, 3);
  const Vector s = kernels::mile_scores({mean, var, cov, 0.0, 0.0}, Exec::serial);
  // Candidate i moves only itself: nu(i|i) = 1, others fixed at their indicator.
  CHECK(s[0] == doctest::Approx(kernels::normal_cdf(1.0) + 0 + 1).epsilon(1e-14));
  CHECK(s[1] == doctest::Approx(1 + kernels::normal_cdf(-1.0) + 1).epsilon(1e-14));
}
