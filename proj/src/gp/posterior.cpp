#include "lsekit/gp/posterior.hpp"

#include "lsekit/error.hpp"
#include "lsekit/kernels/kernels.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

namespace lsekit::gp {

void Dataset::add(PointRef x, double y) {
  if (inputs.rows() == 0) {
    inputs.resize(0, x.size());
  } else if (x.size() != inputs.cols()) {
    throw ConfigError("Dataset::add: point has dimension " + std::to_string(x.size()) +
                      ", dataset has " + std::to_string(inputs.cols()));
  }
  const Eigen::Index t = inputs.rows();
  inputs.conservativeResize(t + 1, Eigen::NoChange);
  inputs.row(t) = x;
  outputs.conservativeResize(t + 1);
  outputs[t] = y;
}

void Dataset::validate() const {
  if (inputs.rows() != outputs.size()) {
    throw ConfigError("dataset has " + std::to_string(inputs.rows()) + " inputs but " +
                      std::to_string(outputs.size()) + " outputs");
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw ConfigError("noise variance must be finite and nonnegative");
  }
}

namespace {

// Factorises `gram` + (noise + jitter) I, escalating jitter along the nugget
// schedule. Returns the jitter used.
double factorise(const Matrix& gram, double noise, double amplitude, Matrix& chol) {
  const Eigen::Index t = gram.rows();
  double jitter = noise == 0.0 ? kJitterStart * amplitude : 0.0;
  const double max_jitter = kJitterMax * amplitude * (1.0 + 1e-9);
  while (true) {
    Matrix shifted = gram;
    shifted.diagonal().array() += noise + jitter;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() == Eigen::Success) {
      chol = llt.matrixL();
      if (chol.diagonal().allFinite() && (chol.diagonal().array() > 0.0).all()) return jitter;
    }
    jitter = jitter == 0.0 ? kJitterStart * amplitude : jitter * 10.0;
    if (jitter > max_jitter) {
      std::ostringstream msg;
      msg << "Cholesky factorisation of the " << t << "x" << t
          << " Gram matrix failed even with jitter " << kJitterMax * amplitude
          << "; the design is too ill-conditioned (duplicate inputs with zero noise?)";
      throw NumericalError(msg.str());
    }
  }
}

}  // namespace

Posterior Posterior::fit(Dataset data, const KernelSpec& kernel) {
  data.validate();
  kernel.validate();
  Posterior post(std::move(data), kernel);
  if (post.data_.size() == 0) return post;
  const Matrix gram = kernels::gram(kernel, post.data_.inputs, post.data_.inputs);
  post.jitter_ = factorise(gram, post.data_.noise_variance, kernel.amplitude, post.chol_);
  post.refresh_weights();
  return post;
}

void Posterior::refresh_weights() {
  weights_ = chol_.triangularView<Eigen::Lower>().solve(data_.outputs);
  chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(weights_);
}

MeanVar Posterior::mean_var(PointRef x) const {
  PointSet one(1, x.size());
  one.row(0) = x;
  Vector mean;
  Vector var;
  kernels::posterior_moments_serial({kernel_, data_.inputs, chol_, weights_}, one, mean, var);
  return {mean[0], var[0]};
}

void Posterior::mean_var(const PointSet& xs, Vector& mean, Vector& var, Exec exec) const {
  kernels::posterior_moments({kernel_, data_.inputs, chol_, weights_}, xs, mean, var, exec);
}

Vector Posterior::mean(const PointSet& xs, Exec exec) const {
  Vector out;
  kernels::posterior_mean({kernel_, data_.inputs, chol_, weights_}, xs, out, exec);
  return out;
}

Matrix Posterior::cov(const PointSet& xs) const {
  if (xs.rows() == 0) throw ConfigError("posterior_cov: empty query set");
  Matrix out = kernels::gram(kernel_, xs, xs);
  if (data_.size() > 0) {
    Matrix cross = kernels::gram(kernel_, data_.inputs, xs);
    chol_.triangularView<Eigen::Lower>().solveInPlace(cross);
    out.noalias() -= cross.transpose() * cross;
  }
  out = 0.5 * (out + out.transpose()).eval();
  for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, i) = std::max(0.0, out(i, i));
  return out;
}

Posterior Posterior::with_observation(PointRef x, double y) const {
  Dataset next = data_;
  next.add(x, y);
  const Eigen::Index t = data_.size();
  if (t == 0) return fit(std::move(next), kernel_);

  Vector cross(t);
  for (Eigen::Index i = 0; i < t; ++i) {
    cross[i] = kernel_.from_sqdist(squared_distance(x.data(), data_.inputs.row(i).data(), x.size()));
  }
  chol_.triangularView<Eigen::Lower>().solveInPlace(cross);
  const double pivot_sq =
      kernel_.amplitude + data_.noise_variance + jitter_ - cross.squaredNorm();
  if (!(pivot_sq > 1e-14 * kernel_.amplitude)) return fit(std::move(next), kernel_);

  Posterior out(std::move(next), kernel_);
  out.jitter_ = jitter_;
  out.chol_ = Matrix::Zero(t + 1, t + 1);
  out.chol_.topLeftCorner(t, t) = chol_;
  out.chol_.block(t, 0, 1, t) = cross.transpose();
  out.chol_(t, t) = std::sqrt(pivot_sq);
  out.refresh_weights();
  return out;
}

Matrix posterior_cov(const Posterior& post, const PointSet& xs) { return post.cov(xs); }

Matrix sample_mvn(const Vector& mean, const Matrix& cov, int count, Rng& rng, double scale) {
  const Eigen::Index n = mean.size();
  if (count < 1) throw ConfigError("sample count must be at least 1");
  if (cov.rows() != n || cov.cols() != n) throw ConfigError("sample_mvn: mean/cov size mismatch");
  Matrix draws(n, count);
  if (n == 0) return draws;
  if (cov.cwiseAbs().maxCoeff() == 0.0) {
    draws.colwise() = mean;
    return draws;
  }
  Matrix chol;
  bool ok = false;
  for (double nugget = kJitterStart * scale; nugget <= kJitterMax * scale * (1.0 + 1e-9);
       nugget *= 10.0) {
    Matrix shifted = cov;
    shifted.diagonal().array() += nugget;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() == Eigen::Success) {
      chol = llt.matrixL();
      if (chol.diagonal().allFinite()) {
        ok = true;
        break;
      }
    }
  }
  if (!ok) {
    throw NumericalError("sample_mvn: covariance of size " + std::to_string(n) +
                         " is not positive definite even with nugget " +
                         std::to_string(kJitterMax * scale));
  }
  Matrix z(n, count);
  for (int j = 0; j < count; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = rng.normal();
  }
  draws.noalias() = chol.triangularView<Eigen::Lower>() * z;
  draws.colwise() += mean;
  return draws;
}

Matrix sample_paths(const Posterior& post, const PointSet& xs, int count, Rng& rng) {
  Vector mean = post.dataset().size() == 0 ? Vector::Zero(xs.rows()) : post.mean(xs, Exec::serial);
  return sample_mvn(mean, post.cov(xs), count, rng, post.kernel().amplitude);
}

}  // namespace lsekit::gp
