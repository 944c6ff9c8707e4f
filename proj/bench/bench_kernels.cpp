// Serial reference vs OpenMP kernels on problem sizes from the golden configs.
#include "lsekit/gp/posterior.hpp"
#include "lsekit/kernels/kernels.hpp"
#include "lsekit/rng.hpp"

#include <benchmark/benchmark.h>

using namespace lsekit;

namespace {

PointSet cloud(Eigen::Index n, Eigen::Index d, Rng& rng) {
  PointSet p(n, d);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = 10.0 * rng.uniform() - 5.0;
  return p;
}

const gp::KernelSpec kKernel = gp::KernelSpec::gaussian(1.0, 2.0);

struct Fitted {
  PointSet queries;
  gp::Posterior post;
};

Fitted fitted(Eigen::Index n_queries, Eigen::Index n_train) {
  Rng rng(3);
  gp::Dataset data;
  data.noise_variance = 1e-6;
  const PointSet train = cloud(n_train, 2, rng);
  for (Eigen::Index i = 0; i < n_train; ++i) data.add(train.row(i), rng.normal());
  return {cloud(n_queries, 2, rng), gp::Posterior::fit(data, kKernel)};
}

template <Exec E>
void BM_gram(benchmark::State& state) {
  Rng rng(1);
  const PointSet a = cloud(state.range(0), 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::gram(kKernel, a, a, E));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <Exec E>
void BM_moments(benchmark::State& state) {
  const Fitted f = fitted(state.range(0), 100);
  Vector mean, var;
  for (auto _ : state) {
    f.post.mean_var(f.queries, mean, var, E);
    benchmark::DoNotOptimize(var.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Exec E>
void BM_mile(benchmark::State& state) {
  const Fitted f = fitted(state.range(0), 30);
  Vector mean, var;
  f.post.mean_var(f.queries, mean, var);
  const Matrix cov = f.post.cov(f.queries);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::mile_scores({mean, var, cov, 1e-6, 0.0}, E));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <Exec E>
void BM_max_loss(benchmark::State& state) {
  Rng rng(4);
  Matrix samples(state.range(0), 100);
  for (Eigen::Index i = 0; i < samples.size(); ++i) samples.data()[i] = rng.normal();
  std::vector<MembershipFlags> cls(200, MembershipFlags(static_cast<std::size_t>(state.range(0))));
  for (auto& c : cls) {
    for (auto& v : c) v = rng.uniform() < 0.5;
  }
  for (auto _ : state) benchmark::DoNotOptimize(kernels::max_loss_table(samples, cls, 0.0, E));
}

}  // namespace

BENCHMARK(BM_gram<Exec::serial>)->Arg(500)->Arg(2500);
BENCHMARK(BM_gram<Exec::parallel>)->Arg(500)->Arg(2500);
BENCHMARK(BM_moments<Exec::serial>)->Arg(2500)->Arg(100000);
BENCHMARK(BM_moments<Exec::parallel>)->Arg(2500)->Arg(100000);
BENCHMARK(BM_mile<Exec::serial>)->Arg(400)->Arg(2500);
BENCHMARK(BM_mile<Exec::parallel>)->Arg(400)->Arg(2500);
BENCHMARK(BM_max_loss<Exec::serial>)->Arg(256)->Arg(2500);
BENCHMARK(BM_max_loss<Exec::parallel>)->Arg(256)->Arg(2500);

BENCHMARK_MAIN();
