#include "lsekit/runner/bound_check.hpp"

#include "lsekit/benchlab.hpp"
#include "lsekit/discretize.hpp"
#include "lsekit/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lsekit::run {

bool TheoryReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const BoundRow& r) { return r.pass_cumulative && r.pass_rate; });
}

std::string TheoryReport::verdict() const {
  if (misspecified) return "CAVEAT";
  return all_pass() ? "PASS" : "FAIL";
}

bool is_misspecified(const ExperimentConfig& cfg) {
  if (cfg.blackbox.kind != "gp_sample") return true;
  if (cfg.blackbox.sample_kernel && !(*cfg.blackbox.sample_kernel == cfg.kernel)) return true;
  return cfg.observation_noise() != cfg.noise_variance;
}

namespace {

// Points over which the greedy information gain is computed: the candidate
// set on finite domains, a slice of seed 0's test set on boxes.
PointSet gain_points(const ExperimentConfig& cfg) {
  if (cfg.finite_domain()) return build_problem(cfg, 0).points;
  constexpr Eigen::Index kBoxGainPoints = 2000;
  ExperimentConfig small = cfg;
  small.eval.test_points = static_cast<int>(std::min<Eigen::Index>(kBoxGainPoints, cfg.eval.test_points));
  return build_problem(small, 0).points;
}

}  // namespace

TheoryReport bound_check(const RunRecord& record, const ExperimentConfig& cfg) {
  if (!(cfg.noise_variance > 0.0)) {
    throw ConfigError("bound_check needs noise_variance > 0 (the theorem constants diverge at 0)");
  }
  TheoryReport rep;
  rep.misspecified = is_misspecified(cfg);
  const bool max_loss = cfg.algorithm_variant != AlgorithmVariant::avg_loss;
  switch (cfg.algorithm_variant) {
    case AlgorithmVariant::avg_loss:
      rep.cumulative_kind = ls::BoundKind::avg_cumulative;
      rep.rate_kind = ls::BoundKind::avg_rate;
      break;
    case AlgorithmVariant::max_finite:
      rep.cumulative_kind = ls::BoundKind::max_finite_cumulative;
      rep.rate_kind = ls::BoundKind::max_finite_rate;
      break;
    case AlgorithmVariant::max_infinite:
      rep.cumulative_kind = ls::BoundKind::max_infinite_cumulative;
      rep.rate_kind = ls::BoundKind::max_infinite_rate;
      break;
  }

  const int T = cfg.iterations;
  std::vector<double> sum_cum(static_cast<std::size_t>(T), 0.0);
  std::vector<double> sum_rate(static_cast<std::size_t>(T), 0.0);
  for (const auto& s : record.seeds) {
    if (!s.ok || static_cast<int>(s.rows.size()) != T) continue;
    ++rep.seeds_used;
    double running = 0.0;
    for (int t = 1; t <= T; ++t) {
      const IterationRow& row = s.rows[static_cast<std::size_t>(t - 1)];
      const double loss = max_loss ? row.max_loss : row.r_t;
      if (std::isnan(loss)) {
        throw ConfigError("bound_check needs every iteration evaluated (set eval.every = 1)");
      }
      running += loss;
      sum_cum[static_cast<std::size_t>(t - 1)] += running;
      sum_rate[static_cast<std::size_t>(t - 1)] += max_loss ? running / t : loss;
    }
  }
  if (rep.seeds_used == 0) throw ConfigError("bound_check: no completed seeds");

  const PointSet pts = gain_points(cfg);
  const std::vector<double> gains = ls::info_gain_greedy(cfg.kernel, pts, cfg.noise_variance, T);
  const double envelope = 1.0 - 1.0 / std::numbers::e;

  disc::GridSpec gs;
  if (cfg.algorithm_variant == AlgorithmVariant::max_infinite) {
    const acq::AcquisitionSpec& spec = record.acquisition;
    double r = 0.0;
    for (std::size_t i = 0; i < cfg.domain.lower.size(); ++i) {
      r = std::max(r, cfg.domain.upper[i] - cfg.domain.lower[i]);
    }
    gs.a = spec.a;
    gs.b = spec.b;
    gs.r = spec.r.value_or(r);
    gs.d = static_cast<int>(cfg.domain.lower.size());
  }

  for (int t = 1; t <= T; ++t) {
    BoundRow row;
    row.t = t;
    row.gamma_hat = gains[static_cast<std::size_t>(t - 1)];
    row.gamma_envelope = row.gamma_hat / envelope;
    row.mean_cumulative = sum_cum[static_cast<std::size_t>(t - 1)] / rep.seeds_used;
    row.mean_rate = sum_rate[static_cast<std::size_t>(t - 1)] / rep.seeds_used;

    ls::BoundInputs in;
    in.t = t;
    in.gamma = row.gamma_envelope;
    in.noise_variance = cfg.noise_variance;
    in.n_candidates = static_cast<double>(pts.rows());
    if (cfg.algorithm_variant == AlgorithmVariant::max_infinite) {
      in.s_t = 2.0 * gs.d * std::log(static_cast<double>(disc::tau_t(gs, t)));
    }
    in.kind = rep.cumulative_kind;
    row.rhs_cumulative = ls::bound_rhs(in);
    in.kind = rep.rate_kind;
    row.rhs_rate = ls::bound_rhs(in);
    row.pass_cumulative = row.mean_cumulative <= row.rhs_cumulative;
    row.pass_rate = row.mean_rate <= row.rhs_rate;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace lsekit::run
