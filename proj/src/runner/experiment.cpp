#include "lsekit/runner/experiment.hpp"

#include "lsekit/benchlab.hpp"
#include "lsekit/discretize.hpp"
#include "lsekit/error.hpp"
#include "lsekit/gp/grid_posterior.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

namespace lsekit::run {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

lab::BlackBox make_blackbox(const ExperimentConfig& cfg, const PointSet& grid, int seed) {
  const auto& bb = cfg.blackbox;
  if (bb.kind == "analytic") return lab::BlackBox::analytic(lab::analytic_from_string(bb.name));
  if (bb.kind == "gp_sample") {
    Rng rng = seed_stream(cfg.master_seed, seed, Stream::f);
    return lab::gen_gp_sample(bb.sample_kernel.value_or(cfg.kernel), grid, rng);
  }
  return lab::ingest_lifetime_csv(cfg.csv_path(), bb.strict).blackbox();
}

double box_size(const ExperimentConfig& cfg) {
  double r = 0.0;
  for (std::size_t i = 0; i < cfg.domain.lower.size(); ++i) {
    r = std::max(r, cfg.domain.upper[i] - cfg.domain.lower[i]);
  }
  return r;
}

struct Metrics {
  double r = kNaN;
  double max_loss = kNaN;
  ls::FScore f{kNaN, kNaN, kNaN};
};

Metrics evaluate(const ls::Classification& cls, const Vector& truth, const MembershipFlags& true_h) {
  const std::span<const double> tv(truth.data(), static_cast<std::size_t>(truth.size()));
  Metrics m;
  m.r = ls::loss_r(cls, tv);
  m.max_loss = ls::maxvalue_loss(cls, tv);
  m.f = ls::fscore(cls, true_h);
  return m;
}

// Lattice used by the infinite-domain variant at iteration t.
disc::Lattice lattice_at(const ExperimentConfig& cfg, const acq::AcquisitionSpec& spec, int t) {
  disc::GridSpec gs;
  gs.a = spec.a;
  gs.b = spec.b;
  gs.r = spec.r.value_or(box_size(cfg));
  gs.d = static_cast<int>(cfg.domain.lower.size());
  gs.origin = Eigen::Map<const Point>(cfg.domain.lower.data(), gs.d);
  return disc::Lattice(disc::tau_t(gs, t), gs.r, gs.d, gs.origin);
}

PointSet snap(const disc::Lattice& lattice, const PointSet& xs) {
  PointSet out(xs.rows(), xs.cols());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) out.row(i) = lattice.nearest(xs.row(i));
  return out;
}

// Classification of the infinite-domain variant: x goes to H when the mean
// at its nearest lattice point clears theta.
ls::Classification classify_snapped(const gp::Posterior& post, const ExperimentConfig& cfg,
                                    const acq::AcquisitionSpec& spec, int t, const PointSet& xs) {
  const disc::Lattice lattice = lattice_at(cfg, spec, t);
  return ls::classify(post.mean(snap(lattice, xs), Exec::serial), cfg.theta);
}

gp::Dataset prefix(const gp::Dataset& data, Eigen::Index n) {
  gp::Dataset out;
  out.noise_variance = data.noise_variance;
  out.inputs = data.inputs.topRows(n);
  out.outputs = data.outputs.head(n);
  return out;
}

class Stopwatch {
 public:
  explicit Stopwatch(bool on) : on_(on), start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    if (!on_) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  bool on_;
  std::chrono::steady_clock::time_point start_;
};

void fill_row(IterationRow& row, const Metrics& m, double& cumulative) {
  row.r_t = m.r;
  if (!std::isnan(m.r)) cumulative += m.r;
  row.R_t = cumulative;
  row.max_loss = m.max_loss;
  row.precision = m.f.precision;
  row.recall = m.f.recall;
  row.fscore = m.f.fscore;
}

void set_terminal(TerminalOutput& term, int t_hat, const ls::Classification& cls,
                  const Vector& truth, const MembershipFlags& true_h, bool keep_flags) {
  const Metrics m = evaluate(cls, truth, true_h);
  term.t_hat = t_hat;
  term.r = m.r;
  term.max_loss = m.max_loss;
  term.precision = m.f.precision;
  term.recall = m.f.recall;
  term.fscore = m.f.fscore;
  term.count_h = cls.count_h();
  if (keep_flags) term.in_h = cls.in_h;
}

bool evaluated_at(const ExperimentConfig& cfg, int t) {
  return (t - 1) % cfg.eval.every == 0 || t == cfg.iterations;
}

// ---- finite candidate sets ----------------------------------------------------

void run_finite(const ExperimentConfig& cfg, const acq::AcquisitionSpec& spec, int seed,
                const RunOptions& opts, SeedRecord& rec, int& current_t) {
  const Problem prob = build_problem(cfg, seed);
  const PointSet& cand = prob.points;
  const Eigen::Index n = cand.rows();
  const double obs_noise = cfg.observation_noise();
  const bool use_mile = spec.rule == acq::Rule::mile;
  const bool incremental = cfg.gp_update == GpUpdate::incremental;
  const bool max_variant = cfg.algorithm_variant == AlgorithmVariant::max_finite;
  const bool keep_cls = opts.store_classifications || max_variant;
  const bool timed = opts.record_wall_ms || cfg.eval.record_wall_ms;

  Rng init_rng = seed_stream(cfg.master_seed, seed, Stream::init);
  Rng noise_rng = seed_stream(cfg.master_seed, seed, Stream::noise);
  Rng acq_rng = seed_stream(cfg.master_seed, seed, Stream::acquisition);

  std::optional<gp::GridPosterior> grid_post;
  gp::Dataset data;
  data.noise_variance = cfg.noise_variance;
  if (incremental) grid_post.emplace(cfg.kernel, cand, cfg.noise_variance, use_mile);

  std::vector<std::uint8_t> mask;
  if (!cfg.domain.allow_repeat) mask.assign(static_cast<std::size_t>(n), 0);

  auto observe = [&](Eigen::Index idx) {
    const double y = lab::observe(prob.truth[idx], obs_noise, noise_rng);
    if (grid_post) grid_post->observe(idx, y);
    data.add(cand.row(idx), y);
    if (!mask.empty()) mask[static_cast<std::size_t>(idx)] = 1;
    return y;
  };

  for (int k = 0; k < cfg.initial_points; ++k) {
    std::vector<Eigen::Index> open;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (mask.empty() || !mask[static_cast<std::size_t>(i)]) open.push_back(i);
    }
    if (open.empty()) throw ConfigError("initial design exhausts the candidate set");
    observe(open[init_rng.uniform_index(open.size())]);
  }

  const MembershipFlags true_h = ls::true_superlevel(
      std::span<const double>(prob.truth.data(), static_cast<std::size_t>(n)), cfg.theta);
  acq::Acquirer acquirer(spec);
  acq::SelectionContext ctx;
  ctx.finite_domain = true;
  ctx.dim = static_cast<int>(cand.cols());
  ctx.domain_cardinality = static_cast<double>(n);
  ctx.mask = mask.empty() ? nullptr : &mask;

  Vector mean;
  Vector var;
  Matrix cov;
  gp::Dataset before_last;
  double cumulative = 0.0;
  for (int t = 1; t <= cfg.iterations; ++t) {
    current_t = t;
    const Stopwatch clock(timed);
    const Vector* mean_p = nullptr;
    const Vector* var_p = nullptr;
    const Matrix* cov_p = nullptr;
    if (grid_post) {
      mean_p = &grid_post->mean();
      var_p = &grid_post->var();
      if (use_mile) cov_p = &grid_post->covariance();
    } else {
      const gp::Posterior post = gp::Posterior::fit(data, cfg.kernel);
      post.mean_var(cand, mean, var, Exec::serial);
      if (use_mile) cov = post.cov(cand);
      mean_p = &mean;
      var_p = &var;
      cov_p = use_mile ? &cov : nullptr;
    }

    IterationRow row;
    row.seed = seed;
    row.t = t;
    Metrics m;
    if (evaluated_at(cfg, t) || keep_cls) {
      ls::Classification cls = ls::classify(*mean_p, cfg.theta);
      if (evaluated_at(cfg, t)) m = evaluate(cls, prob.truth, true_h);
      if (t == cfg.iterations && !max_variant) {
        set_terminal(rec.terminal, t, cls, prob.truth, true_h, true);
      }
      if (keep_cls) rec.classifications.push_back(std::move(cls));
    }
    fill_row(row, m, cumulative);

    if (t == cfg.iterations) before_last = data;
    ctx.t = t;
    const acq::Selection sel =
        acquirer.select({*mean_p, *var_p, cov_p, cfg.noise_variance}, cfg.theta, ctx, acq_rng);
    row.x = cand.row(sel.index);
    row.beta = sel.beta;
    row.y = observe(sel.index);
    row.wall_ms = clock.ms();
    rec.rows.push_back(std::move(row));
  }

  if (max_variant) {
    current_t = cfg.iterations;
    Rng tc_rng = seed_stream(cfg.master_seed, seed, Stream::tcheck);
    const gp::Posterior post = gp::Posterior::fit(before_last, cfg.kernel);
    const ls::TCheckResult tc = ls::estimate_t_check(post, rec.classifications, cand, cfg.theta,
                                                     cfg.eval.tcheck_samples, tc_rng, Exec::serial);
    set_terminal(rec.terminal, tc.index, rec.classifications[static_cast<std::size_t>(tc.index - 1)],
                 prob.truth, true_h, true);
  }
  if (!opts.store_classifications) rec.classifications.clear();
  rec.data = std::move(data);
}

// ---- continuous boxes -----------------------------------------------------------

void run_box(const ExperimentConfig& cfg, const acq::AcquisitionSpec& spec, int seed,
             const RunOptions& opts, SeedRecord& rec, int& current_t) {
  const Problem prob = build_problem(cfg, seed);
  const PointSet& test = prob.points;
  const lab::BlackBox box = make_blackbox(cfg, PointSet{}, seed);
  const auto& lower = cfg.domain.lower;
  const auto& upper = cfg.domain.upper;
  const double obs_noise = cfg.observation_noise();
  const bool incremental = cfg.gp_update == GpUpdate::incremental;
  const bool infinite = cfg.algorithm_variant == AlgorithmVariant::max_infinite;
  const bool timed = opts.record_wall_ms || cfg.eval.record_wall_ms;
  const int d = static_cast<int>(lower.size());

  Rng init_rng = seed_stream(cfg.master_seed, seed, Stream::init);
  Rng noise_rng = seed_stream(cfg.master_seed, seed, Stream::noise);
  Rng acq_rng = seed_stream(cfg.master_seed, seed, Stream::acquisition);
  Rng cand_rng = seed_stream(cfg.master_seed, seed, Stream::candidates);

  gp::Dataset empty;
  empty.noise_variance = cfg.noise_variance;
  gp::Posterior post = gp::Posterior::fit(empty, cfg.kernel);
  auto observe = [&](PointRef x) {
    const double y = lab::observe(box.eval(x), obs_noise, noise_rng);
    if (incremental) {
      post = post.with_observation(x, y);
    } else {
      gp::Dataset next = post.dataset();
      next.add(x, y);
      post = gp::Posterior::fit(std::move(next), cfg.kernel);
    }
    return y;
  };

  Point last;
  for (int k = 0; k < cfg.initial_points; ++k) {
    const PointSet x0 = lab::sample_box(lower, upper, 1, init_rng);
    observe(x0.row(0));
    last = x0.row(0);
  }

  const MembershipFlags true_h = ls::true_superlevel(
      std::span<const double>(prob.truth.data(), static_cast<std::size_t>(prob.truth.size())),
      cfg.theta);
  const Eigen::Index n_tc = std::min<Eigen::Index>(cfg.eval.tcheck_points, test.rows());
  const PointSet tc_points = test.topRows(n_tc);

  acq::Acquirer acquirer(spec);
  acq::SelectionContext ctx;
  ctx.finite_domain = false;
  ctx.dim = d;
  ctx.box_size = box_size(cfg);

  Vector mean;
  Vector var;
  gp::Dataset before_last;
  double cumulative = 0.0;
  for (int t = 1; t <= cfg.iterations; ++t) {
    current_t = t;
    const Stopwatch clock(timed);
    IterationRow row;
    row.seed = seed;
    row.t = t;
    Metrics m;
    if (evaluated_at(cfg, t)) {
      const ls::Classification cls =
          infinite ? classify_snapped(post, cfg, spec, t, test)
                   : ls::classify(post.mean(test, Exec::serial), cfg.theta);
      m = evaluate(cls, prob.truth, true_h);
      if (t == cfg.iterations && !infinite) {
        set_terminal(rec.terminal, t, cls, prob.truth, true_h, false);
      }
    }
    if (infinite || opts.store_classifications) {
      rec.classifications.push_back(
          infinite ? classify_snapped(post, cfg, spec, t, tc_points)
                   : ls::classify(post.mean(tc_points, Exec::serial), cfg.theta));
    }
    fill_row(row, m, cumulative);

    // Inner maximiser: fresh uniform candidates plus the previous pick.
    PointSet cand = lab::sample_box(lower, upper, cfg.domain.candidates, cand_rng);
    if (last.size() == d) {
      cand.conservativeResize(cand.rows() + 1, Eigen::NoChange);
      cand.row(cand.rows() - 1) = last;
    }
    post.mean_var(cand, mean, var, Exec::serial);
    if (t == cfg.iterations) before_last = post.dataset();
    ctx.t = t;
    const acq::Selection sel =
        acquirer.select({mean, var, nullptr, cfg.noise_variance}, cfg.theta, ctx, acq_rng);
    last = cand.row(sel.index);
    row.x = last;
    row.beta = sel.beta;
    row.y = observe(last);
    row.wall_ms = clock.ms();
    rec.rows.push_back(std::move(row));
  }

  if (infinite) {
    current_t = cfg.iterations;
    Rng tc_rng = seed_stream(cfg.master_seed, seed, Stream::tcheck);
    const gp::Posterior snapshot = gp::Posterior::fit(before_last, cfg.kernel);
    const ls::TCheckResult tc =
        ls::estimate_t_check(snapshot, rec.classifications, tc_points, cfg.theta,
                             cfg.eval.tcheck_samples, tc_rng, Exec::serial);
    // H_t-check over the full test set uses the posterior given D_{t-check - 1}.
    const Eigen::Index n_before = cfg.initial_points + tc.index - 1;
    const gp::Posterior at =
        gp::Posterior::fit(prefix(post.dataset(), n_before), cfg.kernel);
    set_terminal(rec.terminal, tc.index, classify_snapped(at, cfg, spec, tc.index, test),
                 prob.truth, true_h, false);
  }
  if (!opts.store_classifications) rec.classifications.clear();
  rec.data = post.dataset();
}

}  // namespace

Rng seed_stream(std::uint64_t master_seed, int seed, Stream purpose) {
  return Rng(master_seed)
      .split(static_cast<std::uint64_t>(seed))
      .split(static_cast<std::uint64_t>(purpose));
}

Problem build_problem(const ExperimentConfig& cfg, int seed) {
  Problem prob;
  if (cfg.domain.type == "box") {
    Rng test_rng = seed_stream(cfg.master_seed, seed, Stream::test);
    prob.points = lab::sample_box(cfg.domain.lower, cfg.domain.upper, cfg.eval.test_points, test_rng);
    prob.truth = make_blackbox(cfg, PointSet{}, seed).eval_many(prob.points);
    return prob;
  }
  if (cfg.domain.type == "tabulated") {
    const lab::BlackBox box = make_blackbox(cfg, PointSet{}, seed);
    prob.points = box.points();
    prob.truth = box.values();
    return prob;
  }
  prob.points = lab::make_grid(cfg.domain.lower, cfg.domain.upper, cfg.domain.n);
  const lab::BlackBox box = make_blackbox(cfg, prob.points, seed);
  prob.truth = box.is_tabulated() ? box.values() : box.eval_many(prob.points);
  return prob;
}

SeedRecord run_seed(const ExperimentConfig& cfg, const acq::AcquisitionSpec& spec, int seed,
                    const RunOptions& opts) {
  SeedRecord rec;
  rec.seed = seed;
  int current_t = 0;
  try {
    if (cfg.finite_domain()) {
      run_finite(cfg, spec, seed, opts, rec, current_t);
    } else {
      run_box(cfg, spec, seed, opts, rec, current_t);
    }
  } catch (const NumericalError& e) {
    rec.ok = false;
    rec.numerical = true;
    rec.error = e.what();
    rec.error_t = current_t;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
    rec.error_t = current_t;
  }
  return rec;
}

RunRecord run_acquisition(const ExperimentConfig& cfg, const acq::AcquisitionSpec& spec,
                          const RunOptions& opts) {
  cfg.validate();
  RunRecord out;
  out.acquisition = spec;
  out.dim = cfg.domain.type == "tabulated" ? 2 : static_cast<int>(cfg.domain.lower.size());
  out.seeds.resize(static_cast<std::size_t>(cfg.n_seeds));
  if (opts.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int s = 0; s < cfg.n_seeds; ++s) {
      out.seeds[static_cast<std::size_t>(s)] = run_seed(cfg, spec, s, opts);
    }
  } else {
    for (int s = 0; s < cfg.n_seeds; ++s) {
      out.seeds[static_cast<std::size_t>(s)] = run_seed(cfg, spec, s, opts);
    }
  }
  if (!out.seeds.empty() && out.seeds.front().ok && out.seeds.front().data.dim() > 0) {
    out.dim = static_cast<int>(out.seeds.front().data.dim());
  }
  return out;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  std::vector<RunRecord> out;
  out.reserve(cfg.acquisitions.size());
  for (const auto& spec : cfg.acquisitions) out.push_back(run_acquisition(cfg, spec, opts));
  return out;
}

}  // namespace lsekit::run
