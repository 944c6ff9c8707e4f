#pragma once

#include "lsekit/acquisition.hpp"
#include "lsekit/gp/posterior.hpp"
#include "lsekit/level_set.hpp"
#include "lsekit/runner/config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lsekit::run {

// One acquisition step. Metrics describe the classification H_t built from
// the posterior before x_t is observed; they are NaN on iterations skipped
// by the evaluation cadence, and R_t sums the evaluated r_t only.
struct IterationRow {
  int seed = 0;
  int t = 0;
  Point x;
  double y = 0.0;
  double beta = 0.0;
  double r_t = 0.0;
  double R_t = 0.0;
  double max_loss = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
  double wall_ms = 0.0;
};

// Returned classification: H_T for avg_loss, H_t-check for the max-value
// variants.
struct TerminalOutput {
  int t_hat = 0;
  double r = 0.0;
  double max_loss = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
  std::size_t count_h = 0;
  // Membership over the evaluation points (finite domains only).
  MembershipFlags in_h;
};

struct SeedRecord {
  int seed = 0;
  bool ok = true;
  std::string error;           // diagnostic when !ok
  int error_t = 0;             // iteration at which the seed aborted
  bool numerical = false;      // the abort was a NumericalError
  std::vector<IterationRow> rows;
  TerminalOutput terminal;
  gp::Dataset data;            // initial points followed by x_1..x_T
  // H_1..H_T over the evaluation points, kept when requested or needed.
  std::vector<ls::Classification> classifications;
};

struct RunRecord {
  acq::AcquisitionSpec acquisition;
  int dim = 0;
  std::vector<SeedRecord> seeds;
};

struct RunOptions {
  bool store_classifications = false;
  bool record_wall_ms = false;  // ORed with config.eval.record_wall_ms
  Exec exec = Exec::parallel;   // seed-level loop
};

// Evaluation points and truth shared by every seed of a finite problem, or
// materialised per seed for GP-sample targets.
struct Problem {
  PointSet points;  // candidates (finite) or test set (box)
  Vector truth;     // f at `points`
};

// Fixed sub-streams of a seed's generator.
enum class Stream : std::uint64_t { f = 1, init = 2, noise = 3, acquisition = 4, test = 5, tcheck = 6, candidates = 7 };

// Generator of seed `s` for `purpose`. Depends only on (master, s, purpose),
// so every acquisition sees the same f, initial design and test set.
Rng seed_stream(std::uint64_t master_seed, int seed, Stream purpose);

// Runs every acquisition in the config over seeds 0..n_seeds-1.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

// One acquisition over all seeds.
RunRecord run_acquisition(const ExperimentConfig& cfg, const acq::AcquisitionSpec& spec,
                          const RunOptions& opts = {});

// One seed. Module errors are caught and reported through SeedRecord::ok.
SeedRecord run_seed(const ExperimentConfig& cfg, const acq::AcquisitionSpec& spec, int seed,
                    const RunOptions& opts = {});

// Points and truth of seed `seed` (the f stream decides GP samples; the test
// stream decides box test sets).
Problem build_problem(const ExperimentConfig& cfg, int seed);

}  // namespace lsekit::run
