#pragma once

#include "lsekit/level_set.hpp"
#include "lsekit/runner/config.hpp"
#include "lsekit/runner/experiment.hpp"

#include <string>
#include <vector>

namespace lsekit::run {

struct BoundRow {
  int t = 0;
  double gamma_hat = 0.0;       // greedy information gain
  double gamma_envelope = 0.0;  // gamma_hat / (1 - 1/e)
  double mean_cumulative = 0.0; // empirical mean R_t (or max-loss analogue)
  double rhs_cumulative = 0.0;
  double mean_rate = 0.0;       // empirical mean r_t (R~_t / t for max-value variants)
  double rhs_rate = 0.0;
  bool pass_cumulative = true;
  bool pass_rate = true;
};

struct TheoryReport {
  ls::BoundKind cumulative_kind = ls::BoundKind::avg_cumulative;
  ls::BoundKind rate_kind = ls::BoundKind::avg_rate;
  // True unless the target is a GP sample from the model kernel observed
  // with the model noise; the verdict is then advisory.
  bool misspecified = false;
  int seeds_used = 0;
  std::vector<BoundRow> rows;

  bool all_pass() const;
  // "PASS", "FAIL" or "CAVEAT" (misspecified: no hard verdict).
  std::string verdict() const;
};

// Compares the empirical losses of `record` with the theorem right-hand
// sides for the config's algorithm variant. ConfigError when the noise
// variance is zero.
TheoryReport bound_check(const RunRecord& record, const ExperimentConfig& cfg);

bool is_misspecified(const ExperimentConfig& cfg);

}  // namespace lsekit::run
