#pragma once

#include "lsekit/runner/experiment.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace lsekit::run {

// Metrics carried into the summary, in column order.
inline constexpr std::array<std::string_view, 3> kSummaryMetrics = {"r_t", "fscore", "max_loss"};
inline constexpr int kErrorBarScale = 6;

// Index of `metric` in kSummaryMetrics; ConfigError listing the valid names
// otherwise.
std::size_t metric_index(std::string_view metric);

struct SummaryRow {
  int t = 0;
  int n = 0;  // seeds contributing at this t
  std::array<double, kSummaryMetrics.size()> mean{};
  std::array<double, kSummaryMetrics.size()> se{};  // sample sd / sqrt(n); 0 when n = 1
};

struct Summary {
  std::string label;
  std::vector<SummaryRow> rows;
};

// Per-iteration mean and standard error across the successful seeds. NaN
// entries (iterations skipped by the evaluation cadence) are left out.
Summary aggregate(const RunRecord& record);
Summary aggregate(const std::vector<SeedRecord>& seeds, std::string label);

}  // namespace lsekit::run
