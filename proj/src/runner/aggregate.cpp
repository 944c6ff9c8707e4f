#include "lsekit/runner/aggregate.hpp"

#include "lsekit/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace lsekit::run {

std::size_t metric_index(std::string_view metric) {
  for (std::size_t i = 0; i < kSummaryMetrics.size(); ++i) {
    if (kSummaryMetrics[i] == metric) return i;
  }
  std::string names;
  for (auto m : kSummaryMetrics) names += (names.empty() ? "" : ", ") + std::string(m);
  throw ConfigError("unknown metric '" + std::string(metric) + "' (available: " + names + ")");
}

namespace {

double metric_value(const IterationRow& row, std::size_t k) {
  switch (k) {
    case 0: return row.r_t;
    case 1: return row.fscore;
    default: return row.max_loss;
  }
}

}  // namespace

Summary aggregate(const std::vector<SeedRecord>& seeds, std::string label) {
  constexpr std::size_t M = kSummaryMetrics.size();
  // Welford accumulation keyed by t; seed order only affects rounding.
  struct Acc {
    std::array<int, M> n{};
    std::array<double, M> mean{};
    std::array<double, M> m2{};
  };
  std::map<int, Acc> acc;
  std::vector<const SeedRecord*> ordered;
  for (const auto& s : seeds) {
    if (s.ok) ordered.push_back(&s);
  }
  // Fixed order makes the floating-point sums independent of input order.
  std::sort(ordered.begin(), ordered.end(),
            [](const SeedRecord* a, const SeedRecord* b) { return a->seed < b->seed; });
  for (const SeedRecord* s : ordered) {
    for (const auto& row : s->rows) {
      Acc& a = acc[row.t];
      for (std::size_t k = 0; k < M; ++k) {
        const double v = metric_value(row, k);
        if (std::isnan(v)) continue;
        const int n = ++a.n[k];
        const double delta = v - a.mean[k];
        a.mean[k] += delta / n;
        a.m2[k] += delta * (v - a.mean[k]);
      }
    }
  }

  Summary out;
  out.label = std::move(label);
  for (const auto& [t, a] : acc) {
    SummaryRow row;
    row.t = t;
    row.n = *std::max_element(a.n.begin(), a.n.end());
    for (std::size_t k = 0; k < M; ++k) {
      if (a.n[k] == 0) {
        row.mean[k] = std::nan("");
        row.se[k] = std::nan("");
        continue;
      }
      row.mean[k] = a.mean[k];
      row.se[k] = a.n[k] > 1 ? std::sqrt(a.m2[k] / (a.n[k] - 1) / a.n[k]) : 0.0;
    }
    out.rows.push_back(row);
  }
  return out;
}

Summary aggregate(const RunRecord& record) {
  return aggregate(record.seeds, std::string(acq::to_string(record.acquisition.rule)));
}

}  // namespace lsekit::run
