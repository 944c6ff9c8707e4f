#pragma once

#include "lsekit/runner/aggregate.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace lsekit::run {

// Line plot of the mean of `metric` against t with +-6 SE error bars, one
// series and legend entry per summary. Output depends only on the inputs.
// ConfigError for an unknown metric (listing the valid ones) or when no
// summary has rows.
std::string render_svg(const std::vector<Summary>& summaries, std::string_view metric);
void emit_plot(const std::vector<Summary>& summaries, std::string_view metric,
               const std::string& path);

}  // namespace lsekit::run
