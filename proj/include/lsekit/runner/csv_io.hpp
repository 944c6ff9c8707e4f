#pragma once

#include "lsekit/runner/aggregate.hpp"
#include "lsekit/runner/bound_check.hpp"
#include "lsekit/runner/experiment.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lsekit::run {

// Shortest decimal text that parses back to the same double; "nan", "inf"
// and "-inf" for non-finite values.
std::string format_double(double v);
// ConfigError on text that is not a complete number.
double parse_double(std::string_view text);

// seed,t,x1..xd,y,beta,r_t,R_t,max_loss,precision,recall,fscore,wall_ms
std::vector<std::string> iteration_header(int dim);
void write_iterations(std::ostream& out, const RunRecord& record);
void write_iterations(const std::string& path, const RunRecord& record);
// Rows of every seed, in file order. `dim` receives the point dimension.
std::vector<IterationRow> read_iterations(const std::string& path, int* dim = nullptr);

// t,<m>_mean,<m>_lo,<m>_hi for each summary metric, lo/hi being
// mean -+ 6 SE.
std::vector<std::string> summary_header();
void write_summary(std::ostream& out, const Summary& summary);
void write_summary(const std::string& path, const Summary& summary);
Summary read_summary(const std::string& path);

// seed,t_hat,r,max_loss,precision,recall,fscore,count_h
void write_terminal(const std::string& path, const RunRecord& record);
// seed,t,error for every aborted seed (header only when none).
void write_diagnostics(const std::string& path, const RunRecord& record);
// seed,x1..xd,in_h for the returned classification on finite domains.
void write_sets(const std::string& path, const RunRecord& record, const PointSet& points);

// t,gamma_hat,gamma_envelope,mean_cumulative,rhs_cumulative,pass_cumulative,
// mean_rate,rhs_rate,pass_rate
void write_bound_report(const std::string& path, const TheoryReport& report);

// Splits one CSV line on commas (no quoting is ever emitted).
std::vector<std::string_view> split_csv_line(std::string_view line);

}  // namespace lsekit::run
