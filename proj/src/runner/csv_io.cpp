#include "lsekit/runner/csv_io.hpp"

#include "lsekit/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace lsekit::run {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

namespace {

int parse_int(std::string_view text) {
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_header(std::ostream& out, const std::vector<std::string>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::vector<std::string> iteration_header(int dim) {
  std::vector<std::string> cols = {"seed", "t"};
  for (int k = 1; k <= dim; ++k) cols.push_back("x" + std::to_string(k));
  for (const char* c : {"y", "beta", "r_t", "R_t", "max_loss", "precision", "recall", "fscore",
                        "wall_ms"}) {
    cols.emplace_back(c);
  }
  return cols;
}

void write_iterations(std::ostream& out, const RunRecord& record) {
  write_header(out, iteration_header(record.dim));
  for (const auto& s : record.seeds) {
    for (const auto& row : s.rows) {
      out << row.seed << ',' << row.t;
      for (Eigen::Index k = 0; k < row.x.size(); ++k) out << ',' << format_double(row.x[k]);
      for (double v : {row.y, row.beta, row.r_t, row.R_t, row.max_loss, row.precision, row.recall,
                       row.fscore, row.wall_ms}) {
        out << ',' << format_double(v);
      }
      out << '\n';
    }
  }
}

void write_iterations(const std::string& path, const RunRecord& record) {
  auto out = open_out(path);
  write_iterations(out, record);
  finish(out, path);
}

std::vector<IterationRow> read_iterations(const std::string& path, int* dim) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ConfigError("'" + path + "' has no header");
  const auto header = split_csv_line(lines[0]);
  const int d = static_cast<int>(header.size()) - 11;
  if (d < 0) throw ConfigError("'" + path + "' does not have the iteration schema");
  const auto expected = iteration_header(d);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != expected[i]) {
      throw ConfigError("'" + path + "': column " + std::to_string(i + 1) + " is '" +
                        std::string(header[i]) + "', expected '" + expected[i] + "'");
    }
  }
  if (dim) *dim = d;
  std::vector<IterationRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_csv_line(lines[i]);
    if (f.size() != header.size()) {
      throw ConfigError("'" + path + "' line " + std::to_string(i + 1) + ": expected " +
                        std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
    }
    IterationRow row;
    row.seed = parse_int(f[0]);
    row.t = parse_int(f[1]);
    row.x.resize(d);
    for (int k = 0; k < d; ++k) row.x[k] = parse_double(f[2 + k]);
    double* dst[] = {&row.y, &row.beta, &row.r_t, &row.R_t, &row.max_loss,
                     &row.precision, &row.recall, &row.fscore, &row.wall_ms};
    for (int k = 0; k < 9; ++k) *dst[k] = parse_double(f[2 + d + k]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> summary_header() {
  std::vector<std::string> cols = {"t"};
  for (auto m : kSummaryMetrics) {
    for (const char* suffix : {"_mean", "_lo", "_hi"}) cols.push_back(std::string(m) + suffix);
  }
  return cols;
}

void write_summary(std::ostream& out, const Summary& summary) {
  write_header(out, summary_header());
  for (const auto& row : summary.rows) {
    out << row.t;
    for (std::size_t k = 0; k < kSummaryMetrics.size(); ++k) {
      const double half = kErrorBarScale * row.se[k];
      out << ',' << format_double(row.mean[k]) << ',' << format_double(row.mean[k] - half) << ','
          << format_double(row.mean[k] + half);
    }
    out << '\n';
  }
}

void write_summary(const std::string& path, const Summary& summary) {
  auto out = open_out(path);
  write_summary(out, summary);
  finish(out, path);
}

Summary read_summary(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ConfigError("'" + path + "' has no header");
  const auto header = split_csv_line(lines[0]);
  const auto expected = summary_header();
  if (header.size() != expected.size()) {
    throw ConfigError("'" + path + "' does not have the summary schema");
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != expected[i]) {
      throw ConfigError("'" + path + "': column " + std::to_string(i + 1) + " is '" +
                        std::string(header[i]) + "', expected '" + expected[i] + "'");
    }
  }
  Summary s;
  s.label = path;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_csv_line(lines[i]);
    if (f.size() != expected.size()) {
      throw ConfigError("'" + path + "' line " + std::to_string(i + 1) + ": wrong field count");
    }
    SummaryRow row;
    row.t = parse_int(f[0]);
    for (std::size_t k = 0; k < kSummaryMetrics.size(); ++k) {
      row.mean[k] = parse_double(f[1 + 3 * k]);
      row.se[k] = (parse_double(f[3 + 3 * k]) - row.mean[k]) / kErrorBarScale;
    }
    s.rows.push_back(row);
  }
  return s;
}

void write_terminal(const std::string& path, const RunRecord& record) {
  auto out = open_out(path);
  write_header(out, {"seed", "t_hat", "r", "max_loss", "precision", "recall", "fscore", "count_h"});
  for (const auto& s : record.seeds) {
    if (!s.ok) continue;
    const TerminalOutput& term = s.terminal;
    out << s.seed << ',' << term.t_hat;
    for (double v : {term.r, term.max_loss, term.precision, term.recall, term.fscore}) {
      out << ',' << format_double(v);
    }
    out << ',' << term.count_h << '\n';
  }
  finish(out, path);
}

void write_diagnostics(const std::string& path, const RunRecord& record) {
  auto out = open_out(path);
  write_header(out, {"seed", "t", "error"});
  for (const auto& s : record.seeds) {
    if (s.ok) continue;
    std::string msg = s.error;
    for (char& c : msg) {
      if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    out << s.seed << ',' << s.error_t << ',' << msg << '\n';
  }
  finish(out, path);
}

void write_sets(const std::string& path, const RunRecord& record, const PointSet& points) {
  auto out = open_out(path);
  std::vector<std::string> cols = {"seed"};
  for (Eigen::Index k = 1; k <= points.cols(); ++k) cols.push_back("x" + std::to_string(k));
  cols.emplace_back("in_h");
  write_header(out, cols);
  for (const auto& s : record.seeds) {
    if (!s.ok || s.terminal.in_h.size() != static_cast<std::size_t>(points.rows())) continue;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      out << s.seed;
      for (Eigen::Index k = 0; k < points.cols(); ++k) out << ',' << format_double(points(i, k));
      out << ',' << int(s.terminal.in_h[static_cast<std::size_t>(i)]) << '\n';
    }
  }
  finish(out, path);
}

void write_bound_report(const std::string& path, const TheoryReport& report) {
  auto out = open_out(path);
  write_header(out, {"t", "gamma_hat", "gamma_envelope", "mean_cumulative", "rhs_cumulative",
                     "pass_cumulative", "mean_rate", "rhs_rate", "pass_rate"});
  for (const auto& r : report.rows) {
    out << r.t << ',' << format_double(r.gamma_hat) << ',' << format_double(r.gamma_envelope) << ','
        << format_double(r.mean_cumulative) << ',' << format_double(r.rhs_cumulative) << ','
        << (r.pass_cumulative ? 1 : 0) << ',' << format_double(r.mean_rate) << ','
        << format_double(r.rhs_rate) << ',' << (r.pass_rate ? 1 : 0) << '\n';
  }
  finish(out, path);
}

}  // namespace lsekit::run
