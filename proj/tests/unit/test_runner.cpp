#include "lsekit/error.hpp"
#include "lsekit/runner/aggregate.hpp"
#include "lsekit/runner/bound_check.hpp"
#include "lsekit/runner/config.hpp"
#include "lsekit/runner/csv_io.hpp"
#include "lsekit/runner/experiment.hpp"
#include "lsekit/runner/plot.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace lsekit;
using namespace lsekit::run;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = std::string(LSEKIT_SOURCE_DIR) + "/configs/";

ExperimentConfig desk_config() {
  ExperimentConfig c;
  c.blackbox.kind = "gp_sample";
  c.domain.type = "grid";
  c.domain.lower = {-5, -5};
  c.domain.upper = {5, 5};
  c.domain.n = {8, 8};
  c.kernel = gp::KernelSpec::gaussian(1.0, 2.0);
  c.noise_variance = 1e-6;
  c.theta = 0.5;
  c.acquisitions = {{acq::Rule::rand_straddle}};
  c.iterations = 10;
  c.n_seeds = 3;
  c.master_seed = 99;
  return c;
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lsekit_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config: golden configs load and round-trip losslessly") {
  for (const char* name : {"grid_gp_sample", "grid_sinusoidal", "grid_himmelblau",
                           "box_sphere", "box_rosenbrock", "box_styblinski_tang",
                           "lifetime_synthetic"}) {
    CAPTURE(name);
    const ExperimentConfig c = load_config(kConfigs + name + ".json");
    const ExperimentConfig back = config_from_json(to_json(c), c.base_dir);
    CHECK(back == c);
    CHECK(to_json(back) == to_json(c));
  }
  const auto sin = load_config(kConfigs + "grid_sinusoidal.json");
  CHECK(sin.kernel.amplitude == std::exp(2.0));
  CHECK(sin.kernel.lengthscale == 2.0 * std::exp(-3.0));
  CHECK(sin.noise_variance == std::exp(-2.0));
  CHECK(sin.acquisitions.size() == 6);
  const auto ros = load_config(kConfigs + "box_rosenbrock.json");
  CHECK(ros.kernel.amplitude == 9e8);
  CHECK(ros.theta == 14800);
}

TEST_CASE("config: optional fields survive the round trip") {
  ExperimentConfig c = desk_config();
  acq::AcquisitionSpec lse{acq::Rule::lse};
  lse.use_intersection = false;
  lse.lse_cardinality = 1e15;
  acq::AcquisitionSpec inf{acq::Rule::rand_straddle_max_infinite};
  inf.a = 2.0;
  inf.r = 10.0;
  c.acquisitions = {lse, inf, {acq::Rule::mile, 2.5}};
  c.blackbox.sample_kernel = gp::KernelSpec::matern32(1, 3);
  c.blackbox.observation_noise_variance = 0.0;
  c.eval.tcheck_points = 17;
  c.gp_update = GpUpdate::refit;
  c.output_dir = "out";
  CHECK(config_from_json(to_json(c)) == c);
}

TEST_CASE("config: validation errors") {
  auto bad = [](auto mutate) {
    nlohmann::json j = to_json(desk_config());
    mutate(j);
    return j;
  };
  CHECK_THROWS_AS(config_from_json(bad([](auto& j) { j["iterations"] = 0; })), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad([](auto& j) { j["bogus"] = 1; })), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad([](auto& j) { j["kernel"]["amplitude"] = -1; })), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad([](auto& j) { j["domain"]["n"] = {8}; })), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad([](auto& j) { j["theta"] = "high"; })), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad([](auto& j) { j["algorithm_variant"] = "max_infinite"; })),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(bad([](auto& j) {
                    j["domain"] = {{"type", "box"}, {"lower", {0, 0}}, {"upper", {1, 1}}};
                    j["blackbox"] = {{"kind", "analytic"}, {"name", "sinusoidal"}};
                    j["acquisition"] = {{{"rule", "mile"}}};
                  })),
                  ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("experiment: T = 1 gives one row with beta logged") {
  ExperimentConfig c = desk_config();
  c.iterations = 1;
  c.n_seeds = 1;
  const RunRecord rec = run_acquisition(c, c.acquisitions[0]);
  REQUIRE(rec.seeds.size() == 1);
  REQUIRE(rec.seeds[0].ok);
  REQUIRE(rec.seeds[0].rows.size() == 1);
  const IterationRow& row = rec.seeds[0].rows[0];
  CHECK(row.t == 1);
  CHECK(row.beta > 0.0);
  CHECK(row.R_t == row.r_t);
  CHECK(rec.seeds[0].data.size() == 2);  // initial point + x_1
}

TEST_CASE("experiment: rows, running sums and determinism") {
  const ExperimentConfig c = desk_config();
  const RunRecord a = run_acquisition(c, c.acquisitions[0]);
  const RunRecord b = run_acquisition(c, c.acquisitions[0], {false, false, Exec::serial});
  for (const auto& s : a.seeds) {
    REQUIRE(s.ok);
    REQUIRE(s.rows.size() == 10);
    double sum = 0.0;
    for (const auto& row : s.rows) {
      sum += row.r_t;
      CHECK(std::abs(row.R_t - sum) <= 1e-12);
    }
  }
  std::ostringstream sa, sb;
  write_iterations(sa, a);
  write_iterations(sb, b);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("experiment: adding seeds does not perturb existing ones") {
  ExperimentConfig c = desk_config();
  const RunRecord three = run_acquisition(c, c.acquisitions[0]);
  c.n_seeds = 5;
  const RunRecord five = run_acquisition(c, c.acquisitions[0]);
  for (int s = 0; s < 3; ++s) {
    for (std::size_t i = 0; i < three.seeds[s].rows.size(); ++i) {
      CHECK(three.seeds[s].rows[i].y == five.seeds[s].rows[i].y);
    }
  }
}

TEST_CASE("experiment: common random numbers across acquisitions") {
  ExperimentConfig c = desk_config();
  const Problem p1 = build_problem(c, 1);
  const Problem p2 = build_problem(c, 1);
  CHECK(p1.truth == p2.truth);
  CHECK(build_problem(c, 2).truth != p1.truth);
}

TEST_CASE("experiment: no point is queried twice when re-observation is off") {
  ExperimentConfig c = desk_config();
  c.domain.allow_repeat = false;
  c.blackbox.observation_noise_variance = 0.0;
  c.iterations = 40;
  c.acquisitions = {{acq::Rule::us}, {acq::Rule::rand_straddle}, {acq::Rule::random}};
  for (const auto& rec : run_experiment(c)) {
    for (const auto& s : rec.seeds) {
      REQUIRE(s.ok);
      std::set<std::pair<double, double>> seen;
      for (Eigen::Index i = 0; i < s.data.size(); ++i) {
        CHECK(seen.insert({s.data.inputs(i, 0), s.data.inputs(i, 1)}).second);
      }
    }
  }
}

TEST_CASE("experiment: rand_straddle beta draws average two") {
  ExperimentConfig c = desk_config();
  c.iterations = 400;
  c.n_seeds = 1;
  c.domain.n = {6, 6};
  const RunRecord rec = run_acquisition(c, c.acquisitions[0]);
  double s = 0, ss = 0;
  const auto& rows = rec.seeds[0].rows;
  for (const auto& r : rows) {
    s += r.beta;
    ss += r.beta * r.beta;
  }
  const double n = static_cast<double>(rows.size());
  const double mean = s / n;
  const double sd = std::sqrt((ss - n * mean * mean) / (n - 1));
  CHECK(std::abs(mean - 2.0) <= 3.0 * sd / std::sqrt(n));
}

TEST_CASE("experiment: a failing seed is reported without stopping the others") {
  ExperimentConfig c = desk_config();
  c.blackbox.kind = "tabulated";
  c.blackbox.csv = "/nonexistent/lifetime.csv";
  c.domain = DomainConfig{};
  c.domain.type = "tabulated";
  const RunRecord rec = run_acquisition(c, c.acquisitions[0]);
  for (const auto& s : rec.seeds) {
    CHECK_FALSE(s.ok);
    CHECK(s.error.find("lifetime.csv") != std::string::npos);
  }
}

TEST_CASE("experiment: continuous box and max-value variants run") {
  ExperimentConfig c;
  c.blackbox.name = "himmelblau";
  c.domain.type = "box";
  c.domain.lower = {-5, -5};
  c.domain.upper = {5, 5};
  c.domain.candidates = 200;
  c.kernel = gp::KernelSpec::gaussian(std::exp(8.0), 2.0);
  c.noise_variance = std::exp(4.0);
  c.theta = 0.0;
  c.iterations = 5;
  c.n_seeds = 2;
  c.eval.test_points = 500;
  c.eval.tcheck_points = 50;
  c.eval.tcheck_samples = 20;
  c.algorithm_variant = AlgorithmVariant::max_infinite;
  c.acquisitions = {{acq::Rule::rand_straddle_max_infinite}, {acq::Rule::lse}};
  for (const auto& rec : run_experiment(c)) {
    for (const auto& s : rec.seeds) {
      REQUIRE(s.ok);
      CHECK(s.rows.size() == 5);
      CHECK(s.terminal.t_hat >= 1);
      CHECK(s.terminal.t_hat <= 5);
    }
  }

  ExperimentConfig f = desk_config();
  f.algorithm_variant = AlgorithmVariant::max_finite;
  f.acquisitions = {{acq::Rule::rand_straddle_max_finite}};
  f.eval.tcheck_samples = 30;
  const RunRecord rec = run_acquisition(f, f.acquisitions[0]);
  for (const auto& s : rec.seeds) {
    REQUIRE(s.ok);
    CHECK(s.rows[0].beta > 2.0 * std::log(64.0));
    CHECK(s.terminal.in_h.size() == 64);
  }
}

TEST_CASE("experiment: gp_update modes agree") {
  ExperimentConfig c = desk_config();
  c.noise_variance = 1e-3;
  c.acquisitions = {{acq::Rule::mile}};
  const RunRecord inc = run_acquisition(c, c.acquisitions[0]);
  c.gp_update = GpUpdate::refit;
  const RunRecord ref = run_acquisition(c, c.acquisitions[0]);
  for (std::size_t s = 0; s < inc.seeds.size(); ++s) {
    for (std::size_t i = 0; i < inc.seeds[s].rows.size(); ++i) {
      CHECK(inc.seeds[s].rows[i].x == ref.seeds[s].rows[i].x);
      CHECK(std::abs(inc.seeds[s].rows[i].r_t - ref.seeds[s].rows[i].r_t) < 1e-8);
    }
  }
}

TEST_CASE("aggregate: hand-computed standard error") {
  SeedRecord a, b;
  a.seed = 0;
  b.seed = 1;
  IterationRow r;
  r.t = 1;
  r.r_t = 1.0;
  r.fscore = 0.5;
  r.max_loss = 2.0;
  a.rows = {r};
  r.r_t = 3.0;
  b.rows = {r};
  const Summary s = aggregate({a, b}, "x");
  REQUIRE(s.rows.size() == 1);
  CHECK(s.rows[0].mean[0] == 2.0);
  CHECK(s.rows[0].se[0] == doctest::Approx(1.0));
  CHECK(s.rows[0].se[1] == 0.0);
  const Summary swapped = aggregate({b, a}, "x");
  CHECK(swapped.rows[0].mean == s.rows[0].mean);
  CHECK(swapped.rows[0].se == s.rows[0].se);
  const Summary one = aggregate({a}, "x");
  CHECK(one.rows[0].se[0] == 0.0);
  std::ostringstream out;
  write_summary(out, s);
  CHECK(out.str().find("2,-4,8") != std::string::npos);
}

TEST_CASE("csv: formatting round-trips and schemas") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 123456789.125}) {
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(std::isnan(parse_double(format_double(std::nan("")))));
  CHECK_THROWS_AS(parse_double("1.0x"), ConfigError);
  CHECK(summary_header().size() == 1 + 3 * kSummaryMetrics.size());

  const fs::path dir = temp_dir("csv");
  RunRecord empty;
  empty.dim = 2;
  write_iterations((dir / "empty.csv").string(), empty);
  CHECK(slurp(dir / "empty.csv") ==
        "seed,t,x1,x2,y,beta,r_t,R_t,max_loss,precision,recall,fscore,wall_ms\n");

  const ExperimentConfig c = desk_config();
  const RunRecord rec = run_acquisition(c, c.acquisitions[0]);
  write_iterations((dir / "it.csv").string(), rec);
  int dim = 0;
  const auto rows = read_iterations((dir / "it.csv").string(), &dim);
  CHECK(dim == 2);
  REQUIRE(rows.size() == 30);
  std::size_t k = 0;
  for (const auto& s : rec.seeds) {
    for (const auto& row : s.rows) {
      CHECK(rows[k].x == row.x);
      CHECK(rows[k].y == row.y);
      CHECK(rows[k].beta == row.beta);
      CHECK(rows[k].R_t == row.R_t);
      ++k;
    }
  }
  const Summary s = aggregate(rec);
  write_summary((dir / "sum.csv").string(), s);
  const Summary back = read_summary((dir / "sum.csv").string());
  REQUIRE(back.rows.size() == s.rows.size());
  CHECK(back.rows[3].mean == s.rows[3].mean);
  CHECK_THROWS_AS(read_summary((dir / "it.csv").string()), ConfigError);
  CHECK_THROWS_AS(write_iterations("/nonexistent/dir/x.csv", rec), IoError);
}

TEST_CASE("plot: deterministic SVG with one legend entry per series") {
  const ExperimentConfig c = desk_config();
  const auto recs = run_experiment(c);
  Summary a = aggregate(recs[0]);
  Summary b = a;
  b.label = "other";
  const std::string one = render_svg({a, b}, "fscore");
  CHECK(one == render_svg({a, b}, "fscore"));
  std::size_t legends = 0;
  for (std::size_t pos = one.find("class=\"legend\""); pos != std::string::npos;
       pos = one.find("class=\"legend\"", pos + 1)) {
    ++legends;
  }
  CHECK(legends == 2);
  try {
    render_svg({a}, "precision");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("r_t, fscore, max_loss") != std::string::npos);
  }
  CHECK_THROWS_AS(render_svg({}, "r_t"), ConfigError);
}

TEST_CASE("bound check: misspecified targets get a caveat") {
  ExperimentConfig c = desk_config();
  c.iterations = 5;
  const RunRecord rec = run_acquisition(c, c.acquisitions[0]);
  const TheoryReport exact = bound_check(rec, c);
  CHECK_FALSE(exact.misspecified);
  CHECK(exact.rows.size() == 5);
  CHECK(exact.rows[0].rhs_rate >= exact.rows[0].mean_rate);
  ExperimentConfig m = c;
  m.blackbox.sample_kernel = gp::KernelSpec::gaussian(1.0, 0.5);
  CHECK(bound_check(rec, m).misspecified);
  CHECK(bound_check(rec, m).verdict() == "CAVEAT");
  m = c;
  m.noise_variance = 0.0;
  CHECK_THROWS_AS(bound_check(rec, m), ConfigError);
}
