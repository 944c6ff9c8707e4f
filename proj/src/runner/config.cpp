#include "lsekit/runner/config.hpp"

#include "lsekit/benchlab.hpp"
#include "lsekit/error.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace lsekit::run {

using nlohmann::json;

std::string_view to_string(AlgorithmVariant v) {
  switch (v) {
    case AlgorithmVariant::avg_loss: return "avg_loss";
    case AlgorithmVariant::max_finite: return "max_finite";
    case AlgorithmVariant::max_infinite: return "max_infinite";
  }
  return "avg_loss";
}

AlgorithmVariant variant_from_string(std::string_view name) {
  if (name == "avg_loss") return AlgorithmVariant::avg_loss;
  if (name == "max_finite") return AlgorithmVariant::max_finite;
  if (name == "max_infinite") return AlgorithmVariant::max_infinite;
  throw ConfigError("unknown algorithm_variant '" + std::string(name) +
                    "' (expected avg_loss, max_finite or max_infinite)");
}

namespace {

std::string_view to_string(GpUpdate u) { return u == GpUpdate::refit ? "refit" : "incremental"; }

GpUpdate gp_update_from_string(std::string_view name) {
  if (name == "incremental") return GpUpdate::incremental;
  if (name == "refit") return GpUpdate::refit;
  throw ConfigError("unknown gp_update '" + std::string(name) + "' (expected incremental or refit)");
}

void reject_unknown(const json& j, std::string_view where, std::set<std::string> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
T get(const json& j, const char* key, std::string_view where) {
  if (!j.contains(key)) throw ConfigError("missing '" + std::string(key) + "' in " + std::string(where));
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + std::string(where) + ": " +
                      e.what());
  }
}

template <typename T>
void get_opt(const json& j, const char* key, std::string_view where, T& out) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

json kernel_json(const gp::KernelSpec& k) {
  return {{"variant", std::string(gp::to_string(k.variant))},
          {"amplitude", k.amplitude},
          {"lengthscale", k.lengthscale}};
}

gp::KernelSpec kernel_from(const json& j, std::string_view where) {
  reject_unknown(j, where, {"variant", "amplitude", "lengthscale"});
  gp::KernelSpec k;
  k.variant = gp::kernel_variant_from_string(get<std::string>(j, "variant", where));
  k.amplitude = get<double>(j, "amplitude", where);
  k.lengthscale = get<double>(j, "lengthscale", where);
  return k;
}

}  // namespace

json to_json(const acq::AcquisitionSpec& s) {
  json j = {{"rule", std::string(acq::to_string(s.rule))}};
  switch (s.rule) {
    case acq::Rule::straddle:
      j["beta_sqrt"] = s.beta_sqrt;
      break;
    case acq::Rule::lse:
      j["delta"] = s.delta;
      if (s.use_intersection) j["use_intersection"] = *s.use_intersection;
      if (s.lse_cardinality) j["lse_cardinality"] = *s.lse_cardinality;
      break;
    case acq::Rule::rand_straddle_max_infinite:
      j["a"] = s.a;
      j["b"] = s.b;
      if (s.r) j["r"] = *s.r;
      break;
    default:
      break;
  }
  // Non-default values of fields the rule ignores still round-trip.
  const acq::AcquisitionSpec def;
  if (!j.contains("beta_sqrt") && s.beta_sqrt != def.beta_sqrt) j["beta_sqrt"] = s.beta_sqrt;
  if (!j.contains("delta") && s.delta != def.delta) j["delta"] = s.delta;
  if (!j.contains("use_intersection") && s.use_intersection) j["use_intersection"] = *s.use_intersection;
  if (!j.contains("lse_cardinality") && s.lse_cardinality) j["lse_cardinality"] = *s.lse_cardinality;
  if (!j.contains("a") && s.a != def.a) j["a"] = s.a;
  if (!j.contains("b") && s.b != def.b) j["b"] = s.b;
  if (!j.contains("r") && s.r) j["r"] = *s.r;
  return j;
}

acq::AcquisitionSpec acquisition_from_json(const json& j) {
  constexpr std::string_view where = "acquisition";
  if (j.is_string()) {
    acq::AcquisitionSpec s;
    s.rule = acq::rule_from_string(j.get<std::string>());
    return s;
  }
  reject_unknown(j, where,
                 {"rule", "beta_sqrt", "delta", "use_intersection", "lse_cardinality", "a", "b", "r"});
  acq::AcquisitionSpec s;
  s.rule = acq::rule_from_string(get<std::string>(j, "rule", where));
  get_opt(j, "beta_sqrt", where, s.beta_sqrt);
  get_opt(j, "delta", where, s.delta);
  if (j.contains("use_intersection")) s.use_intersection = get<bool>(j, "use_intersection", where);
  if (j.contains("lse_cardinality")) s.lse_cardinality = get<double>(j, "lse_cardinality", where);
  get_opt(j, "a", where, s.a);
  get_opt(j, "b", where, s.b);
  if (j.contains("r")) s.r = get<double>(j, "r", where);
  return s;
}

json to_json(const ExperimentConfig& c) {
  json bb = {{"kind", c.blackbox.kind}};
  if (!c.blackbox.name.empty()) bb["name"] = c.blackbox.name;
  if (c.blackbox.sample_kernel) bb["sample_kernel"] = kernel_json(*c.blackbox.sample_kernel);
  if (!c.blackbox.csv.empty()) bb["csv"] = c.blackbox.csv;
  if (c.blackbox.strict) bb["strict"] = true;
  if (c.blackbox.observation_noise_variance) {
    bb["observation_noise_variance"] = *c.blackbox.observation_noise_variance;
  }

  json dom = {{"type", c.domain.type}};
  if (!c.domain.lower.empty()) dom["lower"] = c.domain.lower;
  if (!c.domain.upper.empty()) dom["upper"] = c.domain.upper;
  if (!c.domain.n.empty()) dom["n"] = c.domain.n;
  if (c.domain.type == "box" || c.domain.candidates != DomainConfig{}.candidates) {
    dom["candidates"] = c.domain.candidates;
  }
  dom["allow_repeat"] = c.domain.allow_repeat;

  json acqs = json::array();
  for (const auto& a : c.acquisitions) acqs.push_back(to_json(a));

  json j;
  j["blackbox"] = std::move(bb);
  j["domain"] = std::move(dom);
  j["kernel"] = kernel_json(c.kernel);
  j["noise_variance"] = c.noise_variance;
  j["theta"] = c.theta;
  j["acquisition"] = std::move(acqs);
  j["iterations"] = c.iterations;
  j["n_seeds"] = c.n_seeds;
  j["master_seed"] = c.master_seed;
  j["eval"] = {{"test_points", c.eval.test_points},
               {"every", c.eval.every},
               {"tcheck_samples", c.eval.tcheck_samples},
               {"tcheck_points", c.eval.tcheck_points},
               {"record_wall_ms", c.eval.record_wall_ms}};
  j["algorithm_variant"] = std::string(to_string(c.algorithm_variant));
  j["initial_points"] = c.initial_points;
  j["gp_update"] = std::string(to_string(c.gp_update));
  if (!c.output_dir.empty()) j["output"] = {{"dir", c.output_dir}};
  return j;
}

ExperimentConfig config_from_json(const json& j, std::string base_dir) {
  reject_unknown(j, "config",
                 {"blackbox", "domain", "kernel", "noise_variance", "theta", "acquisition",
                  "iterations", "n_seeds", "master_seed", "eval", "algorithm_variant",
                  "initial_points", "gp_update", "output"});
  ExperimentConfig c;
  c.base_dir = std::move(base_dir);

  if (!j.contains("blackbox")) throw ConfigError("missing 'blackbox' in config");
  const json& bb = j.at("blackbox");
  reject_unknown(bb, "blackbox",
                 {"kind", "name", "sample_kernel", "csv", "strict", "observation_noise_variance"});
  c.blackbox.kind = get<std::string>(bb, "kind", "blackbox");
  get_opt(bb, "name", "blackbox", c.blackbox.name);
  if (bb.contains("sample_kernel")) {
    c.blackbox.sample_kernel = kernel_from(bb.at("sample_kernel"), "blackbox.sample_kernel");
  }
  get_opt(bb, "csv", "blackbox", c.blackbox.csv);
  get_opt(bb, "strict", "blackbox", c.blackbox.strict);
  if (bb.contains("observation_noise_variance")) {
    c.blackbox.observation_noise_variance =
        get<double>(bb, "observation_noise_variance", "blackbox");
  }

  if (!j.contains("domain")) throw ConfigError("missing 'domain' in config");
  const json& dom = j.at("domain");
  reject_unknown(dom, "domain", {"type", "lower", "upper", "n", "candidates", "allow_repeat"});
  c.domain.type = get<std::string>(dom, "type", "domain");
  get_opt(dom, "lower", "domain", c.domain.lower);
  get_opt(dom, "upper", "domain", c.domain.upper);
  get_opt(dom, "n", "domain", c.domain.n);
  get_opt(dom, "candidates", "domain", c.domain.candidates);
  get_opt(dom, "allow_repeat", "domain", c.domain.allow_repeat);

  if (!j.contains("kernel")) throw ConfigError("missing 'kernel' in config");
  c.kernel = kernel_from(j.at("kernel"), "kernel");
  c.noise_variance = get<double>(j, "noise_variance", "config");
  c.theta = get<double>(j, "theta", "config");

  if (!j.contains("acquisition")) throw ConfigError("missing 'acquisition' in config");
  const json& acqs = j.at("acquisition");
  if (acqs.is_array()) {
    for (const auto& a : acqs) c.acquisitions.push_back(acquisition_from_json(a));
  } else {
    c.acquisitions.push_back(acquisition_from_json(acqs));
  }

  c.iterations = get<int>(j, "iterations", "config");
  get_opt(j, "n_seeds", "config", c.n_seeds);
  get_opt(j, "master_seed", "config", c.master_seed);
  if (j.contains("eval")) {
    const json& ev = j.at("eval");
    reject_unknown(ev, "eval",
                   {"test_points", "every", "tcheck_samples", "tcheck_points", "record_wall_ms"});
    get_opt(ev, "test_points", "eval", c.eval.test_points);
    get_opt(ev, "every", "eval", c.eval.every);
    get_opt(ev, "tcheck_samples", "eval", c.eval.tcheck_samples);
    get_opt(ev, "tcheck_points", "eval", c.eval.tcheck_points);
    get_opt(ev, "record_wall_ms", "eval", c.eval.record_wall_ms);
  }
  if (j.contains("algorithm_variant")) {
    c.algorithm_variant = variant_from_string(get<std::string>(j, "algorithm_variant", "config"));
  }
  get_opt(j, "initial_points", "config", c.initial_points);
  if (j.contains("gp_update")) {
    c.gp_update = gp_update_from_string(get<std::string>(j, "gp_update", "config"));
  }
  if (j.contains("output")) {
    const json& out = j.at("output");
    reject_unknown(out, "output", {"dir"});
    get_opt(out, "dir", "output", c.output_dir);
  }
  c.validate();
  return c;
}

std::string ExperimentConfig::csv_path() const {
  std::filesystem::path p(blackbox.csv);
  if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
  return p.lexically_normal().string();
}

void ExperimentConfig::validate() const {
  const std::string& kind = blackbox.kind;
  if (kind != "analytic" && kind != "gp_sample" && kind != "tabulated") {
    throw ConfigError("blackbox.kind must be analytic, gp_sample or tabulated, got '" + kind + "'");
  }
  const std::string& type = domain.type;
  if (type != "grid" && type != "box" && type != "tabulated") {
    throw ConfigError("domain.type must be grid, box or tabulated, got '" + type + "'");
  }

  if (type == "tabulated") {
    if (kind != "tabulated") throw ConfigError("domain.type 'tabulated' requires a tabulated blackbox");
  } else {
    const std::size_t d = domain.lower.size();
    if (d == 0 || domain.upper.size() != d) {
      throw ConfigError("domain.lower and domain.upper must be non-empty and of equal length");
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (!(domain.lower[i] < domain.upper[i])) {
        throw ConfigError("domain bounds must satisfy lower < upper on every axis");
      }
    }
    if (type == "grid") {
      if (domain.n.size() != d) throw ConfigError("domain.n must give a point count per axis");
      for (int n : domain.n) {
        if (n < 2) throw ConfigError("domain.n entries must be >= 2");
      }
    } else if (domain.candidates < 1) {
      throw ConfigError("domain.candidates must be >= 1");
    }
  }

  if (kind == "analytic") {
    const lab::Analytic fn = lab::analytic_from_string(blackbox.name);
    if (type != "tabulated" && static_cast<int>(domain.lower.size()) != lab::analytic_dim(fn)) {
      throw ConfigError("function '" + blackbox.name + "' is " +
                        std::to_string(lab::analytic_dim(fn)) + "-dimensional but the domain has " +
                        std::to_string(domain.lower.size()) + " axes");
    }
  } else if (kind == "gp_sample") {
    if (type != "grid") throw ConfigError("gp_sample blackboxes need a grid domain");
    if (blackbox.sample_kernel) blackbox.sample_kernel->validate();
  } else {
    if (blackbox.csv.empty()) throw ConfigError("tabulated blackbox needs blackbox.csv");
    if (type != "tabulated") throw ConfigError("tabulated blackbox needs domain.type 'tabulated'");
  }

  kernel.validate();
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw ConfigError("noise_variance must be finite and >= 0");
  }
  if (blackbox.observation_noise_variance) {
    const double v = *blackbox.observation_noise_variance;
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("observation_noise_variance must be finite and >= 0");
    }
  }
  if (!std::isfinite(theta)) throw ConfigError("theta must be finite");
  if (acquisitions.empty()) throw ConfigError("acquisition list is empty");
  for (const auto& a : acquisitions) {
    a.validate();
    if (type == "box" && a.rule == acq::Rule::mile) {
      throw ConfigError("mile does not support continuous domains (unsupported rule)");
    }
    if (type == "box" && a.rule == acq::Rule::rand_straddle_max_finite) {
      throw ConfigError("rand_straddle_max_finite requires a finite domain");
    }
    if (type == "box" && a.rule == acq::Rule::lse && a.use_intersection.value_or(false)) {
      throw ConfigError("lse band intersection requires a finite domain");
    }
  }
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
  if (initial_points < 0) throw ConfigError("initial_points must be >= 0");
  if (eval.every < 1) throw ConfigError("eval.every must be >= 1");
  if (eval.test_points < 1) throw ConfigError("eval.test_points must be >= 1");
  if (eval.tcheck_samples < 1) throw ConfigError("eval.tcheck_samples must be >= 1");
  if (eval.tcheck_points < 1) throw ConfigError("eval.tcheck_points must be >= 1");
  if (algorithm_variant == AlgorithmVariant::max_finite && type == "box") {
    throw ConfigError("algorithm_variant max_finite requires a finite domain");
  }
  if (algorithm_variant == AlgorithmVariant::max_infinite && type != "box") {
    throw ConfigError("algorithm_variant max_infinite requires a box domain");
  }
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return blackbox == o.blackbox && domain == o.domain && kernel == o.kernel &&
         noise_variance == o.noise_variance && theta == o.theta &&
         acquisitions == o.acquisitions && iterations == o.iterations && n_seeds == o.n_seeds &&
         master_seed == o.master_seed && eval == o.eval &&
         algorithm_variant == o.algorithm_variant && initial_points == o.initial_points &&
         gp_update == o.gp_update && output_dir == o.output_dir;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  const auto dir = std::filesystem::path(path).parent_path().string();
  return config_from_json(j, dir);
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write config '" + path + "'");
  out << to_json(cfg).dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace lsekit::run
