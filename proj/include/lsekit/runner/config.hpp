#pragma once

#include "lsekit/acquisition.hpp"
#include "lsekit/gp/kernel.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lsekit::run {

enum class AlgorithmVariant { avg_loss, max_finite, max_infinite };
std::string_view to_string(AlgorithmVariant v);
AlgorithmVariant variant_from_string(std::string_view name);

enum class GpUpdate { incremental, refit };

struct BlackBoxConfig {
  // "analytic", "gp_sample" or "tabulated".
  std::string kind = "analytic";
  // analytic: function name.
  std::string name;
  // gp_sample: generating kernel (defaults to the model kernel when unset).
  std::optional<gp::KernelSpec> sample_kernel;
  // tabulated: lifetime CSV path (relative paths resolve against the config
  // file's directory) and strict lattice validation.
  std::string csv;
  bool strict = false;
  // Noise actually added to observations; defaults to the model's
  // noise_variance.
  std::optional<double> observation_noise_variance;

  bool operator==(const BlackBoxConfig&) const = default;
};

struct DomainConfig {
  // "grid" (finite lattice), "box" (continuous) or "tabulated" (the
  // black box's own points).
  std::string type = "grid";
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<int> n;            // grid points per axis
  int candidates = 4096;         // box: random inner-maximiser candidates per iteration
  bool allow_repeat = true;      // false masks observed candidates out of the argmax

  bool operator==(const DomainConfig&) const = default;
};

struct EvalConfig {
  int test_points = 100000;  // box: fixed random test set per seed
  int every = 1;             // metric cadence in iterations
  int tcheck_samples = 100;  // sample paths for the t-check estimator
  int tcheck_points = 256;   // box: evaluation points for the t-check estimator
  bool record_wall_ms = false;

  bool operator==(const EvalConfig&) const = default;
};

struct ExperimentConfig {
  BlackBoxConfig blackbox;
  DomainConfig domain;
  gp::KernelSpec kernel;
  double noise_variance = 1e-6;
  double theta = 0.0;
  std::vector<acq::AcquisitionSpec> acquisitions;
  int iterations = 100;
  int n_seeds = 1;
  std::uint64_t master_seed = 0;
  EvalConfig eval;
  AlgorithmVariant algorithm_variant = AlgorithmVariant::avg_loss;
  int initial_points = 1;
  GpUpdate gp_update = GpUpdate::incremental;
  std::string output_dir;
  // Directory the config was loaded from; not serialised.
  std::string base_dir;

  bool finite_domain() const { return domain.type != "box"; }
  double observation_noise() const {
    return blackbox.observation_noise_variance.value_or(noise_variance);
  }
  // Resolved path of the tabulated CSV.
  std::string csv_path() const;

  // ConfigError describing the first problem found.
  void validate() const;

  bool operator==(const ExperimentConfig& other) const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j, std::string base_dir = {});

nlohmann::json to_json(const acq::AcquisitionSpec& spec);
acq::AcquisitionSpec acquisition_from_json(const nlohmann::json& j);

// ConfigError on malformed JSON or schema violations, IoError when the file
// cannot be read.
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

}  // namespace lsekit::run
