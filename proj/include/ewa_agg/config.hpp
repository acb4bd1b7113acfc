#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include <json.hpp>

#include "ewa_agg/model.hpp"
#include "ewa_agg/noise.hpp"

namespace ewa_agg {

/// One simulation setup: true signal, dictionary with prior, noise law,
/// temperature and Monte Carlo controls.
struct ExperimentConfig {
  SignalVector truth;
  Dictionary dictionary;
  WeightVector prior;
  NoiseModel noise;
  double beta = 1.0;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  std::optional<std::size_t> prior_samples;

  /// Checks beta > 0, replicates >= 1, prior length m, and that truth,
  /// dictionary and noise share one dimension.
  void validate() const;
};

/// Parses the config document. Throws InputError naming the offending key.
/// "beta" may be a number or the string "inf"; "prior" may be an array or
/// "uniform" (also the default when absent). Scalar noise parameters are
/// broadcast to every coordinate.
ExperimentConfig config_from_json(const nlohmann::json& doc);

nlohmann::json config_to_json(const ExperimentConfig& config);

/// Parses a {"family": ..., "params": {...}} noise document of dimension n.
NoiseModel noise_from_json(const nlohmann::json& doc, std::size_t n);
nlohmann::json noise_to_json(const NoiseModel& model);

}  // namespace ewa_agg
