#pragma once

#include <string>
#include <vector>

#include "mfbog/errors.h"
#include "mfbog/model.h"

namespace mfbog {

/// A parsed configuration file: the model plus the scan lists.
struct RunConfig {
  ModelConfig model;
  /// N values, ascending; model.particles holds the first.
  std::vector<int> particle_list;
  /// Excitation cutoffs for the cutoff scan (defaults to {excitation_cutoff}).
  std::vector<int> cutoff_list;
};

/// Parses JSON text. Recognized keys: dimension, n_max, w_hat, N,
/// excitation_cutoff, eigensolver_tol, expm_tol, rng_seed, full_space,
/// cutoff_list. Errors throw ConfigError naming the source, line and key.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");

/// Reads and parses a file; unreadable files throw ConfigError.
RunConfig load_config(const std::string& path);

/// Resolved configuration as pretty JSON text (w_hat with both partners).
std::string config_to_json(const RunConfig& config);

}  // namespace mfbog
