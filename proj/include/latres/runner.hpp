// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latres/spec_io.hpp"
#include "latres/types.hpp"

namespace latres {

/// One experiment: a command plus every numeric knob it may need. Unused
/// fields keep their defaults and round-trip through JSON unchanged.
struct ExperimentConfig {
  std::string command;  // spectrum|resonances|scaling|lap|kernel|verify|xcheck|generate
  std::string spec_path;
  std::string output_dir = ".";
  std::uint64_t seed = 1;

  int window = defaults::kWindow;
  int grid = defaults::kGrid;
  int nodes = defaults::kContourNodes;
  int threshold = 0;  // 0 or 4
  double r_min = 0.02;
  double r_max = 0.2;
  double min_sep = defaults::kMinSeparation;
  double continuation_radius = defaults::kContinuationRadius;
  double theta_re = 0.0;
  double theta_im = 0.05;
  double e_lo = 1.0;
  double e_hi = 3.0;
  int phi_site = 0;
  int psi_site = 0;
  std::vector<double> eps_ladder = {1e-1, 1e-2, 1e-3, 1e-4};
  double lambda_re = 0.1;
  double lambda_im = 0.1;
  double gamma = 1.0;  // weight rate for kernel dumps, generator decay rate
  std::string profile = "selfadjoint";
  int fiber_dim = 1;

  void validate() const;
};

Json config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const Json& j);

/// FNV-1a hash of the canonical config serialization, hex-encoded.
std::string config_hash(const ExperimentConfig& c);

/// Dispatches the command, writes `<command>.json` (and CSV twins) into the
/// output directory atomically, and returns the JSON document. Identical
/// config and seed produce an identical payload; the timestamp lives outside
/// the hashed payload.
Json run(const ExperimentConfig& config);

/// Atomic file write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace latres
