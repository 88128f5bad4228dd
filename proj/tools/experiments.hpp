#pragma once

#include <cstdint>
#include <string>

#include "config.hpp"
#include "driftlab/train.hpp"

namespace driftlab::cli {

struct RunOptions {
  std::string config_path;
  std::string out_dir;  // overrides experiment.out_dir when non-empty
  bool seed_override = false;
  std::uint64_t seed = 0;
};

// Exit status: 0 ok, 2 config error, 3 numeric failure.
int run_experiment(const RunOptions& opt);

// Parses and validates without running. 0 ok, 2 config error.
int validate_config(const std::string& path);

// Shared builders (exposed for tests).
TargetSampler make_target_sampler(const Config& cfg, const std::string& prefix,
                                  int* dim_out);
TrainConfig make_train_config(const Config& cfg, const std::string& prefix);

}  // namespace driftlab::cli
