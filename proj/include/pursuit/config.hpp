#pragma once

// Run configuration: environment and training parameters plus output
// settings. Layers compose as defaults <- JSON config file <- flags.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pursuit/dqn.hpp"
#include "pursuit/env.hpp"

namespace pursuit {

struct RunConfig {
    EnvConfig env;
    dqn::TrainConfig train;
    std::string out_dir{"out"};
    std::string checkpoint;
    bool export_trajectories{false};
};

/// Flat JSON object keyed by field name, e.g. {"gamma": 0.99, "buffer_size": 100000}.
[[nodiscard]] nlohmann::json to_json(const RunConfig& cfg);

/// Overlays the keys present in `doc` onto `cfg`. Unknown keys and wrongly
/// typed values throw std::invalid_argument.
void apply_json(RunConfig& cfg, const nlohmann::json& doc);

/// Reads a JSON config file; throws std::runtime_error when unreadable.
[[nodiscard]] nlohmann::json read_config_file(const std::string& path);

}  // namespace pursuit
