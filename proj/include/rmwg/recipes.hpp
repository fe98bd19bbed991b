#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmwg/model.hpp"

namespace rmwg {

// Everything a command needs. Model keys of the config file go into params;
// the remaining keys stay in `settings` and are read by the commands.
struct RunConfig {
    std::string command;
    std::string preset;
    std::string config_path;
    ModelParams params;
    KeyValues settings;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    int threads = 1;
    int bootstrap_n = 1000;
};

// Preset (if any) first, then the config file, then explicit overrides from
// the command line. Unknown setting keys are a usage error.
RunConfig make_run_config(const std::string& command, const std::string& preset, const std::string& config_path,
                          const std::string& out_dir, std::optional<std::uint64_t> seed = std::nullopt,
                          std::optional<int> threads = std::nullopt);

// Settings a preset contributes before the config file is applied.
KeyValues preset_settings(const std::string& preset);

const std::vector<std::string>& command_names();

// Each command writes its outputs plus manifest.json into out_dir and returns
// the written file names.
std::vector<std::string> cmd_spectrum(const RunConfig& cfg);
std::vector<std::string> cmd_scatter(const RunConfig& cfg);
std::vector<std::string> cmd_emit(const RunConfig& cfg);
std::vector<std::string> cmd_fit(const RunConfig& cfg);
std::vector<std::string> cmd_chi(const RunConfig& cfg);

std::vector<std::string> run_command(const RunConfig& cfg);

}  // namespace rmwg
