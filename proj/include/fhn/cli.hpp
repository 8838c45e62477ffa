#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace fhn::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

/// Everything that determines a run. `parameters` holds the subcommand's
/// flags under their long names (without dashes, '-' replaced by '_').
struct RunConfig {
    std::string command;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    std::string out_dir = ".";
    std::vector<std::string> formats;  // subset of {"csv", "json"}
    bool plot_script = false;
    bool deterministic = true;  // always on; recorded in every artifact
};

nlohmann::ordered_json to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::ordered_json& j);

/// Rejects non-positive tolerances, empty grids and unknown formats.
void validate(const RunConfig& cfg);

/// Executes a parsed config and writes its artifacts; returns written paths.
std::vector<std::string> execute(const RunConfig& cfg);

/// Full command line entry point. Exit codes: 0 success, 1 numerical or
/// domain failure (error JSON on stderr), 2 usage error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args without the program name

}  // namespace fhn::cli
