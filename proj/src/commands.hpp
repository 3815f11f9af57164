#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "config.hpp"

namespace gpsmc {

// Executes the configured task and writes every artifact (plus a manifest
// that reproduces the run) into the output directory. Overrides replace the
// document's values before validation, so the manifest reflects them. A
// non-empty expected_task must match the document's task. Returns the
// output directory used.
std::string run_command(nlohmann::json doc, const std::string& expected_task,
                        const std::optional<std::string>& out_override,
                        const std::optional<std::uint64_t>& seed_override);

// File-path convenience used by the C API's tests: loads the document
// (unwrapping manifests), applies an optional preset, then runs.
std::string run_command_file(const std::string& config_path, const std::string& preset,
                             const std::optional<std::string>& out_override,
                             const std::optional<std::uint64_t>& seed_override);

}  // namespace gpsmc
