#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "samples.hpp"

namespace gpsmc {

// Weighted-sample ensembles serialize with their coordinate names and the
// likelihood-evaluation count, so downstream prediction can run without the
// producing configuration.
nlohmann::json samples_to_json(const WeightedSamples& ws,
                               const std::vector<std::string>& coordinate_names,
                               std::int64_t eval_count);
WeightedSamples samples_from_json(const nlohmann::json& j);

// FNV-1a over the canonical dump, as a fixed-width hex string.
std::uint64_t fnv1a(const std::string& text);
std::string hash_hex(const std::string& text);

// Stable two-space-indented dump (object keys sorted); doubles round-trip.
std::string canonical_dump(const nlohmann::json& j);

// Write-to-temp-then-rename in the destination directory; never leaves a
// partial file behind under the final name.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace gpsmc
