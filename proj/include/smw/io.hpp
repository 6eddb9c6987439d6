#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "smw/loop_engine.hpp"

namespace smw {

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

nlohmann::json to_json(const ArmCommand& cmd);
nlohmann::json to_json(const Command& cmd);
nlohmann::json to_json(const VisualField& field);

// Dense weight vector over `n_primitives` entries.
std::vector<double> dense_weights(const ArmCommand& cmd, std::size_t n_primitives);

// Shortest round-trip decimal form; used for every number written to CSV.
std::string format_double(double value);

}  // namespace smw
