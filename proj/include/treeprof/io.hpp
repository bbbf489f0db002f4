#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <span>
#include <string>
#include <vector>

#include "treeprof/degseq.hpp"
#include "treeprof/eipath.hpp"
#include "treeprof/tree.hpp"

namespace treeprof::io {

std::string read_file(const std::filesystem::path& path);
/// Creates parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

/// {"counts": {"i": N_i, ...}}
nlohmann::json degseq_to_json(const DegreeSequence& ds);
/// Throws Error{ParseError}, or the validation errors of DegreeSequence.
DegreeSequence degseq_from_json(const nlohmann::json& j);
/// "i,N" header then one row per nonzero count.
std::string degseq_to_csv(const DegreeSequence& ds);
DegreeSequence degseq_from_csv(std::string_view text);
/// Dispatches on a leading '{'.
DegreeSequence degseq_from_text(std::string_view text);

nlohmann::json tree_to_json(const PlaneTree& t);
PlaneTree tree_from_json(const nlohmann::json& j);
/// LEB128 length followed by LEB128 child counts.
std::vector<std::uint8_t> tree_to_binary(const PlaneTree& t);
PlaneTree tree_from_binary(std::span<const std::uint8_t> bytes);

/// "index,value" rows.
std::string walk_to_csv(std::span<const Count> values);
std::string walk_to_csv(std::span<const double> values);
std::vector<double> walk_from_csv(std::string_view text);

/// "t,value" rows.
std::string grid_path_to_csv(const GridPath& path);
GridPath grid_path_from_csv(std::string_view text);

/// "generation,z,c" rows.
std::string profile_to_csv(const Profile& p);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

}  // namespace treeprof::io
