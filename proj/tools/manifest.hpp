#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fit2::cli
{

inline constexpr const char* tool_name = "fit2felm";
inline constexpr const char* tool_version = "1.0.0";
inline constexpr const char* manifest_format_name = "fit2felm-manifest";
inline constexpr int manifest_format_major = 1;

struct FileDigest
{
    std::string role;
    std::string path;
    std::string sha256;
    // False for outputs that carry wall-clock timings and so differ between runs.
    bool reproducible = true;
};

struct RunManifest
{
    std::string command;
    nlohmann::json config;
    std::uint64_t seed = 0;
    std::string version = tool_version;
    std::vector<FileDigest> inputs;
    std::vector<FileDigest> outputs;
    // Phase name -> wall-clock seconds.
    std::vector<std::pair<std::string, double>> timings;
};

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

FileDigest digest(const std::string& role, const std::filesystem::path& path, bool reproducible = true);

/// Sidecar path for an artifact: "<artifact>.manifest.json".
std::filesystem::path manifest_path_for(const std::filesystem::path& artifact);

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

} // namespace fit2::cli
