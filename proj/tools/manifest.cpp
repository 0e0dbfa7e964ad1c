#include "manifest.hpp"

#include "fit2/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

namespace fit2::cli
{

using nlohmann::json;

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path.string() + "' for hashing");

    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw Error("sha256: digest initialisation failed");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto n = in.gcount();
        if (n > 0 && EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(n)) != 1)
            throw Error("sha256: digest update failed");
    }
    if (in.bad())
        throw Error("read failed while hashing '" + path.string() + "'");
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
        throw Error("sha256: digest finalisation failed");

    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

FileDigest digest(const std::string& role, const std::filesystem::path& path, bool reproducible)
{
    return {role, path.string(), sha256_file(path), reproducible};
}

std::filesystem::path manifest_path_for(const std::filesystem::path& artifact)
{
    return std::filesystem::path(artifact.string() + ".manifest.json");
}

namespace
{

json files_to_json(const std::vector<FileDigest>& files)
{
    json a = json::array();
    for (const auto& f : files)
        a.push_back({{"role", f.role}, {"path", f.path}, {"sha256", f.sha256}, {"reproducible", f.reproducible}});
    return a;
}

std::vector<FileDigest> files_from_json(const json& a)
{
    std::vector<FileDigest> out;
    for (const auto& f : a)
        out.push_back({f.at("role").get<std::string>(), f.at("path").get<std::string>(),
                       f.at("sha256").get<std::string>(), f.value("reproducible", true)});
    return out;
}

} // namespace

json manifest_to_json(const RunManifest& m)
{
    json t = json::object();
    for (const auto& [k, v] : m.timings)
        t[k] = v;
    return {{"format", manifest_format_name},
            {"version", std::to_string(manifest_format_major) + ".0"},
            {"tool", tool_name},
            {"tool_version", m.version},
            {"command", m.command},
            {"seed", m.seed},
            {"config", m.config},
            {"inputs", files_to_json(m.inputs)},
            {"outputs", files_to_json(m.outputs)},
            {"timings_seconds", t}};
}

RunManifest manifest_from_json(const json& j)
{
    try {
        if (j.at("format").get<std::string>() != manifest_format_name)
            throw ValidationError("manifest: format is not '" + std::string(manifest_format_name) + "'");
        check_format_version(j, "manifest", manifest_format_major);
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.version = j.at("tool_version").get<std::string>();
        m.config = j.at("config");
        m.inputs = files_from_json(j.at("inputs"));
        m.outputs = files_from_json(j.at("outputs"));
        for (const auto& [k, v] : j.at("timings_seconds").items())
            m.timings.emplace_back(k, v.get<double>());
        return m;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("manifest: ") + e.what());
    }
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open '" + path.string() + "' for writing");
    out << manifest_to_json(m).dump(2) << '\n';
    if (!out)
        throw Error("write failed: '" + path.string() + "'");
}

RunManifest read_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open manifest '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("manifest '" + path.string() + "': " + e.what());
    }
    return manifest_from_json(j);
}

} // namespace fit2::cli
