#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcs/device.hpp"
#include "rcs/errors.hpp"

namespace rcs {

inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a over raw bytes; used for input/output digests in run manifests.
inline uint64_t fnv1a(const std::string& bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string digest_hex(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
    return buf;
}

inline std::string digest_file(const std::string& path) {
    return digest_hex(detail::read_file(path));
}

// Re-running a manifest reproduces byte-identical primary outputs; the digest
// covers command, parameters, and input digests (not wall clock), so it can be
// embedded in the outputs it describes.
struct RunManifest {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json inputs = nlohmann::json::object();     // path -> digest
    nlohmann::json outputs = nlohmann::json::object();    // path -> digest
    double wall_clock_seconds = 0.0;

    void add_input(const std::string& path) { inputs[path] = digest_file(path); }
    void add_output(const std::string& path) { outputs[path] = digest_file(path); }

    std::string digest() const {
        nlohmann::json core = {{"command", command}, {"parameters", parameters},
                               {"inputs", inputs}, {"tool_version", kToolVersion}};
        return digest_hex(core.dump());
    }

    nlohmann::json to_json() const {
        return {{"schema_version", kSchemaVersion}, {"type", "run_manifest"},
                {"command", command}, {"parameters", parameters}, {"inputs", inputs},
                {"outputs", outputs}, {"tool_version", kToolVersion},
                {"manifest_digest", digest()}, {"wall_clock_seconds", wall_clock_seconds}};
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ParseError("cannot write file: " + path);
        out << to_json().dump(2) << "\n";
    }
};

inline void write_json_output(const nlohmann::json& doc, const std::string& path,
                              const RunManifest& manifest) {
    nlohmann::json stamped = doc;
    stamped["producer_manifest"] = manifest.digest();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << stamped.dump(2) << "\n";
}

} // namespace rcs
