#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "impactrank/error.hpp"
#include "impactrank/mathutil.hpp"

namespace impactrank {

inline constexpr const char* kToolVersion = "0.1.0";

inline std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw Error("cannot open for hashing: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return hash_hex(fnv1a64(ss.str()));
}

inline std::string now_iso8601_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Provenance record written alongside every CLI output. Outputs are a pure
/// function of (command line, inputs, seed): rerunning with an identical
/// manifest reproduces them byte for byte; only the timestamps differ.
struct RunManifest {
    std::string command_line;
    std::string config_hash;
    std::string corpus_hash;  // empty when the command reads no corpus
    std::uint64_t seed = 0;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> outputs;

    void write(const std::string& path) const {
        nlohmann::json j;
        j["command_line"] = command_line;
        j["config_hash"] = config_hash;
        j["corpus_hash"] = corpus_hash;
        j["seed"] = seed;
        j["tool_version"] = kToolVersion;
        j["started_at"] = started_at;
        j["finished_at"] = finished_at;
        j["outputs"] = outputs;
        std::ofstream out(path, std::ios::binary);
        if (!out.good()) throw Error("cannot open for writing: " + path);
        out << j.dump(2) << '\n';
    }
};

}  // namespace impactrank
