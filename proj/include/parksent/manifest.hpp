#pragma once

// Content hashing and the run manifest. FNV-1a 64-bit is enough to key
// the stage cache and to make reruns comparable byte-for-byte. Wall
// times are written to a separate timings file so the manifest itself is
// deterministic for a fixed (inputs, config, seed).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace parksent::pipeline {

inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

inline std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("hash_file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return hash_hex(fnv1a64(ss.str()));
}

// combined hash over several strings (file hashes, fingerprints)
inline std::string hash_strings(const std::vector<std::string>& parts) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& p : parts) {
        h = fnv1a64(p, h);
        h = fnv1a64("|", h);
    }
    return hash_hex(h);
}

struct StageRecord {
    std::string stage;
    std::string input_hash;
    std::string output_hash;
    std::vector<std::string> outputs;  // file names relative to out dir
    bool from_cache = false;
    double seconds = 0.0;
};

struct Manifest {
    std::vector<StageRecord> stages;

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& s : stages)
            arr.push_back({{"stage", s.stage},
                           {"input_hash", s.input_hash},
                           {"output_hash", s.output_hash},
                           {"outputs", s.outputs}});
        return {{"stages", arr}};
    }

    nlohmann::json timings_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& s : stages)
            arr.push_back({{"stage", s.stage},
                           {"seconds", s.seconds},
                           {"from_cache", s.from_cache}});
        return {{"timings", arr}};
    }
};

inline void write_json_file(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << j.dump(1) << "\n";
}

}  // namespace parksent::pipeline
