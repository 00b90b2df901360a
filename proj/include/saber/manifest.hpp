#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace saber {

inline constexpr const char* kToolVersion = "0.1.0";

// Reproducibility record written next to every command's outputs: the full
// config snapshot plus seeds and input digests make the run repeatable.
struct RunManifest {
    std::string command;
    uint64_t seed = 0;
    nlohmann::ordered_json config;
    std::vector<std::pair<std::string, std::string>> inputs;  // path -> digest
    std::vector<std::string> outputs;
    double wall_s = 0.0;
};

void write_manifest(const RunManifest& m, const std::string& path);

}  // namespace saber
