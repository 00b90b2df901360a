#include "saber/manifest.hpp"

#include <fstream>

#include "saber/hashing.hpp"

namespace saber {

void write_manifest(const RunManifest& m, const std::string& path) {
    nlohmann::ordered_json j;
    j["tool"] = std::string("saber ") + kToolVersion;
    j["command"] = m.command;
    j["seed"] = m.seed;
    j["config"] = m.config;
    j["config_hash"] = hex64(fnv1a64(m.config.dump()));
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const auto& [p, digest] : m.inputs) inputs[p] = digest;
    j["inputs"] = inputs;
    j["outputs"] = m.outputs;
    j["wall_s"] = m.wall_s;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest '" + path + "'");
    out << j.dump(2) << '\n';
}

}  // namespace saber
