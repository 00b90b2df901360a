#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "saber/scene.hpp"

namespace saber {

struct SceneIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Line-delimited records, one scene per line, schema-versioned. Field order
// is canonical so save -> load -> save is byte-identical.
void save_scenes(const std::vector<Scene>& scenes, const std::string& path);
std::vector<Scene> load_scenes(const std::string& path);

// Serialized form of one scene (one line, no trailing newline).
std::string scene_to_record(const Scene& scene);
Scene scene_from_record(const std::string& line);

// Import adapter for externally produced trajectory data: a JSON file with
// per-scene coordinate and label arrays plus a separate MapSpec sidecar file.
std::vector<Scene> import_scene_arrays(const std::string& arrays_path, const std::string& map_sidecar_path);

}  // namespace saber
