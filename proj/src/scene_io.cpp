#include "saber/scene_io.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

namespace saber {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

ordered_json map_to_json(const MapSpec& m) {
    ordered_json j;
    j["x_min"] = m.x_min;
    j["x_max"] = m.x_max;
    j["lane_centers_y"] = m.lane_centers_y;
    j["divider_y"] = m.divider_y;
    j["block_length"] = m.block_length;
    j["lane_direction"] = m.lane_direction;
    j["lane_width"] = m.lane_width;
    return j;
}

MapSpec map_from_json(const ordered_json& j, const std::string& ctx) {
    MapSpec m;
    try {
        m.x_min = j.at("x_min").get<double>();
        m.x_max = j.at("x_max").get<double>();
        m.lane_centers_y = j.at("lane_centers_y").get<std::vector<double>>();
        m.divider_y = j.at("divider_y").get<double>();
        m.block_length = j.at("block_length").get<double>();
        m.lane_direction = j.at("lane_direction").get<std::vector<int>>();
        m.lane_width = j.at("lane_width").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw SceneIoError(ctx + ": bad map field: " + e.what());
    }
    std::string why;
    if (!m.validate(&why)) throw SceneIoError(ctx + ": invalid map: " + why);
    return m;
}

}  // namespace

std::string scene_to_record(const Scene& scene) {
    ordered_json j;
    j["schema"] = kSchemaVersion;
    j["scene_id"] = scene.scene_id;
    j["dt"] = scene.dt;
    j["anomaly_type"] = scene.anomaly_type;
    std::string labels;
    labels.reserve(scene.labels.size());
    for (Label l : scene.labels) labels.push_back(label_char(l));
    j["labels"] = labels;
    j["map"] = map_to_json(scene.map);
    ordered_json vehicles = ordered_json::array();
    for (const auto& v : scene.vehicles) {
        ordered_json jv;
        std::string present;
        present.reserve(v.present.size());
        for (uint8_t p : v.present) present.push_back(p ? '1' : '0');
        jv["present"] = present;
        std::vector<double> xs(v.pos.size()), ys(v.pos.size());
        for (size_t t = 0; t < v.pos.size(); ++t) {
            xs[t] = v.pos[t].x;
            ys[t] = v.pos[t].y;
        }
        jv["x"] = xs;
        jv["y"] = ys;
        vehicles.push_back(std::move(jv));
    }
    j["vehicles"] = std::move(vehicles);
    return j.dump();
}

Scene scene_from_record(const std::string& line) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw SceneIoError(std::string("unparseable scene record: ") + e.what());
    }
    std::string id = j.value("scene_id", std::string("<missing id>"));
    auto ctx = "scene '" + id + "'";
    if (!j.contains("schema")) throw SceneIoError(ctx + ": missing schema version");
    int schema = j.at("schema").get<int>();
    if (schema != kSchemaVersion) {
        throw SceneIoError(ctx + ": unknown schema version " + std::to_string(schema) + " (expected " +
                           std::to_string(kSchemaVersion) + ")");
    }
    for (const char* key : {"scene_id", "dt", "anomaly_type", "labels", "map", "vehicles"}) {
        if (!j.contains(key)) throw SceneIoError(ctx + ": missing field '" + key + "'");
    }

    Scene scene;
    scene.scene_id = id;
    scene.dt = j.at("dt").get<double>();
    scene.anomaly_type = j.at("anomaly_type").get<std::string>();
    scene.map = map_from_json(j.at("map"), ctx);

    std::string labels = j.at("labels").get<std::string>();
    scene.labels.reserve(labels.size());
    for (char c : labels) {
        try {
            scene.labels.push_back(label_from_char(c));
        } catch (const std::invalid_argument& e) {
            throw SceneIoError(ctx + ": " + e.what());
        }
    }

    // null / non-numeric entries decode as NaN so the finite check below can
    // name the scene instead of surfacing a raw JSON type error
    auto coord_array = [&](const nlohmann::ordered_json& arr) {
        std::vector<double> out;
        out.reserve(arr.size());
        for (const auto& v : arr) out.push_back(v.is_number() ? v.get<double>() : std::nan(""));
        return out;
    };

    for (const auto& jv : j.at("vehicles")) {
        VehicleTrack track;
        std::string present = jv.at("present").get<std::string>();
        auto xs = coord_array(jv.at("x"));
        auto ys = coord_array(jv.at("y"));
        if (xs.size() != ys.size() || xs.size() != present.size() || xs.size() != labels.size()) {
            throw SceneIoError(ctx + ": vehicle array lengths disagree with labels length");
        }
        track.pos.resize(xs.size());
        track.present.resize(xs.size());
        for (size_t t = 0; t < xs.size(); ++t) {
            track.present[t] = present[t] == '1';
            track.pos[t] = {xs[t], ys[t]};
            if (track.present[t] && (!std::isfinite(xs[t]) || !std::isfinite(ys[t]))) {
                throw SceneIoError(ctx + ": non-finite coordinate at t=" + std::to_string(t));
            }
        }
        scene.vehicles.push_back(std::move(track));
    }

    std::string why;
    if (!scene.validate(&why)) throw SceneIoError(why);
    return scene;
}

void save_scenes(const std::vector<Scene>& scenes, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SceneIoError("cannot open '" + path + "' for writing");
    for (const auto& s : scenes) out << scene_to_record(s) << '\n';
    if (!out) throw SceneIoError("write failed for '" + path + "'");
}

std::vector<Scene> load_scenes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SceneIoError("cannot open '" + path + "' for reading");
    std::vector<Scene> scenes;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        scenes.push_back(scene_from_record(line));
    }
    return scenes;
}

std::vector<Scene> import_scene_arrays(const std::string& arrays_path, const std::string& map_sidecar_path) {
    std::ifstream map_in(map_sidecar_path);
    if (!map_in) throw SceneIoError("cannot open map sidecar '" + map_sidecar_path + "'");
    ordered_json jm;
    try {
        jm = ordered_json::parse(map_in);
    } catch (const nlohmann::json::exception& e) {
        throw SceneIoError(std::string("unparseable map sidecar: ") + e.what());
    }
    MapSpec map = map_from_json(jm, "map sidecar");

    std::ifstream in(arrays_path);
    if (!in) throw SceneIoError("cannot open '" + arrays_path + "'");
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw SceneIoError(std::string("unparseable scene arrays: ") + e.what());
    }
    if (!j.contains("scenes")) throw SceneIoError("scene arrays file: missing 'scenes'");

    std::vector<Scene> out;
    for (const auto& js : j.at("scenes")) {
        Scene scene;
        scene.scene_id = js.value("scene_id", "imported_" + std::to_string(out.size()));
        scene.dt = js.value("dt", 0.1);
        scene.anomaly_type = js.value("anomaly_type", std::string());
        scene.map = map;
        auto ctx = "scene '" + scene.scene_id + "'";

        // labels: array of ints 0=normal 1=ignored 2=abnormal
        if (!js.contains("labels") || !js.contains("positions")) throw SceneIoError(ctx + ": needs 'labels' and 'positions'");
        for (int l : js.at("labels").get<std::vector<int>>()) {
            if (l < 0 || l > 2) throw SceneIoError(ctx + ": label values must be 0, 1 or 2");
            scene.labels.push_back(Label(l));
        }

        // positions: [vehicle][timestep][2]; NaN entries mean "absent"
        for (const auto& jveh : js.at("positions")) {
            VehicleTrack track;
            for (const auto& jpos : jveh) {
                if (!jpos.is_array() || jpos.size() != 2) throw SceneIoError(ctx + ": each position must be [x, y]");
                double x = jpos[0].is_number() ? jpos[0].get<double>() : std::nan("");
                double y = jpos[1].is_number() ? jpos[1].get<double>() : std::nan("");
                bool present = std::isfinite(x) && std::isfinite(y);
                track.present.push_back(present);
                track.pos.push_back(present ? Vec2{x, y} : Vec2{0.0, 0.0});
            }
            if (track.pos.size() != scene.labels.size()) throw SceneIoError(ctx + ": vehicle length disagrees with labels");
            scene.vehicles.push_back(std::move(track));
        }
        std::string why;
        if (!scene.validate(&why)) throw SceneIoError(why);
        out.push_back(std::move(scene));
    }
    return out;
}

}  // namespace saber
