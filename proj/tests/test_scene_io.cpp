#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "saber/scene_io.hpp"
#include "saber/synth.hpp"

using namespace saber;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE("scene_io") {

TEST_CASE("round trip preserves every field") {
    ScenarioSpec spec;
    spec.kind = ScenarioKind::WrongWay;
    spec.seed = 11;
    spec.duration = 32;
    Scene orig = generate(spec, MapSpec::default_two_way());
    std::string path = temp_path("saber_io_rt.jsonl");
    save_scenes({orig}, path);
    auto loaded = load_scenes(path);
    REQUIRE(loaded.size() == 1);
    const Scene& got = loaded[0];
    CHECK(got.scene_id == orig.scene_id);
    CHECK(got.dt == orig.dt);
    CHECK(got.anomaly_type == orig.anomaly_type);
    REQUIRE(got.labels.size() == orig.labels.size());
    for (size_t t = 0; t < got.labels.size(); ++t) CHECK(got.labels[t] == orig.labels[t]);
    REQUIRE(got.vehicles.size() == orig.vehicles.size());
    for (size_t v = 0; v < got.vehicles.size(); ++v) {
        for (size_t t = 0; t < got.vehicles[v].pos.size(); ++t) {
            CHECK(got.vehicles[v].pos[t].x == orig.vehicles[v].pos[t].x);
            CHECK(got.vehicles[v].pos[t].y == orig.vehicles[v].pos[t].y);
            CHECK(got.vehicles[v].present[t] == orig.vehicles[v].present[t]);
        }
    }
    CHECK(got.map.lane_centers_y == orig.map.lane_centers_y);
    std::remove(path.c_str());
}

TEST_CASE("save -> load -> save is byte identical") {
    DatasetSpec spec = DatasetSpec::defaults();
    spec.test_counts = {{ScenarioKind::Following, 2}, {ScenarioKind::OffRoad, 2}, {ScenarioKind::Skidding, 1}};
    spec.train_counts = {{ScenarioKind::Following, 2}};
    Dataset ds = generate_dataset(spec);
    std::string p1 = temp_path("saber_io_b1.jsonl");
    std::string p2 = temp_path("saber_io_b2.jsonl");
    save_scenes(ds.test, p1);
    save_scenes(load_scenes(p1), p2);
    CHECK(slurp(p1) == slurp(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("NaN coordinates are a load error naming the scene") {
    Scene s;
    s.scene_id = "nan_scene";
    s.map = MapSpec::default_two_way();
    s.labels.assign(3, Label::Normal);
    VehicleTrack v;
    v.pos = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}};
    v.present = {1, 1, 1};
    s.vehicles = {v, v};
    std::string rec = scene_to_record(s);
    // corrupt one y value in the serialized form
    auto pos = rec.find("\"y\":[0.0");
    REQUIRE(pos != std::string::npos);
    rec.replace(pos, 8, "\"y\":[null");
    CHECK_THROWS_WITH_AS(scene_from_record(rec), doctest::Contains("nan_scene"), SceneIoError);
}

TEST_CASE("empty file loads as an empty list") {
    std::string path = temp_path("saber_io_empty.jsonl");
    {
        std::ofstream out(path);
    }
    CHECK(load_scenes(path).empty());
    std::remove(path.c_str());
}

TEST_CASE("unknown schema version and missing fields are typed errors") {
    ScenarioSpec spec;
    spec.kind = ScenarioKind::Following;
    spec.seed = 3;
    spec.duration = 20;
    Scene s = generate(spec, MapSpec::default_two_way());
    std::string rec = scene_to_record(s);
    {
        std::string bad = rec;
        auto p = bad.find("\"schema\":1");
        REQUIRE(p != std::string::npos);
        bad.replace(p, 10, "\"schema\":9");
        CHECK_THROWS_WITH_AS(scene_from_record(bad), doctest::Contains("schema"), SceneIoError);
    }
    {
        nlohmann::ordered_json j = nlohmann::ordered_json::parse(rec);
        j.erase("labels");
        CHECK_THROWS_WITH_AS(scene_from_record(j.dump()), doctest::Contains("labels"), SceneIoError);
    }
}

TEST_CASE("import adapter reads coordinate arrays with a map sidecar") {
    std::string arrays = temp_path("saber_import.json");
    std::string sidecar = temp_path("saber_map.json");
    {
        std::ofstream out(arrays);
        out << R"({"scenes":[{"scene_id":"imp0","dt":0.1,"anomaly_type":"off_road",
                 "labels":[0,0,2,2,1],
                 "positions":[[[0,-6],[2,-6],[4,-6],[6,-6],[8,-6]],
                              [[30,-2],[32,-2],[null,null],[36,-2],[38,-2]]]}]})";
    }
    {
        std::ofstream out(sidecar);
        out << R"({"x_min":0,"x_max":400,"lane_centers_y":[-6,-2,2,6],"divider_y":0,
                 "block_length":5,"lane_direction":[1,1,-1,-1],"lane_width":4})";
    }
    auto scenes = import_scene_arrays(arrays, sidecar);
    REQUIRE(scenes.size() == 1);
    CHECK(scenes[0].scene_id == "imp0");
    CHECK(scenes[0].anomaly_type == "off_road");
    CHECK(scenes[0].labels[2] == Label::Abnormal);
    CHECK(scenes[0].labels[4] == Label::Ignored);
    CHECK(scenes[0].vehicles[1].present[2] == 0);  // null position -> absent
    CHECK(scenes[0].vehicles[1].present[3] == 1);
    std::remove(arrays.c_str());
    std::remove(sidecar.c_str());
}

}  // TEST_SUITE
