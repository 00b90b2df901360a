#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "saber/scene.hpp"

namespace saber {

enum class ScenarioKind : int {
    SideBySide = 0,
    Overtaking,
    Following,
    OppositeDirections,
    AggressiveOvertaking,
    PushingAside,
    Tailgating,
    OffRoad,
    WrongWay,
    Skidding,
    LeftSpreading,
    RightSpreading,
    Reeving,
};

constexpr int kScenarioKindCount = 13;

const char* kind_name(ScenarioKind k);
ScenarioKind kind_from_name(const std::string& name);
bool kind_is_anomalous(ScenarioKind k);

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::Following;
    int duration = 48;       // timesteps; >= 16
    double noise_std = 0.05; // meters, Gaussian position noise
    uint64_t seed = 0;
    // abnormal label range [start, end); negative start = per-kind default
    int anomaly_start = -1;
    int anomaly_end = -1;
    int ignored_margin = 1;  // `ignored` steps flanking the abnormal span
    int vehicle_count = 2;   // extra vehicles beyond 2 are plain cruisers
    std::string scene_id;
};

// Deterministic scripted scene construction: piecewise constant-velocity /
// constant-acceleration phases with smoothstep lane changes, plus position
// noise. Same (spec, map) always yields the same Scene.
Scene generate(const ScenarioSpec& spec, const MapSpec& map);

struct DatasetSpec {
    std::map<ScenarioKind, int> train_counts;  // normal kinds only
    std::map<ScenarioKind, int> test_counts;
    uint64_t master_seed = 7;
    int duration = 48;          // base; per-scene durations jitter around this
    double duration_jitter = 0.3;
    double noise_std = 0.05;
    int ignored_margin = 1;
    MapSpec map = MapSpec::default_two_way();

    static DatasetSpec defaults();  // 80 normal train / 66 mixed test scenes
};

struct Dataset {
    std::vector<Scene> train;
    std::vector<Scene> test;
};

Dataset generate_dataset(const DatasetSpec& spec);

}  // namespace saber
