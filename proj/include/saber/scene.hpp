#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "saber/geometry.hpp"
#include "saber/map.hpp"

namespace saber {

struct VehicleTrack {
    std::vector<Vec2> pos;          // length T
    std::vector<uint8_t> present;   // length T
};

// One multi-vehicle trajectory episode with per-timestep ground-truth labels.
struct Scene {
    std::string scene_id;
    double dt = 0.1;
    std::vector<VehicleTrack> vehicles;
    std::vector<Label> labels;      // length T, scene-level
    std::string anomaly_type;       // empty for all-normal scenes
    MapSpec map;

    int length() const { return vehicles.empty() ? 0 : int(vehicles[0].pos.size()); }
    int vehicle_count() const { return int(vehicles.size()); }
    bool validate(std::string* why = nullptr) const;
};

struct LaneObs {
    Vec2 disp[3];   // lane node minus vehicle position, valid per mask
    bool mask[3] = {false, false, false};
};

// Observation of one vehicle at one observation index t (scene time t+1):
// displacement since the previous step, lane-node displacements, and
// relative positions of every other vehicle with an observability mask.
struct ObsStep {
    bool valid = false;  // both endpoints of the displacement present
    Vec2 dx;
    LaneObs lane;
    std::vector<Vec2> nbr;          // one slot per other vehicle
    std::vector<uint8_t> nbr_mask;  // within neighbor radius and present
};

struct SceneObservations {
    std::string scene_id;
    std::string anomaly_type;
    std::vector<Label> labels;  // per scene timestep, length T
    int n_vehicles = 0;
    int obs_len = 0;  // T - 1; obs index t corresponds to scene time t+1
    std::vector<std::vector<ObsStep>> veh;
};

// Builds per-vehicle observation sequences. Neighbor slots are masked in for
// pairs within `neighbor_radius` (inclusive). The t=0 scene step has no
// displacement, so observation index 0 is scene time 1.
SceneObservations build_observations(const Scene& scene, double neighbor_radius);

// Fixed-length view into one scene's observation sequences.
struct Window {
    const SceneObservations* scene = nullptr;
    int start = 0;   // observation index
    int length = 0;  // T'
};

struct WindowingNote {
    std::string scene_id;
    std::string message;
};

// Start indices 0, s, 2s, ... with start + window_len <= seq_len.
std::vector<int> window_starts(int seq_len, int window_len, int stride);

std::vector<Window> make_windows(const SceneObservations& obs, int window_len, int stride,
                                 std::vector<WindowingNote>* notes = nullptr);

}  // namespace saber
