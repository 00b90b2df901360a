#pragma once

#include <string>
#include <vector>

#include "saber/geometry.hpp"

namespace saber {

// Straight multi-lane highway. Lanes are listed bottom-to-top; all lanes on
// one side of divider_y share a travel direction and the two sides travel in
// opposite directions.
struct MapSpec {
    double x_min = 0.0;
    double x_max = 400.0;
    std::vector<double> lane_centers_y;
    double divider_y = 0.0;
    double block_length = 5.0;
    std::vector<int> lane_direction;  // +1 = +x travel, -1 = -x travel, per lane
    double lane_width = 4.0;

    int lane_count() const { return int(lane_centers_y.size()); }
    bool validate(std::string* why = nullptr) const;

    // Two lanes per direction, divider at y=0, 400 m of road.
    static MapSpec default_two_way();
};

enum LaneSlot : int { kLaneFront = 0, kLaneLeft = 1, kLaneRight = 2 };

// Permissible lane-node coordinates for one vehicle position. Masked slots
// carry no coordinate.
struct LaneTuple {
    Vec2 node[3];
    bool mask[3] = {false, false, false};
};

// Discretization of a MapSpec into fixed-length blocks plus the lane-node
// lookup rules (front along the lane's travel direction, left/right limited
// to the same side of the divider).
class BlockIndexer {
public:
    explicit BlockIndexer(const MapSpec& map);

    int block_count() const { return blocks_; }

    // floor((x - x_min) / block_length); out-of-range x clamps to the
    // boundary block and sets *clamped.
    int block_of(double x, bool* clamped = nullptr) const;

    // Center of `block` in `lane`.
    Vec2 node_coord(int block, int lane) const;

    // Nearest lane center by |y - center|; ties break toward the lower index.
    int nearest_lane(double y) const;

    LaneTuple lane_nodes_for(const Vec2& position) const;

    const MapSpec& map() const { return map_; }

private:
    MapSpec map_;
    int blocks_ = 0;
};

}  // namespace saber
