#include "saber/map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace saber {

bool MapSpec::validate(std::string* why) const {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (!(block_length > 0.0)) return fail("block_length must be > 0");
    if (!(x_max > x_min)) return fail("x_max must be > x_min");
    if (lane_centers_y.empty()) return fail("at least one lane required");
    if (lane_direction.size() != lane_centers_y.size()) return fail("lane_direction size must match lane_centers_y");
    for (size_t i = 1; i < lane_centers_y.size(); ++i) {
        if (!(lane_centers_y[i] > lane_centers_y[i - 1])) return fail("lane_centers_y must be strictly increasing");
    }
    for (size_t i = 0; i < lane_direction.size(); ++i) {
        if (lane_direction[i] != 1 && lane_direction[i] != -1) return fail("lane_direction entries must be +1 or -1");
        bool below = lane_centers_y[i] < divider_y;
        // one direction per side of the divider, opposite directions across it
        for (size_t k = 0; k < i; ++k) {
            bool below_k = lane_centers_y[k] < divider_y;
            if (below == below_k && lane_direction[i] != lane_direction[k]) return fail("lanes on one side of the divider must share a direction");
            if (below != below_k && lane_direction[i] == lane_direction[k]) return fail("lanes across the divider must travel in opposite directions");
        }
    }
    return true;
}

MapSpec MapSpec::default_two_way() {
    MapSpec m;
    m.x_min = 0.0;
    m.x_max = 400.0;
    m.lane_centers_y = {-6.0, -2.0, 2.0, 6.0};
    m.divider_y = 0.0;
    m.block_length = 5.0;
    m.lane_direction = {1, 1, -1, -1};
    m.lane_width = 4.0;
    return m;
}

BlockIndexer::BlockIndexer(const MapSpec& map) : map_(map) {
    std::string why;
    if (!map_.validate(&why)) throw std::invalid_argument("invalid MapSpec: " + why);
    blocks_ = int(std::floor((map_.x_max - map_.x_min) / map_.block_length + 1e-9));
    if (blocks_ < 1) blocks_ = 1;
}

int BlockIndexer::block_of(double x, bool* clamped) const {
    if (clamped) *clamped = false;
    int b = int(std::floor((x - map_.x_min) / map_.block_length));
    if (b < 0) {
        b = 0;
        if (clamped) *clamped = true;
    } else if (b >= blocks_) {
        b = blocks_ - 1;
        if (clamped) *clamped = true;
    }
    return b;
}

Vec2 BlockIndexer::node_coord(int block, int lane) const {
    return {map_.x_min + (double(block) + 0.5) * map_.block_length, map_.lane_centers_y[lane]};
}

int BlockIndexer::nearest_lane(double y) const {
    int best = 0;
    double best_d = std::abs(y - map_.lane_centers_y[0]);
    for (int i = 1; i < map_.lane_count(); ++i) {
        double d = std::abs(y - map_.lane_centers_y[i]);
        if (d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

LaneTuple BlockIndexer::lane_nodes_for(const Vec2& position) const {
    LaneTuple out;
    int lane = nearest_lane(position.y);
    int dir = map_.lane_direction[lane];
    int block = block_of(position.x);
    int front_block = block + dir;
    if (front_block < 0 || front_block >= blocks_) {
        // end of road in the travel direction: no permissible next node
        return out;
    }
    out.node[kLaneFront] = node_coord(front_block, lane);
    out.mask[kLaneFront] = true;

    // Driver-left is +y when traveling +x and -y when traveling -x; slots
    // crossing the divider or leaving the lane list stay masked.
    auto same_side = [&](int a, int b) {
        return (map_.lane_centers_y[a] < map_.divider_y) == (map_.lane_centers_y[b] < map_.divider_y);
    };
    int left_lane = lane + dir;
    if (left_lane >= 0 && left_lane < map_.lane_count() && same_side(lane, left_lane)) {
        out.node[kLaneLeft] = node_coord(front_block, left_lane);
        out.mask[kLaneLeft] = true;
    }
    int right_lane = lane - dir;
    if (right_lane >= 0 && right_lane < map_.lane_count() && same_side(lane, right_lane)) {
        out.node[kLaneRight] = node_coord(front_block, right_lane);
        out.mask[kLaneRight] = true;
    }
    return out;
}

}  // namespace saber
