#include <doctest.h>

#include "saber/map.hpp"
#include "saber/rng.hpp"

using namespace saber;

TEST_SUITE("map") {

TEST_CASE("block index from x coordinate") {
    MapSpec m = MapSpec::default_two_way();
    m.x_min = 0.0;
    m.x_max = 50.0;
    BlockIndexer idx(m);
    CHECK(idx.block_of(12.3) == 2);
    CHECK(idx.block_of(0.0) == 0);
    CHECK(idx.block_count() == 10);
}

TEST_CASE("out-of-range x clamps to the boundary block and flags") {
    MapSpec m = MapSpec::default_two_way();
    m.x_min = 0.0;
    m.x_max = 50.0;
    BlockIndexer idx(m);
    bool clamped = false;
    CHECK(idx.block_of(-3.0, &clamped) == 0);
    CHECK(clamped);
    clamped = false;
    CHECK(idx.block_of(50.0, &clamped) == 9);
    CHECK(clamped);
    clamped = false;
    idx.block_of(49.9, &clamped);
    CHECK_FALSE(clamped);
}

TEST_CASE("lane node coordinates are block centers") {
    MapSpec m = MapSpec::default_two_way();
    BlockIndexer idx(m);
    Vec2 n = idx.node_coord(2, 1);
    CHECK(n.x == doctest::Approx(12.5));
    CHECK(n.y == doctest::Approx(-2.0));
}

TEST_CASE("bottom-most +x lane masks only the right slot") {
    BlockIndexer idx(MapSpec::default_two_way());
    LaneTuple t = idx.lane_nodes_for({20.0, -6.0});
    CHECK(t.mask[kLaneFront]);
    CHECK(t.mask[kLaneLeft]);
    CHECK_FALSE(t.mask[kLaneRight]);
    CHECK(t.node[kLaneFront].x > 20.0);  // +x travel
    CHECK(t.node[kLaneFront].y == doctest::Approx(-6.0));
    CHECK(t.node[kLaneLeft].y == doctest::Approx(-2.0));
}

TEST_CASE("divider-adjacent +x lane masks the left slot") {
    BlockIndexer idx(MapSpec::default_two_way());
    LaneTuple t = idx.lane_nodes_for({20.0, -2.0});
    CHECK(t.mask[kLaneFront]);
    CHECK_FALSE(t.mask[kLaneLeft]);  // across the divider
    CHECK(t.mask[kLaneRight]);
    CHECK(t.node[kLaneRight].y == doctest::Approx(-6.0));
}

TEST_CASE("-x lanes: front decreases in x and left points away from divider") {
    BlockIndexer idx(MapSpec::default_two_way());
    LaneTuple t = idx.lane_nodes_for({20.0, 2.0});
    CHECK(t.mask[kLaneFront]);
    CHECK(t.node[kLaneFront].x < 20.0);
    // traveling -x: driver-left is -y, which crosses the divider here
    CHECK_FALSE(t.mask[kLaneLeft]);
    CHECK(t.mask[kLaneRight]);
    CHECK(t.node[kLaneRight].y == doctest::Approx(6.0));
}

TEST_CASE("single lane per direction masks both side slots") {
    MapSpec m;
    m.x_min = 0.0;
    m.x_max = 100.0;
    m.lane_centers_y = {-2.0, 2.0};
    m.divider_y = 0.0;
    m.lane_direction = {1, -1};
    BlockIndexer idx(m);
    LaneTuple t = idx.lane_nodes_for({50.0, -2.0});
    CHECK(t.mask[kLaneFront]);
    CHECK_FALSE(t.mask[kLaneLeft]);
    CHECK_FALSE(t.mask[kLaneRight]);
}

TEST_CASE("end of road masks the front slot") {
    BlockIndexer idx(MapSpec::default_two_way());
    // +x vehicle in the last block has no next block
    LaneTuple t = idx.lane_nodes_for({399.0, -6.0});
    CHECK_FALSE(t.mask[kLaneFront]);
    CHECK_FALSE(t.mask[kLaneLeft]);
    CHECK_FALSE(t.mask[kLaneRight]);
}

TEST_CASE("nearest lane ties break toward the lower index") {
    BlockIndexer idx(MapSpec::default_two_way());
    CHECK(idx.nearest_lane(-4.0) == 0);  // equidistant from -6 and -2
    CHECK(idx.nearest_lane(0.0) == 1);   // equidistant from -2 and 2
}

TEST_CASE("lane-mask legality over random positions") {
    MapSpec m = MapSpec::default_two_way();
    BlockIndexer idx(m);
    Rng rng(99);
    for (int i = 0; i < 2000; ++i) {
        Vec2 pos{rng.uniform(-20.0, 420.0), rng.uniform(-30.0, 30.0)};
        LaneTuple t = idx.lane_nodes_for(pos);
        int own = idx.nearest_lane(pos.y);
        bool own_below = m.lane_centers_y[own] < m.divider_y;
        for (int s = 0; s < 3; ++s) {
            if (!t.mask[s]) continue;
            // every referenced node lies in a listed lane on the same side
            int lane = -1;
            for (int l = 0; l < m.lane_count(); ++l) {
                if (t.node[s].y == m.lane_centers_y[l]) lane = l;
            }
            REQUIRE(lane >= 0);
            CHECK((m.lane_centers_y[lane] < m.divider_y) == own_below);
            CHECK(t.node[s].x >= m.x_min);
            CHECK(t.node[s].x <= m.x_max);
        }
    }
}

}  // TEST_SUITE
