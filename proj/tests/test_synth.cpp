#include <doctest.h>

#include <cmath>

#include "saber/scene.hpp"
#include "saber/synth.hpp"

using namespace saber;

namespace {

const MapSpec kMap = MapSpec::default_two_way();

Scene gen(ScenarioKind kind, uint64_t seed, int T = 48, double noise = 0.05) {
    ScenarioSpec spec;
    spec.kind = kind;
    spec.seed = seed;
    spec.duration = T;
    spec.noise_std = noise;
    return generate(spec, kMap);
}

int lane_direction_at(const MapSpec& m, double y) {
    BlockIndexer idx(m);
    return m.lane_direction[idx.nearest_lane(y)];
}

// at least one abnormal step whose displacement statistics leave the support
// of the normal scripts (per-kind analytic predicate)
bool anomaly_evidence(const Scene& s, ScenarioKind kind) {
    BlockIndexer idx(s.map);
    const double band_lo = s.map.lane_centers_y.front() - 0.5 * s.map.lane_width;
    const double band_hi = s.map.lane_centers_y.back() + 0.5 * s.map.lane_width;
    for (int t = 1; t + 1 < s.length(); ++t) {
        if (s.labels[t] != Label::Abnormal) continue;
        for (const auto& v : s.vehicles) {
            Vec2 dx = v.pos[t] - v.pos[t - 1];
            Vec2 ddx = (v.pos[t + 1] - v.pos[t]) - dx;
            double off_center = 1e9;
            for (double c : s.map.lane_centers_y) off_center = std::min(off_center, std::abs(v.pos[t].y - c));
            switch (kind) {
                case ScenarioKind::WrongWay:
                    if (std::abs(dx.x) > 0.5 && dx.x * lane_direction_at(s.map, v.pos[t].y) < 0.0) return true;
                    break;
                case ScenarioKind::OffRoad:
                    if (v.pos[t].y < band_lo - 1.0 || v.pos[t].y > band_hi + 1.0) return true;
                    break;
                case ScenarioKind::RightSpreading:
                    if (v.pos[t].y < band_lo - 0.5 || v.pos[t].y > band_hi + 0.5) return true;
                    break;
                case ScenarioKind::LeftSpreading: {
                    // ends across the divider while still moving in the old direction
                    int dir = lane_direction_at(s.map, v.pos[t].y);
                    if (std::abs(dx.x) > 1.0 && dx.x * dir < 0.0) return true;
                    break;
                }
                case ScenarioKind::Skidding:
                    if (std::abs(ddx.y) > 0.6) return true;
                    break;
                case ScenarioKind::AggressiveOvertaking:
                    if (std::abs(dx.x) > 3.2 || std::abs(dx.y) > 0.9) return true;
                    break;
                case ScenarioKind::Reeving:
                    if (std::abs(dx.y) > 0.9) return true;
                    break;
                case ScenarioKind::PushingAside:
                    if (off_center > 1.6) return true;
                    break;
                case ScenarioKind::Tailgating: {
                    double gap = (s.vehicles[0].pos[t] - s.vehicles[1].pos[t]).norm();
                    if (gap < 5.5) return true;
                    break;
                }
                default:
                    break;
            }
        }
    }
    return false;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("generation is deterministic in (spec, map)") {
    for (int k = 0; k < kScenarioKindCount; ++k) {
        Scene a = gen(ScenarioKind(k), 42);
        Scene b = gen(ScenarioKind(k), 42);
        REQUIRE(a.length() == b.length());
        for (int v = 0; v < a.vehicle_count(); ++v) {
            for (int t = 0; t < a.length(); ++t) {
                CHECK(a.vehicles[v].pos[t].x == b.vehicles[v].pos[t].x);
                CHECK(a.vehicles[v].pos[t].y == b.vehicles[v].pos[t].y);
            }
        }
    }
}

TEST_CASE("noise-free following is exactly constant velocity and all normal") {
    Scene s = gen(ScenarioKind::Following, 9, 40, 0.0);
    for (const auto& v : s.vehicles) {
        Vec2 step = v.pos[1] - v.pos[0];
        for (int t = 1; t < s.length(); ++t) {
            Vec2 d = v.pos[t] - v.pos[t - 1];
            CHECK(d.x == step.x);  // exact: speeds live on a dyadic grid
            CHECK(d.y == step.y);
        }
    }
    for (Label l : s.labels) CHECK(l == Label::Normal);
    CHECK(s.anomaly_type.empty());
}

TEST_CASE("normal kinds label every step normal") {
    for (ScenarioKind k : {ScenarioKind::SideBySide, ScenarioKind::Overtaking, ScenarioKind::Following,
                           ScenarioKind::OppositeDirections}) {
        Scene s = gen(k, 17);
        for (Label l : s.labels) CHECK(l == Label::Normal);
    }
}

TEST_CASE("anomalous kinds have an abnormal span flanked by ignored steps") {
    for (int k = int(ScenarioKind::AggressiveOvertaking); k < kScenarioKindCount; ++k) {
        Scene s = gen(ScenarioKind(k), 23);
        CHECK(s.anomaly_type == kind_name(ScenarioKind(k)));
        int first = -1, last = -1;
        for (int t = 0; t < s.length(); ++t) {
            if (s.labels[t] == Label::Abnormal) {
                if (first < 0) first = t;
                last = t;
            }
        }
        REQUIRE(first > 0);
        CHECK(s.labels[first - 1] == Label::Ignored);
        if (last + 1 < s.length()) CHECK(s.labels[last + 1] == Label::Ignored);
    }
}

TEST_CASE("wrong-way spans reverse the displacement sign against the lane direction") {
    Scene s = gen(ScenarioKind::WrongWay, 31, 48, 0.0);
    const auto& v = s.vehicles[0];
    int against = 0, total = 0;
    bool tail_ok = true;
    int first_ab = -1;
    for (int t = 1; t < s.length(); ++t) {
        if (s.labels[t] != Label::Abnormal) continue;
        if (first_ab < 0) first_ab = t;
        ++total;
        double dx = (v.pos[t] - v.pos[t - 1]).x;
        int dir = lane_direction_at(s.map, v.pos[t].y);
        if (dx * dir < 0.0) ++against;
        // late in the span the vehicle cruises against the lane direction
        if (t >= first_ab + 14 && dx * dir >= 0.0) tail_ok = false;
    }
    CHECK(total > 10);
    CHECK(against > total / 3);
    CHECK(tail_ok);
}

TEST_CASE("every anomalous kind leaves analytic evidence inside its window") {
    for (int k = int(ScenarioKind::AggressiveOvertaking); k < kScenarioKindCount; ++k) {
        for (uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
            Scene s = gen(ScenarioKind(k), seed, 48, 0.0);
            CAPTURE(kind_name(ScenarioKind(k)));
            CAPTURE(seed);
            CHECK(anomaly_evidence(s, ScenarioKind(k)));
        }
    }
}

TEST_CASE("anomaly windows outside the duration are parameter errors") {
    ScenarioSpec spec;
    spec.kind = ScenarioKind::Skidding;
    spec.duration = 32;
    spec.anomaly_start = 10;
    spec.anomaly_end = 40;
    CHECK_THROWS_AS(generate(spec, kMap), std::invalid_argument);
    spec.anomaly_end = 5;
    CHECK_THROWS_AS(generate(spec, kMap), std::invalid_argument);
}

TEST_CASE("per-step displacements stay bounded by two lane widths") {
    for (int k = 0; k < kScenarioKindCount; ++k) {
        Scene s = gen(ScenarioKind(k), 77, 48, 0.0);
        for (const auto& v : s.vehicles) {
            for (int t = 1; t < s.length(); ++t) {
                CHECK((v.pos[t] - v.pos[t - 1]).norm() <= 2.0 * s.map.lane_width);
            }
        }
    }
}

TEST_CASE("extra vehicles are plain cruisers") {
    ScenarioSpec spec;
    spec.kind = ScenarioKind::Following;
    spec.vehicle_count = 5;
    spec.duration = 30;
    spec.noise_std = 0.0;
    Scene s = generate(spec, kMap);
    REQUIRE(s.vehicle_count() == 5);
    for (int v = 2; v < 5; ++v) {
        Vec2 step = s.vehicles[v].pos[1] - s.vehicles[v].pos[0];
        for (int t = 1; t < s.length(); ++t) {
            CHECK((s.vehicles[v].pos[t] - s.vehicles[v].pos[t - 1]).x == step.x);
        }
    }
}

TEST_CASE("dataset generation splits deterministically and keeps train normal") {
    DatasetSpec spec = DatasetSpec::defaults();
    spec.duration = 32;
    Dataset a = generate_dataset(spec);
    Dataset b = generate_dataset(spec);
    CHECK(a.train.size() == 80);
    CHECK(a.test.size() == 66);
    REQUIRE(a.train.size() == b.train.size());
    for (size_t i = 0; i < a.train.size(); ++i) {
        CHECK(a.train[i].scene_id == b.train[i].scene_id);
        CHECK(a.train[i].vehicles[0].pos[5].x == b.train[i].vehicles[0].pos[5].x);
    }
    for (const auto& s : a.train) {
        for (Label l : s.labels) CHECK(l == Label::Normal);
    }
    bool any_abnormal = false;
    for (const auto& s : a.test) {
        for (Label l : s.labels) any_abnormal = any_abnormal || l == Label::Abnormal;
    }
    CHECK(any_abnormal);
}

TEST_CASE("anomalous kinds in the train split are parameter errors") {
    DatasetSpec spec = DatasetSpec::defaults();
    spec.train_counts[ScenarioKind::WrongWay] = 1;
    CHECK_THROWS_AS(generate_dataset(spec), std::invalid_argument);
}

TEST_CASE("zero counts produce empty splits") {
    DatasetSpec spec;
    spec.train_counts.clear();
    spec.test_counts.clear();
    Dataset ds = generate_dataset(spec);
    CHECK(ds.train.empty());
    CHECK(ds.test.empty());
}

}  // TEST_SUITE
