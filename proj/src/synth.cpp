#include "saber/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "saber/rng.hpp"

namespace saber {

namespace {

const char* kKindNames[kScenarioKindCount] = {
    "side_by_side", "overtaking", "following", "opposite_directions",
    "aggressive_overtaking", "pushing_aside", "tailgating", "off_road",
    "wrong_way", "skidding", "left_spreading", "right_spreading", "reeving",
};

// Clean per-vehicle trajectory before noise.
struct Track {
    std::vector<double> x, y;  // length T
};

double smoothstep(double u) {
    u = std::clamp(u, 0.0, 1.0);
    return u * u * (3.0 - 2.0 * u);
}

// Speeds and offsets are drawn on a 1/64 m grid so that noise-free
// constant-velocity trajectories accumulate exactly in floating point.
double dyadic(Rng& rng, double lo, double hi) {
    double v = rng.uniform(lo, hi);
    return std::round(v * 64.0) / 64.0;
}

struct Builder {
    const MapSpec& map;
    Rng& rng;
    int T;

    std::vector<int> lanes_of_dir(int dir) const {
        std::vector<int> out;
        for (int i = 0; i < map.lane_count(); ++i) {
            if (map.lane_direction[i] == dir) out.push_back(i);
        }
        return out;
    }

    double center(int lane) const { return map.lane_centers_y[lane]; }

    // outermost lane of a side = farthest from the divider
    int outer_lane(int dir) const {
        auto ls = lanes_of_dir(dir);
        int best = ls[0];
        for (int l : ls) {
            if (std::abs(center(l) - map.divider_y) > std::abs(center(best) - map.divider_y)) best = l;
        }
        return best;
    }

    int inner_lane(int dir) const {
        auto ls = lanes_of_dir(dir);
        int best = ls[0];
        for (int l : ls) {
            if (std::abs(center(l) - map.divider_y) < std::abs(center(best) - map.divider_y)) best = l;
        }
        return best;
    }

    double pick_start_x(int dir, double max_speed, double margin = 8.0) {
        double travel = max_speed * double(T - 1);
        double lo, hi;
        if (dir > 0) {
            lo = map.x_min + margin;
            hi = std::max(lo, map.x_max - margin - travel);
        } else {
            hi = map.x_max - margin;
            lo = std::min(hi, map.x_min + margin + travel);
        }
        return dyadic(rng, lo, hi);
    }

    // constant velocity track
    Track cruise(double x0, double y0, double vx) const {
        Track t;
        t.x.resize(T);
        t.y.assign(T, y0);
        t.x[0] = x0;
        for (int i = 1; i < T; ++i) t.x[i] = t.x[i - 1] + vx;
        return t;
    }

    // integrate a per-step velocity profile (length T-1)
    Track integrate(double x0, double y0, const std::vector<double>& vx) const {
        Track t;
        t.x.resize(T);
        t.y.assign(T, y0);
        t.x[0] = x0;
        for (int i = 1; i < T; ++i) t.x[i] = t.x[i - 1] + vx[i - 1];
        return t;
    }

    // smoothstep lateral move from y(start of t0) to y1 over n steps
    static void lane_move(Track& t, int t0, int n, double y1) {
        int T = int(t.y.size());
        double y0 = t.y[std::min(t0, T - 1)];
        for (int i = t0; i < T; ++i) {
            double u = n > 0 ? double(i - t0) / double(n) : 1.0;
            t.y[i] = y0 + (y1 - y0) * smoothstep(u);
        }
    }
};

struct Built {
    std::vector<Track> tracks;
    int aw0 = -1, aw1 = -1;  // abnormal [aw0, aw1)
};

Built build_side_by_side(Builder& b) {
    int dir = b.rng.uniform_int(0, 1) ? 1 : -1;
    auto lanes = b.lanes_of_dir(dir);
    if (lanes.size() < 2) throw std::invalid_argument("side_by_side needs two lanes per direction");
    double v = dyadic(b.rng, 2.25, 2.75);
    double x0 = b.pick_start_x(dir, v);
    double off = dyadic(b.rng, -3.0, 3.0);
    Built out;
    out.tracks.push_back(b.cruise(x0, b.center(lanes[0]), dir * v));
    out.tracks.push_back(b.cruise(x0 + off, b.center(lanes[1]), dir * v));
    return out;
}

Built build_following(Builder& b) {
    int dir = b.rng.uniform_int(0, 1) ? 1 : -1;
    auto lanes = b.lanes_of_dir(dir);
    int lane = lanes[b.rng.uniform_int(0, int(lanes.size()) - 1)];
    double v = dyadic(b.rng, 2.25, 2.75);
    double gap = dyadic(b.rng, 12.0, 22.0);
    double x0 = b.pick_start_x(dir, v, 8.0 + gap);
    Built out;
    out.tracks.push_back(b.cruise(x0, b.center(lane), dir * v));            // follower
    out.tracks.push_back(b.cruise(x0 + dir * gap, b.center(lane), dir * v));  // leader
    return out;
}

Built build_opposite(Builder& b) {
    auto plus = b.lanes_of_dir(1);
    auto minus = b.lanes_of_dir(-1);
    if (plus.empty() || minus.empty()) throw std::invalid_argument("opposite_directions needs lanes both ways");
    int lp = plus[b.rng.uniform_int(0, int(plus.size()) - 1)];
    int lm = minus[b.rng.uniform_int(0, int(minus.size()) - 1)];
    double v0 = dyadic(b.rng, 2.25, 2.75);
    double v1 = dyadic(b.rng, 2.25, 2.75);
    double cx = 0.5 * (b.map.x_min + b.map.x_max);
    double mid = dyadic(b.rng, cx - 20.0, cx + 20.0);
    double half = double(b.T) / 2.0;
    double x0 = std::max(b.map.x_min + 8.0, mid - v0 * half);
    double x1 = std::min(b.map.x_max - 8.0, mid + v1 * half);
    Built out;
    out.tracks.push_back(b.cruise(x0, b.center(lp), v0));
    out.tracks.push_back(b.cruise(x1, b.center(lm), -v1));
    return out;
}

// shared by normal and aggressive overtaking
Built build_overtake(Builder& b, bool aggressive) {
    int dir = b.rng.uniform_int(0, 1) ? 1 : -1;
    int slow_lane = b.outer_lane(dir);
    int pass_lane = b.inner_lane(dir);
    if (slow_lane == pass_lane) throw std::invalid_argument("overtaking needs two lanes per direction");
    const int T = b.T;

    double v_slow = dyadic(b.rng, 2.0, 2.375);
    double dv = aggressive ? dyadic(b.rng, 1.25, 1.5) : dyadic(b.rng, 0.5, 0.75);
    int change_steps = aggressive ? 3 : 8;

    // schedule first, then derive the approach gap from it
    int t_out = std::clamp(int(std::lround(0.3 * T)), 3, std::max(3, T - 2 * change_steps - 8));
    double ahead = aggressive ? 4.0 : 9.0;  // pull back in at this lead
    int t_back = t_out + std::max(change_steps + 2, int(std::ceil((10.0 + ahead) / dv)));
    t_back = std::clamp(t_back, t_out + change_steps, std::max(t_out + change_steps, T - change_steps - 2));

    double gap0 = 10.0 + (aggressive ? 0.5 : dv) * double(t_out);  // rel = -10 m at t_out

    double x_slow = b.pick_start_x(dir, v_slow + dv, 10.0 + gap0);
    Built out;
    out.tracks.push_back(Track{});  // overtaker, filled below
    out.tracks.push_back(b.cruise(x_slow, b.center(slow_lane), dir * v_slow));

    std::vector<double> vx(T - 1, dir * (v_slow + dv));
    if (aggressive) {
        // approach at a mild closing speed, surge only during the maneuver
        for (int t = 0; t < T - 1; ++t) {
            bool fast = t >= t_out - 1 && t < t_back + change_steps;
            vx[t] = dir * (v_slow + (fast ? dv : 0.5));
        }
    }
    Track fast = b.integrate(x_slow - dir * gap0, b.center(slow_lane), vx);
    Builder::lane_move(fast, t_out, change_steps, b.center(pass_lane));
    Builder::lane_move(fast, t_back, change_steps, b.center(slow_lane));
    out.tracks[0] = fast;
    if (aggressive) {
        out.aw0 = t_out - 1;
        out.aw1 = std::min(T, t_back + change_steps + 1);
    }
    return out;
}

Built build_pushing_aside(Builder& b, int aw0, int aw1) {
    int dir = b.rng.uniform_int(0, 1) ? 1 : -1;
    int victim_lane = b.outer_lane(dir);
    int agg_lane = b.inner_lane(dir);
    if (victim_lane == agg_lane) throw std::invalid_argument("pushing_aside needs two lanes per direction");
    double v = dyadic(b.rng, 2.25, 2.625);
    double x0 = b.pick_start_x(dir, v, 12.0);

    double vc = b.center(victim_lane);
    double ac = b.center(agg_lane);
    double toward = vc > ac ? 1.0 : -1.0;  // aggressor drift direction

    Track agg = b.cruise(x0, ac, dir * v);
    Builder::lane_move(agg, aw0, 4, ac + toward * 2.5);            // invade half a lane past the boundary
    Builder::lane_move(agg, std::max(aw0 + 4, aw1 - 4), 4, ac);    // retreat

    Track victim = b.cruise(x0 + dir * 3.0, vc, dir * v);
    Builder::lane_move(victim, aw0 + 2, 4, vc + toward * 2.5);     // pushed past the lane edge
    Builder::lane_move(victim, std::max(aw0 + 6, aw1 - 4), 4, vc);

    Built out;
    out.tracks = {agg, victim};
    out.aw0 = aw0;
    out.aw1 = aw1;
    return out;
}

Built build_tailgating(Builder& b, int aw0, int aw1) {
    int dir = b.rng.uniform_int(0, 1) ? 1 : -1;
    auto lanes = b.lanes_of_dir(dir);
    int lane = lanes[b.rng.uniform_int(0, int(lanes.size()) - 1)];
    double v = dyadic(b.rng, 2.25, 2.625);
    const int T = b.T;

    // close from gap0 to 4 m by aw0, hold, release after aw1
    double close_rate = 0.5;
    double gap0 = 4.0 + close_rate * double(aw0);
    double x0 = b.pick_start_x(dir, v + close_rate, 10.0 + gap0);

    Built out;
    out.tracks.push_back(Track{});
    out.tracks.push_back(b.cruise(x0 + dir * gap0, b.center(lane), dir * v));  // leader

    std::vector<double> vx(T - 1, dir * v);
    for (int t = 0; t < T - 1; ++t) {
        if (t < aw0) vx[t] = dir * (v + close_rate);
        else if (t >= aw1 && t < aw1 + 8) vx[t] = dir * (v - close_rate);
    }
    out.tracks[0] = b.integrate(x0, b.center(lane), vx);
    out.aw0 = aw0;
    out.aw1 = aw1;
    return out;
}

Built build_off_road(Builder& b, int aw0, int aw1) {
    int dir = b.rng.uniform_int(0, 1) ? 1 : -1;
    int lane = b.outer_lane(dir);
    double c = b.center(lane);
    double edge_sign = c < b.map.divider_y ? -1.0 : 1.0;  // away from the road
    double v = dyadic(b.rng, 2.25, 2.625);
    double x0 = b.pick_start_x(dir, v);

    Track t = b.cruise(x0, c, dir * v);
    double off_y = c + edge_sign * (0.5 * b.map.lane_width + 3.5);
    Builder::lane_move(t, aw0, 6, off_y);
    Builder::lane_move(t, std::max(aw0 + 6, aw1 - 6), 6, c);

    Built out;
    out.tracks.push_back(t);
    out.aw0 = aw0;
    out.aw1 = aw1;
    return out;
}

Built build_wrong_way(Builder& b, int aw0) {
    int dir = b.rng.uniform_int(0, 1) ? 1 : -1;
    auto lanes = b.lanes_of_dir(dir);
    int lane = lanes[b.rng.uniform_int(0, int(lanes.size()) - 1)];
    const int T = b.T;
    aw0 = std::clamp(aw0, 2, std::max(2, T - 17));

    double v = dyadic(b.rng, 2.25, 2.625);
    double v_back = dyadic(b.rng, 2.25, 2.625);
    // keep the reversal inside the road for either direction
    double x0 = dir > 0 ? dyadic(b.rng, b.map.x_min + 15.0, std::max(b.map.x_min + 15.0, b.map.x_max - 20.0 - v * aw0))
                        : dyadic(b.rng, std::min(b.map.x_max - 15.0, b.map.x_min + 20.0 + v * aw0), b.map.x_max - 15.0);

    std::vector<double> vx(T - 1, 0.0);
    std::vector<double> wig(T - 1, 0.0);
    for (int t = 0; t < T - 1; ++t) {
        if (t < aw0) {
            vx[t] = dir * v;
        } else if (t < aw0 + 6) {
            int k = t - aw0;                        // hard braking with shudder
            vx[t] = dir * v * (5.0 - k) / 6.0;
            wig[t] = (k % 2 == 0 ? 0.45 : -0.45);
        } else if (t < aw0 + 12) {
            int k = t - aw0 - 6;                    // accelerate the wrong way
            vx[t] = -dir * v_back * (k + 1) / 6.0;
            wig[t] = (k % 2 == 0 ? 0.3 : -0.3);
        } else {
            // erratic wrong-way cruise: speed and heading jitter every step
            int k = t - aw0 - 12;
            vx[t] = -dir * v_back + (k % 2 == 0 ? 0.5 : -0.5);
            wig[t] = (k % 2 == 0 ? 0.25 : -0.25);
        }
    }
    Track t = b.integrate(x0, b.center(lane), vx);
    for (int i = 1; i < T; ++i) t.y[i] = t.y[i - 1] + wig[i - 1];

    Built out;
    out.tracks.push_back(t);
    out.aw0 = aw0;
    out.aw1 = T;
    return out;
}

Built build_skidding(Builder& b, int aw0, int aw1) {
    int dir = b.rng.uniform_int(0, 1) ? 1 : -1;
    auto lanes = b.lanes_of_dir(dir);
    int lane = lanes[b.rng.uniform_int(0, int(lanes.size()) - 1)];
    double v = dyadic(b.rng, 2.25, 2.625);
    double x0 = b.pick_start_x(dir, v);
    double amp = 1.1 + 0.3 * b.rng.uniform();
    const double period = 6.0;

    Track t = b.cruise(x0, b.center(lane), dir * v);
    for (int i = aw0; i < std::min(aw1, b.T); ++i) {
        t.y[i] = b.center(lane) + amp * std::sin(2.0 * M_PI * double(i - aw0) / period);
    }
    // settle back to the lane center
    for (int i = std::min(aw1, b.T); i < std::min(aw1 + 3, b.T); ++i) {
        double u = double(i - aw1 + 1) / 3.0;
        t.y[i] = t.y[std::min(aw1, b.T) - 1] * (1.0 - u) + b.center(lane) * u;
    }

    Built out;
    out.tracks.push_back(t);
    out.aw0 = aw0;
    out.aw1 = aw1;
    return out;
}

Built build_spreading(Builder& b, int aw0, bool left) {
    int dir = b.rng.uniform_int(0, 1) ? 1 : -1;
    // left drift starts next to the divider and crosses it; right drift
    // starts in the outer lane and leaves the road
    int lane = left ? b.inner_lane(dir) : b.outer_lane(dir);
    double sign = left ? double(dir) : -double(dir);  // driver-left is +y when traveling +x
    double v = dyadic(b.rng, 2.25, 2.625);
    double x0 = b.pick_start_x(dir, v);
    double total = left ? 4.2 : 0.5 * b.map.lane_width + 1.5;
    int span = std::max(6, int(std::lround(0.35 * b.T)));

    Track t = b.cruise(x0, b.center(lane), dir * v);
    for (int i = aw0; i < b.T; ++i) {
        double u = double(i - aw0) / double(span);
        t.y[i] = b.center(lane) + sign * total * smoothstep(u);
    }

    Built out;
    out.tracks.push_back(t);
    out.aw0 = aw0;
    out.aw1 = b.T;
    return out;
}

Built build_reeving(Builder& b, int aw0) {
    int dir = b.rng.uniform_int(0, 1) ? 1 : -1;
    int lane_a = b.outer_lane(dir);
    int lane_b = b.inner_lane(dir);
    if (lane_a == lane_b) throw std::invalid_argument("reeving needs two lanes per direction");
    double v = dyadic(b.rng, 2.5, 2.875);
    double x0 = b.pick_start_x(dir, v, 14.0);

    Track t = b.cruise(x0, b.center(lane_a), dir * v);
    int step = aw0;
    double targets[3] = {b.center(lane_b), b.center(lane_a), b.center(lane_b)};
    for (int c = 0; c < 3 && step + 4 < b.T; ++c) {
        Builder::lane_move(t, step, 4, targets[c]);
        step += 6;
    }
    Built out;
    out.tracks.push_back(t);
    // a slower car ahead in the original lane that the weaver slaloms around
    double v_ahead = std::max(2.0, v - 0.5);
    out.tracks.push_back(b.cruise(x0 + dir * 14.0, b.center(lane_a), dir * v_ahead));
    out.aw0 = aw0;
    out.aw1 = std::min(b.T, step);
    return out;
}

// normal cruiser used as the second vehicle in single-actor scenarios
Track companion_cruiser(Builder& b, const Track& actor) {
    int dir = b.rng.uniform_int(0, 1) ? 1 : -1;
    auto lanes = b.lanes_of_dir(dir);
    int lane = lanes[b.rng.uniform_int(0, int(lanes.size()) - 1)];
    double v = dyadic(b.rng, 2.25, 2.75);
    double x0 = b.pick_start_x(dir, v);
    // avoid spawning on top of the actor
    if (std::abs(x0 - actor.x[0]) < 12.0 && std::abs(b.center(lane) - actor.y[0]) < 3.0) {
        x0 = std::min(b.map.x_max - 10.0, x0 + 25.0);
    }
    return b.cruise(x0, b.center(lane), dir * v);
}

}  // namespace

const char* kind_name(ScenarioKind k) { return kKindNames[int(k)]; }

ScenarioKind kind_from_name(const std::string& name) {
    for (int i = 0; i < kScenarioKindCount; ++i) {
        if (name == kKindNames[i]) return ScenarioKind(i);
    }
    throw std::invalid_argument("unknown scenario kind '" + name + "'");
}

bool kind_is_anomalous(ScenarioKind k) { return int(k) >= int(ScenarioKind::AggressiveOvertaking); }

Scene generate(const ScenarioSpec& spec, const MapSpec& map) {
    std::string why;
    if (!map.validate(&why)) throw std::invalid_argument("invalid MapSpec: " + why);
    if (spec.duration < 16) throw std::invalid_argument("scenario duration must be >= 16 timesteps");
    if (spec.vehicle_count < 2) throw std::invalid_argument("scenario needs at least 2 vehicles");
    const int T = spec.duration;
    if (spec.anomaly_start >= 0 || spec.anomaly_end >= 0) {
        if (!kind_is_anomalous(spec.kind)) throw std::invalid_argument("anomaly_window given for a normal kind");
        if (spec.anomaly_start < 0 || spec.anomaly_end > T || spec.anomaly_start >= spec.anomaly_end) {
            throw std::invalid_argument("anomaly_window must satisfy 0 <= start < end <= duration");
        }
    }

    Rng rng(mix_seed(spec.seed, uint64_t(spec.kind), uint64_t(T)));
    Builder b{map, rng, T};

    int aw0 = spec.anomaly_start >= 0 ? spec.anomaly_start : int(std::lround(0.45 * T));
    int aw1 = spec.anomaly_end >= 0 ? spec.anomaly_end : int(std::lround(0.85 * T));

    Built built;
    switch (spec.kind) {
        case ScenarioKind::SideBySide: built = build_side_by_side(b); break;
        case ScenarioKind::Following: built = build_following(b); break;
        case ScenarioKind::Overtaking: built = build_overtake(b, false); break;
        case ScenarioKind::OppositeDirections: built = build_opposite(b); break;
        case ScenarioKind::AggressiveOvertaking: built = build_overtake(b, true); break;
        case ScenarioKind::PushingAside: built = build_pushing_aside(b, aw0, aw1); break;
        case ScenarioKind::Tailgating: built = build_tailgating(b, aw0, aw1); break;
        case ScenarioKind::OffRoad: built = build_off_road(b, aw0, aw1); break;
        case ScenarioKind::WrongWay: built = build_wrong_way(b, aw0); break;
        case ScenarioKind::Skidding: built = build_skidding(b, aw0, aw1); break;
        case ScenarioKind::LeftSpreading: built = build_spreading(b, aw0, true); break;
        case ScenarioKind::RightSpreading: built = build_spreading(b, aw0, false); break;
        case ScenarioKind::Reeving: built = build_reeving(b, aw0); break;
    }
    if (spec.anomaly_start >= 0) built.aw0 = spec.anomaly_start;
    if (spec.anomaly_end >= 0) built.aw1 = spec.anomaly_end;

    while (int(built.tracks.size()) < spec.vehicle_count) {
        built.tracks.push_back(companion_cruiser(b, built.tracks[0]));
    }

    Scene scene;
    scene.scene_id = spec.scene_id.empty() ? std::string(kind_name(spec.kind)) + "_" + std::to_string(spec.seed) : spec.scene_id;
    scene.dt = 0.1;
    scene.map = map;
    scene.anomaly_type = kind_is_anomalous(spec.kind) ? kind_name(spec.kind) : "";
    scene.labels.assign(T, Label::Normal);
    if (kind_is_anomalous(spec.kind)) {
        int s = std::clamp(built.aw0, 0, T);
        int e = std::clamp(built.aw1, s, T);
        for (int t = s; t < e; ++t) scene.labels[t] = Label::Abnormal;
        for (int w = 1; w <= spec.ignored_margin; ++w) {
            if (s - w >= 0) scene.labels[s - w] = Label::Ignored;
            if (e + w - 1 < T && scene.labels[e + w - 1] == Label::Normal) scene.labels[e + w - 1] = Label::Ignored;
        }
    }

    for (const Track& tr : built.tracks) {
        VehicleTrack v;
        v.present.assign(T, 1);
        v.pos.resize(T);
        for (int t = 0; t < T; ++t) v.pos[t] = {tr.x[t], tr.y[t]};
        scene.vehicles.push_back(std::move(v));
    }
    // position noise after scripting; draw order is (vehicle, t, x then y)
    if (spec.noise_std > 0.0) {
        for (auto& v : scene.vehicles) {
            for (int t = 0; t < T; ++t) {
                v.pos[t].x += spec.noise_std * rng.gaussian();
                v.pos[t].y += spec.noise_std * rng.gaussian();
            }
        }
    }
    return scene;
}

DatasetSpec DatasetSpec::defaults() {
    DatasetSpec d;
    d.train_counts = {
        {ScenarioKind::SideBySide, 20},
        {ScenarioKind::Overtaking, 20},
        {ScenarioKind::Following, 20},
        {ScenarioKind::OppositeDirections, 20},
    };
    d.test_counts = {
        {ScenarioKind::SideBySide, 6},
        {ScenarioKind::Overtaking, 6},
        {ScenarioKind::Following, 5},
        {ScenarioKind::OppositeDirections, 5},
        {ScenarioKind::AggressiveOvertaking, 5},
        {ScenarioKind::PushingAside, 5},
        {ScenarioKind::Tailgating, 5},
        {ScenarioKind::OffRoad, 5},
        {ScenarioKind::WrongWay, 6},
        {ScenarioKind::Skidding, 5},
        {ScenarioKind::LeftSpreading, 5},
        {ScenarioKind::RightSpreading, 4},
        {ScenarioKind::Reeving, 4},
    };
    return d;
}

Dataset generate_dataset(const DatasetSpec& spec) {
    for (const auto& [kind, count] : spec.train_counts) {
        if (count > 0 && kind_is_anomalous(kind)) {
            throw std::invalid_argument(std::string("anomalous kind '") + kind_name(kind) +
                                        "' requested in the train split");
        }
        if (count < 0) throw std::invalid_argument("negative scene count");
    }
    for (const auto& [kind, count] : spec.test_counts) {
        if (count < 0) throw std::invalid_argument("negative scene count");
    }

    Dataset out;
    auto emit = [&](const std::map<ScenarioKind, int>& counts, const char* split, uint64_t tag,
                    std::vector<Scene>& dst) {
        for (int k = 0; k < kScenarioKindCount; ++k) {
            auto it = counts.find(ScenarioKind(k));
            if (it == counts.end()) continue;
            for (int i = 0; i < it->second; ++i) {
                ScenarioSpec s;
                s.kind = ScenarioKind(k);
                s.seed = mix_seed(spec.master_seed, tag, uint64_t(k), uint64_t(i));
                Rng drng(mix_seed(s.seed, 0x64757261ULL));
                double jitter = 1.0 + spec.duration_jitter * (2.0 * drng.uniform() - 1.0);
                s.duration = std::max(16, int(std::lround(spec.duration * jitter)));
                s.noise_std = spec.noise_std;
                s.ignored_margin = spec.ignored_margin;
                s.scene_id = std::string(split) + "_" + kind_name(s.kind) + "_" + std::to_string(i);
                dst.push_back(generate(s, spec.map));
            }
        }
    };
    emit(spec.train_counts, "train", 0x7261696eULL, out.train);
    emit(spec.test_counts, "test", 0x74657374ULL, out.test);
    return out;
}

}  // namespace saber
