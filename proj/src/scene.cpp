#include "saber/scene.hpp"

#include <stdexcept>

namespace saber {

bool Scene::validate(std::string* why) const {
    auto fail = [&](const std::string& m) {
        if (why) *why = "scene '" + scene_id + "': " + m;
        return false;
    };
    if (!map.validate(why)) return false;
    if (vehicles.empty()) return fail("no vehicles");
    int T = length();
    if (int(labels.size()) != T) return fail("labels length must equal trajectory length");
    for (size_t v = 0; v < vehicles.size(); ++v) {
        const auto& vt = vehicles[v];
        if (int(vt.pos.size()) != T || int(vt.present.size()) != T) return fail("vehicle arrays must all have length T");
        for (int t = 0; t < T; ++t) {
            if (vt.present[t] && !vt.pos[t].finite()) return fail("non-finite position at vehicle " + std::to_string(v) + " t=" + std::to_string(t));
        }
    }
    return true;
}

SceneObservations build_observations(const Scene& scene, double neighbor_radius) {
    std::string why;
    if (!scene.validate(&why)) throw std::invalid_argument(why);
    if (scene.length() < 2) throw std::invalid_argument("scene '" + scene.scene_id + "' needs at least 2 timesteps");
    if (!(neighbor_radius > 0.0)) throw std::invalid_argument("neighbor radius must be > 0");

    const int T = scene.length();
    const int n = scene.vehicle_count();
    BlockIndexer indexer(scene.map);

    SceneObservations out;
    out.scene_id = scene.scene_id;
    out.anomaly_type = scene.anomaly_type;
    out.labels = scene.labels;
    out.n_vehicles = n;
    out.obs_len = T - 1;
    out.veh.assign(n, std::vector<ObsStep>(T - 1));

    for (int v = 0; v < n; ++v) {
        const auto& track = scene.vehicles[v];
        for (int i = 0; i < T - 1; ++i) {
            const int t = i + 1;  // scene time of the observation
            ObsStep& step = out.veh[v][i];
            step.nbr.assign(n > 1 ? n - 1 : 0, Vec2{});
            step.nbr_mask.assign(n > 1 ? n - 1 : 0, 0);
            if (!track.present[t] || !track.present[t - 1]) continue;  // presence gap: no displacement
            step.valid = true;
            step.dx = track.pos[t] - track.pos[t - 1];

            LaneTuple lanes = indexer.lane_nodes_for(track.pos[t]);
            for (int s = 0; s < 3; ++s) {
                step.lane.mask[s] = lanes.mask[s];
                if (lanes.mask[s]) step.lane.disp[s] = lanes.node[s] - track.pos[t];
            }

            int slot = 0;
            for (int u = 0; u < n; ++u) {
                if (u == v) continue;
                const auto& other = scene.vehicles[u];
                if (other.present[t]) {
                    Vec2 rel = other.pos[t] - track.pos[t];
                    if (rel.norm() <= neighbor_radius) {  // inclusive threshold
                        step.nbr[slot] = rel;
                        step.nbr_mask[slot] = 1;
                    }
                }
                ++slot;
            }
        }
    }
    return out;
}

std::vector<int> window_starts(int seq_len, int window_len, int stride) {
    if (window_len < 2) throw std::invalid_argument("window length must be >= 2");
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    std::vector<int> starts;
    for (int s = 0; s + window_len <= seq_len; s += stride) starts.push_back(s);
    return starts;
}

std::vector<Window> make_windows(const SceneObservations& obs, int window_len, int stride, std::vector<WindowingNote>* notes) {
    std::vector<Window> windows;
    auto starts = window_starts(obs.obs_len, window_len, stride);
    if (starts.empty()) {
        if (notes) {
            notes->push_back({obs.scene_id, "sequence of length " + std::to_string(obs.obs_len) +
                                                " is shorter than window length " + std::to_string(window_len) +
                                                "; no windows produced"});
        }
        return windows;
    }
    windows.reserve(starts.size());
    for (int s : starts) windows.push_back(Window{&obs, s, window_len});
    return windows;
}

}  // namespace saber
