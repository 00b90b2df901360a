#include "saber/scoring.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "saber/hashing.hpp"

namespace saber {

WindowErrors window_pred_errors(const Model& model, const Window& w, int mc_samples, uint64_t seed) {
    const bool recon = model.config().scores_reconstruction();
    const int steps = w.length - 1;
    const int n_veh = w.scene->n_vehicles;

    WindowErrors out;
    out.start = w.start;
    out.target_offset = recon ? 0 : 1;
    out.err.assign(n_veh, std::vector<double>(steps, 0.0));
    out.has.assign(n_veh, std::vector<uint8_t>(steps, 0));

    const int draws = (mc_samples > 0 && model.config().stochastic()) ? mc_samples : 0;
    const int passes = draws > 0 ? draws : 1;
    WindowRun run;
    for (int s = 0; s < passes; ++s) {
        if (draws > 0) {
            Rng eps(mix_seed(seed, uint64_t(s)));
            model.run_window(w, &eps, run);
        } else {
            model.run_window(w, nullptr, run);
        }
        for (int v = 0; v < n_veh; ++v) {
            for (int k = 0; k < steps; ++k) {
                const LatentStep& st = run.v[v][k];
                if (recon) {
                    if (st.active) {
                        out.err[v][k] += st.rec_err;
                        out.has[v][k] = 1;
                    }
                } else if (st.pred_active) {
                    out.err[v][k] += st.pred_err;
                    out.has[v][k] = 1;
                }
            }
        }
    }
    if (passes > 1) {
        for (auto& row : out.err) {
            for (double& e : row) e /= double(passes);
        }
    }
    return out;
}

WindowErrors window_cvm_errors(const Window& w) {
    const int steps = w.length - 1;
    const int n_veh = w.scene->n_vehicles;
    WindowErrors out;
    out.start = w.start;
    out.target_offset = 1;
    out.err.assign(n_veh, std::vector<double>(steps, 0.0));
    out.has.assign(n_veh, std::vector<uint8_t>(steps, 0));
    for (int v = 0; v < n_veh; ++v) {
        const auto& seq = w.scene->veh[v];
        for (int k = 0; k < steps; ++k) {
            const ObsStep& cur = seq[w.start + k];
            const ObsStep& next = seq[w.start + k + 1];
            if (!cur.valid || !next.valid) continue;  // missing history: unscored
            out.err[v][k] = (next.dx - cur.dx).norm();
            out.has[v][k] = 1;
        }
    }
    return out;
}

OverlapAverage average_overlaps(const std::vector<WindowErrors>& windows, int n_veh, int obs_len) {
    OverlapAverage avg;
    avg.veh_err.assign(n_veh, std::vector<double>(obs_len, 0.0));
    avg.coverage.assign(n_veh, std::vector<int>(obs_len, 0));
    for (const auto& we : windows) {
        for (int v = 0; v < n_veh; ++v) {
            for (size_t i = 0; i < we.err[v].size(); ++i) {
                if (!we.has[v][i]) continue;
                int pos = we.start + we.target_offset + int(i);
                avg.veh_err[v][pos] += we.err[v][i];
                avg.coverage[v][pos] += 1;
            }
        }
    }
    for (int v = 0; v < n_veh; ++v) {
        for (int t = 0; t < obs_len; ++t) {
            if (avg.coverage[v][t] > 0) avg.veh_err[v][t] /= double(avg.coverage[v][t]);
        }
    }
    return avg;
}

bool anomaly_score_at(const OverlapAverage& avg, int pos, double* out) {
    bool any = false;
    double best = 0.0;
    for (size_t v = 0; v < avg.veh_err.size(); ++v) {
        if (avg.coverage[v][pos] == 0) continue;
        double e = avg.veh_err[v][pos];
        if (!any || e > best) best = e;
        any = true;
    }
    if (any && out) *out = best;
    return any;
}

ScoreSeries score_scene(const Model* model, const SceneObservations& obs, const ScoreSettings& st) {
    ScoreSeries out;
    out.scene_id = obs.scene_id;
    out.anomaly_type = obs.anomaly_type;
    out.n_vehicles = obs.n_vehicles;
    out.length = int(obs.labels.size());
    out.labels = obs.labels;
    out.as.assign(out.length, 0.0);
    out.scored.assign(out.length, 0);
    out.veh_err.assign(obs.n_vehicles, std::vector<double>(out.length, 0.0));
    out.coverage.assign(obs.n_vehicles, std::vector<int>(out.length, 0));

    auto ws = make_windows(obs, st.window_len, st.stride, nullptr);
    std::vector<WindowErrors> errors;
    errors.reserve(ws.size());
    for (const auto& w : ws) {
        if (model) {
            uint64_t wseed = mix_seed(st.seed, fnv1a64(obs.scene_id), uint64_t(w.start));
            errors.push_back(window_pred_errors(*model, w, st.mc_samples, wseed));
        } else {
            errors.push_back(window_cvm_errors(w));
        }
    }
    OverlapAverage avg = average_overlaps(errors, obs.n_vehicles, obs.obs_len);

    int first_scored = -1;
    for (int t = 0; t < out.length; ++t) {
        int pos = t - 1;  // observation index of scene time t
        if (pos < 0 || pos >= obs.obs_len) continue;
        double v = 0.0;
        if (anomaly_score_at(avg, pos, &v)) {
            out.as[t] = v;
            out.scored[t] = 1;
            if (first_scored < 0) first_scored = t;
        }
        for (int veh = 0; veh < obs.n_vehicles; ++veh) {
            out.veh_err[veh][t] = avg.veh_err[veh][pos];
            out.coverage[veh][t] = avg.coverage[veh][pos];
        }
    }
    // unscored steps report the nearest scored value (earliest for the
    // leading edge) purely for plotting; they stay excluded from metrics
    if (first_scored >= 0) {
        for (int t = 0; t < first_scored; ++t) out.as[t] = out.as[first_scored];
        for (int t = first_scored + 1; t < out.length; ++t) {
            if (!out.scored[t]) out.as[t] = out.as[t - 1];
        }
    }
    return out;
}

std::vector<ScoreSeries> score_scenes(const Model* model, const std::vector<SceneObservations>& scenes,
                                      const ScoreSettings& st) {
    std::vector<ScoreSeries> out(scenes.size());
    parallel_for(int(scenes.size()), st.mode, [&](int i) { out[i] = score_scene(model, scenes[i], st); });
    return out;
}

void save_score_series(const ScoreSeries& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "# scene_id=" << s.scene_id << "\tanomaly_type=" << s.anomaly_type << "\tvehicles=" << s.n_vehicles
        << '\n';
    out << "t\tas\tlabel\tscored\n";
    char buf[64];
    for (int t = 0; t < s.length; ++t) {
        std::snprintf(buf, sizeof(buf), "%.17g", s.as[t]);
        out << t << '\t' << buf << '\t' << label_char(s.labels[t]) << '\t' << int(s.scored[t]) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

ScoreSeries load_score_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open score file '" + path + "'");
    ScoreSeries s;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# scene_id=", 0) != 0) {
        throw std::runtime_error("'" + path + "' is not a score series file");
    }
    {
        std::istringstream hdr(line.substr(2));
        std::string field;
        while (std::getline(hdr, field, '\t')) {
            auto eq = field.find('=');
            if (eq == std::string::npos) continue;
            std::string key = field.substr(0, eq), val = field.substr(eq + 1);
            if (key == "scene_id") s.scene_id = val;
            else if (key == "anomaly_type") s.anomaly_type = val;
            else if (key == "vehicles") s.n_vehicles = std::stoi(val);
        }
    }
    std::getline(in, line);  // column header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        int t = 0, scored = 0;
        double as = 0.0;
        char label = 'n';
        row >> t >> as >> label >> scored;
        if (row.fail()) throw std::runtime_error("bad row in '" + path + "': " + line);
        s.as.push_back(as);
        s.labels.push_back(label_from_char(label));
        s.scored.push_back(uint8_t(scored));
    }
    s.length = int(s.as.size());
    return s;
}

}  // namespace saber
