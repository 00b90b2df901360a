#include "saber/config.hpp"

#include <fstream>
#include <set>

namespace saber {

nlohmann::ordered_json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("unparseable config '" + path + "': " + e.what());
    }
}

void check_keys(const nlohmann::ordered_json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
    if (!j.is_object()) throw ConfigError(ctx + ": expected a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!ok.count(it.key())) throw ConfigError(ctx + ": unknown key '" + it.key() + "'");
    }
}

namespace {

MapSpec parse_map(const nlohmann::ordered_json& j) {
    check_keys(j, {"x_min", "x_max", "lane_centers_y", "divider_y", "block_length", "lane_direction", "lane_width"},
               "map");
    MapSpec m = MapSpec::default_two_way();
    try {
        if (j.contains("x_min")) m.x_min = j.at("x_min").get<double>();
        if (j.contains("x_max")) m.x_max = j.at("x_max").get<double>();
        if (j.contains("lane_centers_y")) m.lane_centers_y = j.at("lane_centers_y").get<std::vector<double>>();
        if (j.contains("divider_y")) m.divider_y = j.at("divider_y").get<double>();
        if (j.contains("block_length")) m.block_length = j.at("block_length").get<double>();
        if (j.contains("lane_direction")) m.lane_direction = j.at("lane_direction").get<std::vector<int>>();
        if (j.contains("lane_width")) m.lane_width = j.at("lane_width").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("map: ") + e.what());
    }
    std::string why;
    if (!m.validate(&why)) throw ConfigError("map: " + why);
    return m;
}

std::map<ScenarioKind, int> parse_counts(const nlohmann::ordered_json& j, const std::string& ctx) {
    std::map<ScenarioKind, int> out;
    if (!j.is_object()) throw ConfigError(ctx + ": expected an object of kind -> count");
    for (auto it = j.begin(); it != j.end(); ++it) {
        ScenarioKind kind;
        try {
            kind = kind_from_name(it.key());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(ctx + ": " + e.what());
        }
        if (!it.value().is_number_integer()) throw ConfigError(ctx + ": count for '" + it.key() + "' must be an integer");
        out[kind] = it.value().get<int>();
    }
    return out;
}

}  // namespace

DatasetSpec parse_gen_config(const nlohmann::ordered_json& j) {
    check_keys(j, {"seed", "duration", "duration_jitter", "noise_std", "ignored_margin", "train", "test", "map"},
               "gen config");
    DatasetSpec spec;
    spec.train_counts.clear();
    spec.test_counts.clear();
    try {
        if (j.contains("seed")) spec.master_seed = j.at("seed").get<uint64_t>();
        if (j.contains("duration")) spec.duration = j.at("duration").get<int>();
        if (j.contains("duration_jitter")) spec.duration_jitter = j.at("duration_jitter").get<double>();
        if (j.contains("noise_std")) spec.noise_std = j.at("noise_std").get<double>();
        if (j.contains("ignored_margin")) spec.ignored_margin = j.at("ignored_margin").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("gen config: ") + e.what());
    }
    if (j.contains("map")) spec.map = parse_map(j.at("map"));
    DatasetSpec defaults = DatasetSpec::defaults();
    spec.train_counts = j.contains("train") ? parse_counts(j.at("train"), "gen config train") : defaults.train_counts;
    spec.test_counts = j.contains("test") ? parse_counts(j.at("test"), "gen config test") : defaults.test_counts;
    if (spec.duration < 16) throw ConfigError("gen config: duration must be >= 16");
    if (spec.noise_std < 0.0) throw ConfigError("gen config: noise_std must be >= 0");
    if (spec.ignored_margin < 0) throw ConfigError("gen config: ignored_margin must be >= 0");
    return spec;
}

TrainConfig parse_train_config(const nlohmann::ordered_json& j) {
    check_keys(j,
               {"variant", "attn_dim", "heads", "latent_dim", "rnn_hidden", "cell", "learning_rate", "batch_size",
                "kl_pred_weight", "kl_recon_weight", "epochs", "neighbor_radius", "window_len", "stride", "seed",
                "grad_clip", "jobs"},
               "train config");
    TrainConfig cfg;
    try {
        if (j.contains("variant")) cfg.model.variant = variant_from_name(j.at("variant").get<std::string>());
        if (j.contains("attn_dim")) cfg.model.attn_dim = j.at("attn_dim").get<int>();
        if (j.contains("heads")) cfg.model.heads = j.at("heads").get<int>();
        if (j.contains("latent_dim")) cfg.model.latent_dim = j.at("latent_dim").get<int>();
        if (j.contains("rnn_hidden")) cfg.model.rnn_hidden = j.at("rnn_hidden").get<int>();
        if (j.contains("cell")) cfg.model.cell = cell_from_name(j.at("cell").get<std::string>());
        if (j.contains("learning_rate")) cfg.learning_rate = j.at("learning_rate").get<double>();
        if (j.contains("batch_size")) cfg.batch_size = j.at("batch_size").get<int>();
        if (j.contains("kl_pred_weight")) cfg.kl_pred_weight = j.at("kl_pred_weight").get<double>();
        if (j.contains("kl_recon_weight")) cfg.kl_recon_weight = j.at("kl_recon_weight").get<double>();
        if (j.contains("epochs")) cfg.epochs = j.at("epochs").get<int>();
        if (j.contains("neighbor_radius")) cfg.neighbor_radius = j.at("neighbor_radius").get<double>();
        if (j.contains("window_len")) cfg.window_len = j.at("window_len").get<int>();
        if (j.contains("stride")) cfg.stride = j.at("stride").get<int>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
        if (j.contains("grad_clip")) cfg.grad_clip = j.at("grad_clip").get<double>();
        if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("train config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("train config: ") + e.what());
    }
    // deterministic variants carry no KL term
    if (!cfg.model.stochastic() && !j.contains("kl_pred_weight") && !j.contains("kl_recon_weight")) {
        cfg.kl_pred_weight = 0.0;
        cfg.kl_recon_weight = 0.0;
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("train config: ") + e.what());
    }
    return cfg;
}

nlohmann::ordered_json gen_config_to_json(const DatasetSpec& spec) {
    nlohmann::ordered_json j;
    j["seed"] = spec.master_seed;
    j["duration"] = spec.duration;
    j["duration_jitter"] = spec.duration_jitter;
    j["noise_std"] = spec.noise_std;
    j["ignored_margin"] = spec.ignored_margin;
    nlohmann::ordered_json train = nlohmann::ordered_json::object(), test = nlohmann::ordered_json::object();
    for (const auto& [k, c] : spec.train_counts) train[kind_name(k)] = c;
    for (const auto& [k, c] : spec.test_counts) test[kind_name(k)] = c;
    j["train"] = train;
    j["test"] = test;
    nlohmann::ordered_json m;
    m["x_min"] = spec.map.x_min;
    m["x_max"] = spec.map.x_max;
    m["lane_centers_y"] = spec.map.lane_centers_y;
    m["divider_y"] = spec.map.divider_y;
    m["block_length"] = spec.map.block_length;
    m["lane_direction"] = spec.map.lane_direction;
    m["lane_width"] = spec.map.lane_width;
    j["map"] = m;
    return j;
}

nlohmann::ordered_json train_config_to_json(const TrainConfig& cfg) {
    nlohmann::ordered_json j;
    j["variant"] = variant_name(cfg.model.variant);
    j["attn_dim"] = cfg.model.attn_dim;
    j["heads"] = cfg.model.heads;
    j["latent_dim"] = cfg.model.latent_dim;
    j["rnn_hidden"] = cfg.model.rnn_hidden;
    j["cell"] = cell_name(cfg.model.cell);
    j["learning_rate"] = cfg.learning_rate;
    j["batch_size"] = cfg.batch_size;
    j["kl_pred_weight"] = cfg.kl_pred_weight;
    j["kl_recon_weight"] = cfg.kl_recon_weight;
    j["epochs"] = cfg.epochs;
    j["neighbor_radius"] = cfg.neighbor_radius;
    j["window_len"] = cfg.window_len;
    j["stride"] = cfg.stride;
    j["seed"] = cfg.seed;
    j["grad_clip"] = cfg.grad_clip;
    j["jobs"] = cfg.jobs;
    return j;
}

}  // namespace saber
