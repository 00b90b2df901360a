#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "saber/synth.hpp"
#include "saber/train.hpp"

namespace saber {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

nlohmann::ordered_json load_json_file(const std::string& path);

// Schema validation: unknown keys are errors.
void check_keys(const nlohmann::ordered_json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx);

DatasetSpec parse_gen_config(const nlohmann::ordered_json& j);
TrainConfig parse_train_config(const nlohmann::ordered_json& j);

nlohmann::ordered_json gen_config_to_json(const DatasetSpec& spec);
nlohmann::ordered_json train_config_to_json(const TrainConfig& cfg);

}  // namespace saber
