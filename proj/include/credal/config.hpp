#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "credal/bench.hpp"
#include "credal/data.hpp"
#include "credal/train.hpp"

namespace credal {

// Everything a command needs, loadable from one JSON file. Every field has a
// default; CLI flags override file values. All randomness flows from `seed`:
// module seeds are derived from it when a command runs.
struct ExperimentConfig {
    int schema_version = 1;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    ModelConfig model;   // desk-scale defaults
    TrainConfig train;
    int n_train = 2000;
    int n_eval_per_kind = 500;
    double noise_prob = 0.15;
    BenchConfig bench;
    double gradcheck_tolerance = 1e-4;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

ExperimentConfig load_experiment_config(const std::string& path);
void save_experiment_config(const std::string& path, const ExperimentConfig& cfg);

}  // namespace credal
