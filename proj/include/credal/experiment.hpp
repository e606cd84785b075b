#pragma once

#include <filesystem>

#include "credal/config.hpp"

namespace credal {

// Each consecutive mean-uncertainty gap must clear this fraction of the
// smaller value for the ordering to count.
inline constexpr double kOrderingMargin = 0.2;

bool uncertainty_ordering_holds(const UncertaintyReport& rep);

struct ExperimentOutcome {
    UncertaintyReport report;
    bool ordering_holds = false;
    std::vector<EpochLog> train_log;
    std::filesystem::path checkpoint_path, train_log_path, report_csv_path, report_json_path;
    // resolved pieces for downstream use (abstention sweeps, re-evaluation)
    ModelConfig model_cfg;
    ModelParams params;
    DatasetSpec eval_spec;
};

// Generate data, train a credal classifier on ID sequences, evaluate mean
// vacuity on ID/OOD/Nonsense, and write checkpoint + training log + report
// (CSV and JSON) under cfg.out_dir. Deterministic: byte-identical artifacts
// for identical (config, seed). Module seeds derive from cfg.seed.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

void write_uncertainty_csv(const std::string& path, const UncertaintyReport& rep);
void write_uncertainty_json(const std::string& path, const UncertaintyReport& rep,
                            bool ordering_holds, std::uint64_t seed);

}  // namespace credal
