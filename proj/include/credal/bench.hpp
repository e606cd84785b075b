#pragma once

#include <string>
#include <vector>

#include "credal/encoder.hpp"
#include "credal/flops.hpp"

namespace credal {

enum class BenchPhase { kInference, kTrainStep };
std::string to_string(BenchPhase p);

struct BenchConfig {
    // Timed model. L and d_model default large enough that per-iteration
    // medians sit well above timer resolution and the analytic GFLOP parity
    // bound applies.
    ModelConfig model{64, 128, 256, 512, 4, 2, 2, Mechanism::kStandard, 1};
    int reps = 50;     // >= 30
    int warmup = 5;    // discarded iterations
    std::uint64_t seed = 1;

    void validate() const;
};

struct BenchResult {
    Mechanism mechanism = Mechanism::kStandard;
    BenchPhase phase = BenchPhase::kInference;
    int seq_len = 0, d_model = 0, n_heads = 0;
    int reps = 0;
    double median_us = 0.0, p5_us = 0.0, p95_us = 0.0;
    double overhead_pct = 0.0;  // vs the standard baseline of the same phase
};

// Times full encoder forward (inference) or forward + backward + Adam step
// (train_step) on one fixed random token sequence; monotonic clock, warmup
// discarded. Identical inputs across mechanisms for a given config seed.
// Throws ConfigError if the median lands under 100 us (timer too coarse for
// the problem size).
BenchResult time_mechanism(const BenchConfig& cfg, Mechanism mechanism, BenchPhase phase);

struct CompareReport {
    std::vector<BenchResult> timings;  // standard/credal x inference/train_step
    FlopModel flops_standard, flops_credal;
    double gflop_rel_diff_pct = 0.0;
    std::string cpu_model, compiler, build_type;
};

// Pairs timing rows, fills in overhead percentages, and attaches the analytic
// FLOP counts. Requires one result per (mechanism, phase) pair.
CompareReport compare_report(const BenchConfig& cfg, std::vector<BenchResult> results);

void write_bench_csv(const CompareReport& report, const std::string& path);
std::string bench_summary(const CompareReport& report);

}  // namespace credal
