#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "credal/data.hpp"
#include "credal/encoder.hpp"

namespace credal {

struct TrainConfig {
    int epochs = 12;
    int batch_size = 32;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t seed = 1;

    void validate() const;
};

// -log softmax(logits)[label], computed through logsumexp.
Tensor cross_entropy_loss(Graph& g, const Tensor& logits, int label);

// Standard Adam with bias correction. Deterministic; reads accumulated leaf
// grads, updates leaf values in place. A non-finite gradient aborts with the
// offending parameter named.
class AdamOptimizer {
  public:
    AdamOptimizer(std::vector<std::pair<std::string, Tensor>> params, const TrainConfig& cfg);

    void step();
    void zero_grad();
    std::int64_t steps_taken() const { return t_; }

  private:
    struct Slot {
        std::string name;
        Tensor param;
        std::vector<double> m, v;
    };
    std::vector<Slot> slots_;
    double lr_, beta1_, beta2_, eps_;
    std::int64_t t_ = 0;
};

struct EpochLog {
    int epoch = 0;
    double loss = 0.0;
    double accuracy = 0.0;
    std::optional<double> mean_vacuity;  // absent for the standard mechanism
};

struct TrainResult {
    ModelParams params;
    std::vector<EpochLog> log;
};

// Minimizes mean cross-entropy over ID sequences. Deterministic given the
// config seeds; per-epoch stats come from the training passes themselves.
TrainResult train(const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                  const std::vector<LabeledSequence>& train_set);

void write_train_log_jsonl(const std::string& path, const std::vector<EpochLog>& log);

struct KindStats {
    double mean_u = 0.0;
    double std_u = 0.0;
    int n = 0;
};

struct UncertaintyReport {
    KindStats id, ood, nonsense;
    double id_accuracy = 0.0;
};

UncertaintyReport evaluate_uncertainty(const ModelParams& params, const ModelConfig& cfg,
                                       const std::vector<LabeledSequence>& id_eval,
                                       const std::vector<LabeledSequence>& ood_eval,
                                       const std::vector<LabeledSequence>& nonsense_eval);

struct Decision {
    bool abstain = false;
    int cls = -1;  // argmax class when answering; ties go to the lowest index
};

Decision abstain_decision(const std::vector<double>& logits, double uncertainty, double tau);

struct GradCheckEntry {
    std::string name;
    std::size_t index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_error = 0.0;
};

struct GradCheckReport {
    double max_rel_error = 0.0;
    int checked = 0;
    double tolerance = 0.0;
    bool passed = false;
    std::vector<GradCheckEntry> worst;  // a few worst offenders, sorted desc
};

// Central-difference check of the full model loss over a random sample of at
// least `min_samples` parameter coordinates. In credal mode the objective
// also sums every recorded vacuity so the uncertainty branch is exercised.
GradCheckReport gradient_check_model(const ModelConfig& cfg, double tolerance,
                                     int min_samples = 200, double h = 1e-5,
                                     std::uint64_t seed = 7);

}  // namespace credal
