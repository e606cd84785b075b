#include "credal/config.hpp"

#include <fstream>

namespace credal {

void to_json(nlohmann::json& j, const ModelConfig& c) {
    j = nlohmann::json{{"vocab_size", c.vocab_size}, {"seq_len", c.seq_len},
                       {"d_model", c.d_model},       {"d_ff", c.d_ff},
                       {"n_heads", c.n_heads},       {"n_layers", c.n_layers},
                       {"n_classes", c.n_classes},   {"mechanism", to_string(c.mechanism)},
                       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
    ModelConfig d;
    c.vocab_size = j.value("vocab_size", d.vocab_size);
    c.seq_len = j.value("seq_len", d.seq_len);
    c.d_model = j.value("d_model", d.d_model);
    c.d_ff = j.value("d_ff", d.d_ff);
    c.n_heads = j.value("n_heads", d.n_heads);
    c.n_layers = j.value("n_layers", d.n_layers);
    c.n_classes = j.value("n_classes", d.n_classes);
    c.mechanism = mechanism_from_string(j.value("mechanism", to_string(d.mechanism)));
    c.seed = j.value("seed", d.seed);
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
    j = nlohmann::json{{"epochs", c.epochs},
                       {"batch_size", c.batch_size},
                       {"learning_rate", c.learning_rate},
                       {"beta1", c.beta1},
                       {"beta2", c.beta2},
                       {"eps", c.eps},
                       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
    TrainConfig d;
    c.epochs = j.value("epochs", d.epochs);
    c.batch_size = j.value("batch_size", d.batch_size);
    c.learning_rate = j.value("learning_rate", d.learning_rate);
    c.beta1 = j.value("beta1", d.beta1);
    c.beta2 = j.value("beta2", d.beta2);
    c.eps = j.value("eps", d.eps);
    c.seed = j.value("seed", d.seed);
}

static void bench_to_json(nlohmann::json& j, const BenchConfig& c) {
    j = nlohmann::json{{"seq_len", c.model.seq_len}, {"d_model", c.model.d_model},
                       {"d_ff", c.model.d_ff},       {"n_heads", c.model.n_heads},
                       {"n_layers", c.model.n_layers}, {"vocab_size", c.model.vocab_size},
                       {"reps", c.reps},             {"warmup", c.warmup}};
}

static void bench_from_json(const nlohmann::json& j, BenchConfig& c) {
    BenchConfig d;
    c.model.seq_len = j.value("seq_len", d.model.seq_len);
    c.model.d_model = j.value("d_model", d.model.d_model);
    c.model.d_ff = j.value("d_ff", d.model.d_ff);
    c.model.n_heads = j.value("n_heads", d.model.n_heads);
    c.model.n_layers = j.value("n_layers", d.model.n_layers);
    c.model.vocab_size = j.value("vocab_size", d.model.vocab_size);
    c.reps = j.value("reps", d.reps);
    c.warmup = j.value("warmup", d.warmup);
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    j["schema_version"] = c.schema_version;
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir;
    j["model"] = c.model;
    j["train"] = c.train;
    j["data"] = nlohmann::json{{"n_train", c.n_train},
                               {"n_eval_per_kind", c.n_eval_per_kind},
                               {"noise_prob", c.noise_prob}};
    nlohmann::json b;
    bench_to_json(b, c.bench);
    j["bench"] = std::move(b);
    j["gradcheck"] = nlohmann::json{{"tolerance", c.gradcheck_tolerance}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    ExperimentConfig d;
    c.schema_version = j.value("schema_version", d.schema_version);
    if (c.schema_version != 1) {
        throw ConfigError("unsupported config schema_version " + std::to_string(c.schema_version));
    }
    c.seed = j.value("seed", d.seed);
    c.out_dir = j.value("out_dir", d.out_dir);
    if (j.contains("model")) c.model = j.at("model").get<ModelConfig>();
    if (j.contains("train")) c.train = j.at("train").get<TrainConfig>();
    if (j.contains("data")) {
        const nlohmann::json& dj = j.at("data");
        c.n_train = dj.value("n_train", d.n_train);
        c.n_eval_per_kind = dj.value("n_eval_per_kind", d.n_eval_per_kind);
        c.noise_prob = dj.value("noise_prob", d.noise_prob);
    }
    if (j.contains("bench")) bench_from_json(j.at("bench"), c.bench);
    if (j.contains("gradcheck"))
        c.gradcheck_tolerance = j.at("gradcheck").value("tolerance", d.gradcheck_tolerance);
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file " + path);
    nlohmann::json j;
    f >> j;
    return j.get<ExperimentConfig>();
}

void save_experiment_config(const std::string& path, const ExperimentConfig& cfg) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    nlohmann::json j = cfg;
    f << j.dump(2) << "\n";
}

}  // namespace credal
