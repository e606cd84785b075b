#include "credal/encoder.hpp"

#include <cmath>

#include "credal/rng.hpp"

namespace credal {

void ModelConfig::validate() const {
    if (vocab_size < 1 || seq_len < 1 || d_model < 1 || d_ff < 1 || n_heads < 1 || n_classes < 1) {
        throw ConfigError("model dimensions must be >= 1");
    }
    if (n_layers < 0) throw ConfigError("n_layers must be >= 0");
    if (d_model % n_heads != 0) {
        throw ConfigError("d_model " + std::to_string(d_model) + " not divisible by n_heads " +
                          std::to_string(n_heads));
    }
}

std::vector<std::pair<std::string, Tensor>> ModelParams::named() const {
    std::vector<std::pair<std::string, Tensor>> out;
    out.emplace_back("embedding", embedding);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string p = "layers." + std::to_string(l) + ".";
        const LayerParams& lp = layers[l];
        out.emplace_back(p + "ln1.gain", lp.ln1_gain);
        out.emplace_back(p + "ln1.bias", lp.ln1_bias);
        out.emplace_back(p + "attn.wq", lp.wq);
        out.emplace_back(p + "attn.wk", lp.wk);
        out.emplace_back(p + "attn.wv", lp.wv);
        out.emplace_back(p + "attn.wo", lp.wo);
        out.emplace_back(p + "ln2.gain", lp.ln2_gain);
        out.emplace_back(p + "ln2.bias", lp.ln2_bias);
        out.emplace_back(p + "ffn.w1", lp.w1);
        out.emplace_back(p + "ffn.b1", lp.b1);
        out.emplace_back(p + "ffn.w2", lp.w2);
        out.emplace_back(p + "ffn.b2", lp.b2);
    }
    out.emplace_back("head", head);
    return out;
}

void ModelParams::zero_grad() {
    for (auto& [name, t] : named()) {
        (void)name;
        t.zero_grad();
    }
}

std::size_t ModelParams::param_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : named()) {
        (void)name;
        n += t.size();
    }
    return n;
}

namespace {

Tensor normal_matrix(std::mt19937_64& eng, int rows, int cols, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    std::vector<double> v(static_cast<std::size_t>(rows) * cols);
    for (double& x : v) x = dist(eng);
    return Tensor::variable({rows, cols}, std::move(v));
}

Tensor filled_vector(int n, double value) {
    return Tensor::variable({n}, std::vector<double>(static_cast<std::size_t>(n), value));
}

}  // namespace

ModelParams init_params(const ModelConfig& cfg) {
    cfg.validate();
    std::mt19937_64 eng = make_engine(cfg.seed);
    ModelParams p;
    p.embedding = normal_matrix(eng, cfg.vocab_size, cfg.d_model,
                                1.0 / std::sqrt(static_cast<double>(cfg.d_model)));
    const double attn_sd = 1.0 / std::sqrt(static_cast<double>(cfg.d_model));
    for (int l = 0; l < cfg.n_layers; ++l) {
        LayerParams lp;
        lp.ln1_gain = filled_vector(cfg.d_model, 1.0);
        lp.ln1_bias = filled_vector(cfg.d_model, 0.0);
        lp.wq = normal_matrix(eng, cfg.d_model, cfg.d_model, attn_sd);
        lp.wk = normal_matrix(eng, cfg.d_model, cfg.d_model, attn_sd);
        lp.wv = normal_matrix(eng, cfg.d_model, cfg.d_model, attn_sd);
        lp.wo = normal_matrix(eng, cfg.d_model, cfg.d_model, attn_sd);
        lp.ln2_gain = filled_vector(cfg.d_model, 1.0);
        lp.ln2_bias = filled_vector(cfg.d_model, 0.0);
        lp.w1 = normal_matrix(eng, cfg.d_model, cfg.d_ff, attn_sd);
        lp.b1 = filled_vector(cfg.d_ff, 0.0);
        lp.w2 = normal_matrix(eng, cfg.d_ff, cfg.d_model,
                              1.0 / std::sqrt(static_cast<double>(cfg.d_ff)));
        lp.b2 = filled_vector(cfg.d_model, 0.0);
        p.layers.push_back(std::move(lp));
    }
    p.head = normal_matrix(eng, cfg.d_model, cfg.n_classes, attn_sd);
    return p;
}

std::vector<double> sinusoidal_positions(int seq_len, int d_model) {
    std::vector<double> pe(static_cast<std::size_t>(seq_len) * d_model, 0.0);
    for (int pos = 0; pos < seq_len; ++pos) {
        for (int i = 0; i < d_model; i += 2) {
            const double rate = std::pow(10000.0, -static_cast<double>(i) / d_model);
            pe[static_cast<std::size_t>(pos) * d_model + i] = std::sin(pos * rate);
            if (i + 1 < d_model)
                pe[static_cast<std::size_t>(pos) * d_model + i + 1] = std::cos(pos * rate);
        }
    }
    return pe;
}

ClassifierOutput forward_classify(Graph& g, const ModelParams& params, const ModelConfig& cfg,
                                  const std::vector<int>& tokens) {
    cfg.validate();
    if (tokens.empty()) throw InputError("token sequence is empty");
    const int L = static_cast<int>(tokens.size());

    Tensor x = g.embed_rows(params.embedding, tokens);
    Tensor pos = Tensor::constant({L, cfg.d_model}, sinusoidal_positions(L, cfg.d_model));
    x = g.add(x, pos);

    ClassifierOutput out;
    for (const LayerParams& lp : params.layers) {
        Tensor normed = g.layer_norm(x, lp.ln1_gain, lp.ln1_bias);
        MultiHeadOutput attn = multi_head_attention(
            g, normed, MultiHeadParams{lp.wq, lp.wk, lp.wv, lp.wo, cfg.n_heads}, cfg.mechanism);
        x = g.add(x, attn.output);
        if (cfg.mechanism == Mechanism::kCredal)
            out.layer_vacuity.push_back(std::move(attn.head_vacuity));

        Tensor normed2 = g.layer_norm(x, lp.ln2_gain, lp.ln2_bias);
        Tensor hidden = g.gelu(g.add_row_bias(g.matmul(normed2, lp.w1), lp.b1));
        Tensor ffn = g.add_row_bias(g.matmul(hidden, lp.w2), lp.b2);
        x = g.add(x, ffn);
    }

    Tensor pooled = g.mean_rows(x);
    out.logits = g.matmul(pooled, params.head);
    if (cfg.mechanism == Mechanism::kCredal && !out.layer_vacuity.empty())
        out.model_uncertainty = model_uncertainty(out);
    return out;
}

double model_uncertainty(const ClassifierOutput& out) {
    if (out.layer_vacuity.empty()) {
        throw ContractError("model uncertainty requires a credal-mode output");
    }
    const auto& final_layer = out.layer_vacuity.back();
    double sum = 0.0;
    std::size_t n = 0;
    for (const Tensor& u : final_layer) {
        for (double v : u.value()) sum += v;
        n += u.size();
    }
    return sum / static_cast<double>(n);
}

}  // namespace credal
