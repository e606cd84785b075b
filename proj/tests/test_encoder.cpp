#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "credal/checkpoint.hpp"
#include "credal/encoder.hpp"
#include "credal/train.hpp"

using namespace credal;

namespace {

ModelConfig small_config(Mechanism mech, std::uint64_t seed = 5) {
    ModelConfig c;
    c.vocab_size = 16;
    c.seq_len = 6;
    c.d_model = 8;
    c.d_ff = 12;
    c.n_heads = 2;
    c.n_layers = 2;
    c.n_classes = 2;
    c.mechanism = mech;
    c.seed = seed;
    return c;
}

std::vector<int> some_tokens(const ModelConfig& c) {
    std::vector<int> t(static_cast<std::size_t>(c.seq_len));
    for (int i = 0; i < c.seq_len; ++i) t[static_cast<std::size_t>(i)] = i % c.vocab_size;
    return t;
}

void zero_out(Tensor& t) {
    for (double& v : t.value_mut()) v = 0.0;
}

}  // namespace

TEST_CASE("init_params is deterministic in the seed") {
    ModelConfig c = small_config(Mechanism::kCredal);
    ModelParams a = init_params(c);
    ModelParams b = init_params(c);
    auto an = a.named(), bn = b.named();
    REQUIRE(an.size() == bn.size());
    for (std::size_t i = 0; i < an.size(); ++i) CHECK(an[i].second.value() == bn[i].second.value());

    ModelConfig c2 = c;
    c2.seed = c.seed + 1;
    ModelParams d = init_params(c2);
    CHECK(a.embedding.value() != d.embedding.value());
}

TEST_CASE("projection shapes: per-head blocks are d_model x d_head") {
    ModelConfig c = small_config(Mechanism::kCredal);
    c.d_model = 8;
    c.n_heads = 2;
    ModelParams p = init_params(c);
    CHECK(p.layers[0].wq.shape() == Shape{8, 8});
    CHECK(c.d_model / c.n_heads == 4);  // each head reads an 8x4 column block
    CHECK(p.layers[0].w1.shape() == Shape{8, 12});
    CHECK(p.head.shape() == Shape{8, 2});
}

TEST_CASE("invalid configs are rejected") {
    ModelConfig c = small_config(Mechanism::kCredal);
    c.d_model = 8;
    c.n_heads = 3;
    CHECK_THROWS_AS(init_params(c), ConfigError);
    c = small_config(Mechanism::kCredal);
    c.vocab_size = 0;
    CHECK_THROWS_AS(init_params(c), ConfigError);
    c = small_config(Mechanism::kCredal);
    c.n_layers = -1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("forward_classify is deterministic and mode contracts hold") {
    ModelConfig c = small_config(Mechanism::kCredal);
    ModelParams p = init_params(c);
    auto tokens = some_tokens(c);
    Graph g1, g2;
    ClassifierOutput o1 = forward_classify(g1, p, c, tokens);
    ClassifierOutput o2 = forward_classify(g2, p, c, tokens);
    CHECK(o1.logits.value() == o2.logits.value());
    CHECK(o1.layer_vacuity.size() == static_cast<std::size_t>(c.n_layers));
    CHECK(o1.layer_vacuity[0].size() == static_cast<std::size_t>(c.n_heads));
    REQUIRE(o1.model_uncertainty.has_value());
    CHECK(*o1.model_uncertainty > 0.0);
    CHECK(*o1.model_uncertainty < 1.0);
    CHECK(*o1.model_uncertainty == model_uncertainty(o1));

    ModelConfig cs = small_config(Mechanism::kStandard);
    ModelParams ps = init_params(cs);
    Graph g3;
    ClassifierOutput os = forward_classify(g3, ps, cs, tokens);
    CHECK(os.layer_vacuity.empty());
    CHECK_FALSE(os.model_uncertainty.has_value());
    CHECK_THROWS_AS(model_uncertainty(os), ContractError);
}

TEST_CASE("out-of-range token is an input error") {
    ModelConfig c = small_config(Mechanism::kCredal);
    ModelParams p = init_params(c);
    std::vector<int> bad = some_tokens(c);
    bad[2] = c.vocab_size;
    Graph g;
    CHECK_THROWS_AS(forward_classify(g, p, c, bad), InputError);
}

TEST_CASE("zero layers degenerates to head over pooled embedding") {
    ModelConfig c = small_config(Mechanism::kCredal);
    c.n_layers = 0;
    ModelParams p = init_params(c);
    auto tokens = some_tokens(c);
    Graph g;
    ClassifierOutput out = forward_classify(g, p, c, tokens);
    CHECK(out.layer_vacuity.empty());

    // manual: mean over positions of (embedding + pos), then head
    const auto pe = sinusoidal_positions(c.seq_len, c.d_model);
    std::vector<double> pooled(static_cast<std::size_t>(c.d_model), 0.0);
    for (int i = 0; i < c.seq_len; ++i)
        for (int j = 0; j < c.d_model; ++j)
            pooled[static_cast<std::size_t>(j)] +=
                (p.embedding.value()[static_cast<std::size_t>(tokens[i]) * c.d_model + j] +
                 pe[static_cast<std::size_t>(i) * c.d_model + j]) /
                c.seq_len;
    for (int k = 0; k < c.n_classes; ++k) {
        double want = 0.0;
        for (int j = 0; j < c.d_model; ++j)
            want += pooled[static_cast<std::size_t>(j)] *
                    p.head.value()[static_cast<std::size_t>(j) * c.n_classes + k];
        CHECK(out.logits.value()[static_cast<std::size_t>(k)] ==
              doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("zero query projections give vacuity one half everywhere") {
    ModelConfig c = small_config(Mechanism::kCredal);
    ModelParams p = init_params(c);
    for (LayerParams& lp : p.layers) zero_out(lp.wq);
    Graph g;
    ClassifierOutput out = forward_classify(g, p, c, some_tokens(c));
    for (const auto& layer : out.layer_vacuity)
        for (const Tensor& u : layer)
            for (double v : u.value()) CHECK(std::fabs(v - 0.5) <= 1e-15);
    CHECK(std::fabs(*out.model_uncertainty - 0.5) <= 1e-15);
}

TEST_CASE("model_uncertainty is the final-layer mean") {
    ClassifierOutput out;
    out.logits = Tensor::constant({1, 2}, {0.0, 0.0});
    out.layer_vacuity.push_back({Tensor::constant({2}, {0.9, 0.9})});  // earlier layer ignored
    SUBCASE("single head") {
        out.layer_vacuity.push_back({Tensor::constant({2}, {0.1, 0.3})});
        CHECK(model_uncertainty(out) == doctest::Approx(0.2).epsilon(1e-15));
    }
    SUBCASE("two heads, two positions") {
        out.layer_vacuity.push_back(
            {Tensor::constant({2}, {0.1, 0.2}), Tensor::constant({2}, {0.3, 0.4})});
        CHECK(model_uncertainty(out) == doctest::Approx(0.25).epsilon(1e-15));
    }
    SUBCASE("constant") {
        out.layer_vacuity.push_back(
            {Tensor::constant({3}, {0.5, 0.5, 0.5}), Tensor::constant({3}, {0.5, 0.5, 0.5})});
        CHECK(model_uncertainty(out) == 0.5);
    }
}

TEST_CASE("credal block recovers the standard block at +20 score shift") {
    // One layer, one head, d_model = 4. Token i sits at position i and its
    // embedding row is crafted so that after the positional add the layer-norm
    // input already has zero mean and unit variance with a constant last
    // component c; diag weights then shift every attention score by exactly
    // a^2 c^2 / sqrt(d) = 20.
    const int L = 8, d = 4;
    const double c = 0.8;
    std::mt19937_64 eng(17);
    std::uniform_real_distribution<double> up(-0.4, 0.4);

    ModelConfig cfg;
    cfg.vocab_size = L;
    cfg.seq_len = L;
    cfg.d_model = d;
    cfg.d_ff = 4;
    cfg.n_heads = 1;
    cfg.n_layers = 1;
    cfg.n_classes = 2;
    cfg.seed = 9;

    const auto pe = sinusoidal_positions(L, d);
    ModelParams params = init_params(cfg);
    for (int i = 0; i < L; ++i) {
        const double p = up(eng);
        // solve q^2 + q(p+c) + (p^2 + pc + c^2 - 2) = 0 so the row has unit
        // population variance
        const double disc = (p + c) * (p + c) - 4.0 * (p * p + p * c + c * c - 2.0);
        REQUIRE(disc > 0.0);
        const double q = (-(p + c) + std::sqrt(disc)) / 2.0;
        const double row[4] = {p, q, -(p + q + c), c};
        for (int j = 0; j < d; ++j)
            params.embedding.value_mut()[static_cast<std::size_t>(i) * d + j] =
                row[j] - pe[static_cast<std::size_t>(i) * d + j];
    }
    LayerParams& lp = params.layers[0];
    const double a = std::sqrt(20.0 * std::sqrt(static_cast<double>(d)) / (c * c));
    auto set_diag = [&](Tensor& w, std::initializer_list<double> diag) {
        std::fill(w.value_mut().begin(), w.value_mut().end(), 0.0);
        int i = 0;
        for (double v : diag) {
            w.value_mut()[static_cast<std::size_t>(i) * d + i] = v;
            ++i;
        }
    };
    set_diag(lp.wq, {1, 1, 1, a});
    set_diag(lp.wk, {1, 1, 1, a});
    set_diag(lp.wv, {1, 1, 1, 1});
    set_diag(lp.wo, {1, 1, 1, 1});
    zero_out(lp.w2);  // FFN contributes nothing
    std::fill(lp.ln1_gain.value_mut().begin(), lp.ln1_gain.value_mut().end(), 1.0);
    std::fill(lp.ln1_bias.value_mut().begin(), lp.ln1_bias.value_mut().end(), 0.0);

    std::vector<int> tokens(L);
    for (int i = 0; i < L; ++i) tokens[static_cast<std::size_t>(i)] = i;

    ModelConfig std_cfg = cfg;
    std_cfg.mechanism = Mechanism::kStandard;
    ModelConfig cred_cfg = cfg;
    cred_cfg.mechanism = Mechanism::kCredal;
    Graph g1, g2;
    ClassifierOutput so = forward_classify(g1, params, std_cfg, tokens);
    ClassifierOutput co = forward_classify(g2, params, cred_cfg, tokens);
    for (int k = 0; k < cfg.n_classes; ++k)
        CHECK(std::fabs(so.logits.value()[static_cast<std::size_t>(k)] -
                        co.logits.value()[static_cast<std::size_t>(k)]) < 1e-4);
    for (double u : co.layer_vacuity[0][0].value()) CHECK(u < 1e-7);
}

TEST_CASE("full-model gradient check in both modes") {
    for (Mechanism mech : {Mechanism::kStandard, Mechanism::kCredal}) {
        ModelConfig c;
        c.vocab_size = 16;
        c.seq_len = 6;
        c.d_model = 16;
        c.d_ff = 24;
        c.n_heads = 2;
        c.n_layers = 2;
        c.n_classes = 2;
        c.mechanism = mech;
        c.seed = 5;
        GradCheckReport rep = gradient_check_model(c, 1e-4, 60, 1e-5, 11);
        CAPTURE(to_string(mech));
        CHECK(rep.checked == 60);
        CHECK(rep.passed);
        CHECK(rep.max_rel_error < 1e-4);
    }
}

TEST_CASE("checkpoint round trip preserves config and every value") {
    ModelConfig c = small_config(Mechanism::kCredal, 21);
    ModelParams p = init_params(c);
    const auto path = std::filesystem::temp_directory_path() / "credal_test_ckpt.json";
    save_checkpoint(path.string(), c, p);
    auto [c2, p2] = load_checkpoint(path.string());
    CHECK(c2.vocab_size == c.vocab_size);
    CHECK(c2.mechanism == c.mechanism);
    CHECK(c2.seed == c.seed);
    auto a = p.named(), b = p2.named();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].first == b[i].first);
        CHECK(a[i].second.value() == b[i].second.value());
    }
    std::filesystem::remove(path);
}
