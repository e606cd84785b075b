#include "credal/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "credal/rng.hpp"

namespace credal {

void TrainConfig::validate() const {
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (learning_rate < 0.0) throw ConfigError("learning_rate must be >= 0");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
        throw ConfigError("adam betas must be in [0, 1)");
    }
    if (eps <= 0.0) throw ConfigError("adam eps must be > 0");
}

Tensor cross_entropy_loss(Graph& g, const Tensor& logits, int label) {
    if (logits.rank() != 2 || logits.rows() != 1) {
        throw ShapeError("cross_entropy_loss expects [1 x n_classes] logits, got " +
                         shape_str(logits.shape()));
    }
    const int n_classes = logits.cols();
    if (label < 0 || label >= n_classes) {
        throw InputError("label " + std::to_string(label) + " out of range [0, " +
                         std::to_string(n_classes) + ")");
    }
    Tensor lse = g.logsumexp_rows(logits);  // {1}
    Tensor picked = g.pick(logits, static_cast<std::size_t>(label));
    return g.sub(lse, picked);
}

AdamOptimizer::AdamOptimizer(std::vector<std::pair<std::string, Tensor>> params,
                             const TrainConfig& cfg)
    : lr_(cfg.learning_rate), beta1_(cfg.beta1), beta2_(cfg.beta2), eps_(cfg.eps) {
    cfg.validate();
    slots_.reserve(params.size());
    for (auto& [name, t] : params) {
        Slot s;
        s.name = name;
        s.param = t;
        s.m.assign(t.size(), 0.0);
        s.v.assign(t.size(), 0.0);
        slots_.push_back(std::move(s));
    }
}

void AdamOptimizer::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (Slot& s : slots_) {
        if (!s.param.has_grad()) continue;  // zero gradient everywhere
        const std::vector<double>& g = s.param.node()->grad;
        std::vector<double>& x = s.param.value_mut();
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!std::isfinite(g[i])) {
                throw std::runtime_error("non-finite gradient in parameter '" + s.name +
                                         "' at index " + std::to_string(i) + " (step " +
                                         std::to_string(t_) + ")");
            }
            s.m[i] = beta1_ * s.m[i] + (1.0 - beta1_) * g[i];
            s.v[i] = beta2_ * s.v[i] + (1.0 - beta2_) * g[i] * g[i];
            const double mhat = s.m[i] / bc1;
            const double vhat = s.v[i] / bc2;
            x[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

void AdamOptimizer::zero_grad() {
    for (Slot& s : slots_) s.param.zero_grad();
}

TrainResult train(const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                  const std::vector<LabeledSequence>& train_set) {
    model_cfg.validate();
    train_cfg.validate();
    if (train_set.empty()) throw ContractError("train: empty training set");
    for (const LabeledSequence& s : train_set) {
        if (s.kind != DataKind::kInDistribution || s.label < 0) {
            throw ContractError("train: training set must contain only labeled ID sequences");
        }
    }

    TrainResult result;
    result.params = init_params(model_cfg);
    AdamOptimizer opt(result.params.named(), train_cfg);
    std::mt19937_64 shuffle_eng = make_engine(derive_seed(train_cfg.seed, 0x5348554646ULL));

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < train_cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_eng);
        double loss_sum = 0.0;
        double vac_sum = 0.0;
        std::size_t correct = 0;

        for (std::size_t begin = 0; begin < order.size();
             begin += static_cast<std::size_t>(train_cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), begin + static_cast<std::size_t>(train_cfg.batch_size));
            const double inv_batch = 1.0 / static_cast<double>(end - begin);
            opt.zero_grad();
            for (std::size_t p = begin; p < end; ++p) {
                const LabeledSequence& ex = train_set[order[p]];
                Graph g;
                ClassifierOutput out = forward_classify(g, result.params, model_cfg, ex.tokens);
                Tensor loss = cross_entropy_loss(g, out.logits, ex.label);
                loss_sum += loss.item();
                if (out.model_uncertainty) vac_sum += *out.model_uncertainty;
                const auto& lv = out.logits.value();
                const int pred = static_cast<int>(
                    std::max_element(lv.begin(), lv.end()) - lv.begin());
                if (pred == ex.label) ++correct;
                g.backward(g.scale(loss, inv_batch));
            }
            opt.step();
        }

        if (!std::isfinite(loss_sum)) {
            throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                     std::to_string(epoch));
        }
        EpochLog log;
        log.epoch = epoch;
        log.loss = loss_sum / static_cast<double>(train_set.size());
        log.accuracy = static_cast<double>(correct) / static_cast<double>(train_set.size());
        if (model_cfg.mechanism == Mechanism::kCredal)
            log.mean_vacuity = vac_sum / static_cast<double>(train_set.size());
        result.log.push_back(log);
    }
    return result;
}

void write_train_log_jsonl(const std::string& path, const std::vector<EpochLog>& log) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    for (const EpochLog& e : log) {
        nlohmann::json j;
        j["epoch"] = e.epoch;
        j["loss"] = e.loss;
        j["accuracy"] = e.accuracy;
        if (e.mean_vacuity) j["mean_U"] = *e.mean_vacuity;
        else j["mean_U"] = nullptr;
        f << j.dump() << "\n";
    }
}

namespace {

KindStats uncertainty_stats(const ModelParams& params, const ModelConfig& cfg,
                            const std::vector<LabeledSequence>& data) {
    KindStats st;
    st.n = static_cast<int>(data.size());
    if (data.empty()) return st;
    std::vector<double> us;
    us.reserve(data.size());
    for (const LabeledSequence& ex : data) {
        Graph g;
        ClassifierOutput out = forward_classify(g, params, cfg, ex.tokens);
        us.push_back(model_uncertainty(out));
    }
    double mean = 0.0;
    for (double u : us) mean += u;
    mean /= static_cast<double>(us.size());
    double var = 0.0;
    for (double u : us) var += (u - mean) * (u - mean);
    var /= static_cast<double>(us.size());
    st.mean_u = mean;
    st.std_u = std::sqrt(var);
    return st;
}

}  // namespace

UncertaintyReport evaluate_uncertainty(const ModelParams& params, const ModelConfig& cfg,
                                       const std::vector<LabeledSequence>& id_eval,
                                       const std::vector<LabeledSequence>& ood_eval,
                                       const std::vector<LabeledSequence>& nonsense_eval) {
    if (cfg.mechanism != Mechanism::kCredal) {
        throw ContractError("evaluate_uncertainty requires a credal-mode model");
    }
    UncertaintyReport rep;
    rep.id = uncertainty_stats(params, cfg, id_eval);
    rep.ood = uncertainty_stats(params, cfg, ood_eval);
    rep.nonsense = uncertainty_stats(params, cfg, nonsense_eval);

    std::size_t correct = 0;
    for (const LabeledSequence& ex : id_eval) {
        Graph g;
        ClassifierOutput out = forward_classify(g, params, cfg, ex.tokens);
        const auto& lv = out.logits.value();
        const int pred = static_cast<int>(std::max_element(lv.begin(), lv.end()) - lv.begin());
        if (pred == ex.label) ++correct;
    }
    rep.id_accuracy =
        id_eval.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(id_eval.size());
    return rep;
}

Decision abstain_decision(const std::vector<double>& logits, double uncertainty, double tau) {
    if (uncertainty > tau) return Decision{true, -1};
    Decision d;
    d.abstain = false;
    d.cls = 0;
    for (std::size_t i = 1; i < logits.size(); ++i) {
        if (logits[i] > logits[d.cls]) d.cls = static_cast<int>(i);  // ties keep lowest index
    }
    return d;
}

GradCheckReport gradient_check_model(const ModelConfig& cfg, double tolerance, int min_samples,
                                     double h, std::uint64_t seed) {
    cfg.validate();
    ModelParams params = init_params(cfg);
    std::mt19937_64 eng = make_engine(derive_seed(seed, 0x47434845434bULL));

    std::vector<int> tokens(static_cast<std::size_t>(cfg.seq_len));
    std::uniform_int_distribution<int> tok(0, cfg.vocab_size - 1);
    for (int& t : tokens) t = tok(eng);
    const int label = static_cast<int>(eng() % static_cast<std::uint64_t>(cfg.n_classes));

    // Cross-entropy plus, in credal mode, the sum of every head vacuity: the
    // classification path alone never touches the vacuity branch.
    auto objective = [&](Graph& g) -> Tensor {
        ClassifierOutput out = forward_classify(g, params, cfg, tokens);
        Tensor loss = cross_entropy_loss(g, out.logits, label);
        for (const auto& layer : out.layer_vacuity)
            for (const Tensor& u : layer) loss = g.add(loss, g.sum(u));
        return loss;
    };

    params.zero_grad();
    {
        Graph g;
        g.backward(objective(g));
    }

    auto named = params.named();
    std::vector<std::pair<std::size_t, std::size_t>> coords;  // (tensor, flat index)
    for (std::size_t t = 0; t < named.size(); ++t)
        for (std::size_t i = 0; i < named[t].second.size(); ++i) coords.emplace_back(t, i);
    std::shuffle(coords.begin(), coords.end(), eng);
    const std::size_t n_check = std::min(coords.size(), static_cast<std::size_t>(min_samples));

    GradCheckReport rep;
    rep.tolerance = tolerance;
    std::vector<GradCheckEntry> entries;
    for (std::size_t c = 0; c < n_check; ++c) {
        auto [t, i] = coords[c];
        Tensor param = named[t].second;
        const double analytic = param.grad()[i];
        const double keep = param.value()[i];

        param.value_mut()[i] = keep + h;
        double fp;
        {
            Graph g;
            fp = objective(g).item();
        }
        param.value_mut()[i] = keep - h;
        double fm;
        {
            Graph g;
            fm = objective(g).item();
        }
        param.value_mut()[i] = keep;

        const double numeric = (fp - fm) / (2.0 * h);
        GradCheckEntry e;
        e.name = named[t].first;
        e.index = i;
        e.analytic = analytic;
        e.numeric = numeric;
        e.rel_error =
            std::fabs(analytic - numeric) / (std::fabs(analytic) + std::fabs(numeric) + 1e-12);
        rep.max_rel_error = std::max(rep.max_rel_error, e.rel_error);
        entries.push_back(std::move(e));
    }
    rep.checked = static_cast<int>(n_check);
    rep.passed = rep.max_rel_error < tolerance;
    std::sort(entries.begin(), entries.end(),
              [](const GradCheckEntry& a, const GradCheckEntry& b) {
                  return a.rel_error > b.rel_error;
              });
    entries.resize(std::min<std::size_t>(entries.size(), 5));
    rep.worst = std::move(entries);
    return rep;
}

}  // namespace credal
