#include "credal/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "credal/io.hpp"
#include "credal/rng.hpp"
#include "credal/train.hpp"

namespace credal {

std::string to_string(BenchPhase p) {
    return p == BenchPhase::kInference ? "inference" : "train_step";
}

void BenchConfig::validate() const {
    model.validate();
    if (reps < 30) throw ConfigError("bench reps must be >= 30, got " + std::to_string(reps));
    if (warmup < 0) throw ConfigError("bench warmup must be >= 0");
}

namespace {

double percentile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

ModelParams detached_copy(const ModelParams& params) {
    ModelParams out = params;
    auto detach = [](Tensor& t) { t = Tensor::constant(t.shape(), t.value()); };
    detach(out.embedding);
    for (LayerParams& lp : out.layers) {
        for (Tensor* t : {&lp.ln1_gain, &lp.ln1_bias, &lp.wq, &lp.wk, &lp.wv, &lp.wo,
                          &lp.ln2_gain, &lp.ln2_bias, &lp.w1, &lp.b1, &lp.w2, &lp.b2})
            detach(*t);
    }
    detach(out.head);
    return out;
}

std::vector<int> bench_tokens(const BenchConfig& cfg) {
    std::mt19937_64 eng = make_engine(derive_seed(cfg.seed, 0x42454e43ULL));
    std::uniform_int_distribution<int> tok(0, cfg.model.vocab_size - 1);
    std::vector<int> tokens(static_cast<std::size_t>(cfg.model.seq_len));
    for (int& t : tokens) t = tok(eng);
    return tokens;
}

}  // namespace

BenchResult time_mechanism(const BenchConfig& cfg, Mechanism mechanism, BenchPhase phase) {
    cfg.validate();
    ModelConfig mc = cfg.model;
    mc.mechanism = mechanism;
    const std::vector<int> tokens = bench_tokens(cfg);

    ModelParams params = init_params(mc);
    TrainConfig tc;
    tc.seed = cfg.seed;
    AdamOptimizer opt(params.named(), tc);
    ModelParams frozen = detached_copy(params);
    const int label = 0;

    // keep a sink so the optimizer can't be optimized away
    volatile double sink = 0.0;
    auto run_once = [&] {
        if (phase == BenchPhase::kInference) {
            Graph g;
            ClassifierOutput out = forward_classify(g, frozen, mc, tokens);
            sink = sink + out.logits.value()[0];
        } else {
            opt.zero_grad();
            Graph g;
            ClassifierOutput out = forward_classify(g, params, mc, tokens);
            Tensor loss = cross_entropy_loss(g, out.logits, label);
            g.backward(loss);
            opt.step();
            sink = sink + loss.item();
        }
    };

    for (int i = 0; i < cfg.warmup; ++i) run_once();

    std::vector<double> times_us;
    times_us.reserve(static_cast<std::size_t>(cfg.reps));
    for (int i = 0; i < cfg.reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        run_once();
        const auto t1 = std::chrono::steady_clock::now();
        times_us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    }
    std::sort(times_us.begin(), times_us.end());

    BenchResult r;
    r.mechanism = mechanism;
    r.phase = phase;
    r.seq_len = mc.seq_len;
    r.d_model = mc.d_model;
    r.n_heads = mc.n_heads;
    r.reps = cfg.reps;
    r.median_us = percentile(times_us, 0.5);
    r.p5_us = percentile(times_us, 0.05);
    r.p95_us = percentile(times_us, 0.95);
    if (r.median_us < 100.0) {
        throw ConfigError("timer resolution too coarse: median " + format_double(r.median_us) +
                          " us < 100 us; increase the benchmark problem size");
    }
    return r;
}

CompareReport compare_report(const BenchConfig& cfg, std::vector<BenchResult> results) {
    auto find = [&](Mechanism m, BenchPhase p) -> BenchResult* {
        for (BenchResult& r : results)
            if (r.mechanism == m && r.phase == p) return &r;
        return nullptr;
    };
    for (BenchPhase p : {BenchPhase::kInference, BenchPhase::kTrainStep}) {
        BenchResult* base = find(Mechanism::kStandard, p);
        BenchResult* cred = find(Mechanism::kCredal, p);
        if (!base || !cred) {
            throw ContractError("compare_report: missing " + to_string(p) +
                                " results for both mechanisms");
        }
        base->overhead_pct = 0.0;
        cred->overhead_pct = 100.0 * (cred->median_us - base->median_us) / base->median_us;
    }

    CompareReport rep;
    rep.timings = std::move(results);
    const int d_head = cfg.model.d_model / cfg.model.n_heads;
    rep.flops_standard = count_attention_flops(cfg.model.seq_len, d_head, d_head,
                                               cfg.model.n_heads, Mechanism::kStandard);
    rep.flops_credal = count_attention_flops(cfg.model.seq_len, d_head, d_head,
                                             cfg.model.n_heads, Mechanism::kCredal);
    rep.gflop_rel_diff_pct = 100.0 * relative_flop_difference(rep.flops_standard, rep.flops_credal);
    rep.cpu_model = read_cpu_model();
    rep.compiler = compiler_description();
    rep.build_type = build_type_description();
    return rep;
}

void write_bench_csv(const CompareReport& rep, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << "row_type,mechanism,phase,seq_len,d_model,n_heads,reps,median_us,p5_us,p95_us,"
         "overhead_pct,total_flops,qk_matmul,score_scale,normalization,context_matmul,"
         "projections,gflop_rel_diff_pct\n";
    for (const BenchResult& r : rep.timings) {
        f << "timing," << to_string(r.mechanism) << "," << to_string(r.phase) << "," << r.seq_len
          << "," << r.d_model << "," << r.n_heads << "," << r.reps << ","
          << format_double(r.median_us) << "," << format_double(r.p5_us) << ","
          << format_double(r.p95_us) << "," << format_double(r.overhead_pct)
          << ",,,,,,,\n";
    }
    for (const FlopModel* m : {&rep.flops_standard, &rep.flops_credal}) {
        f << "flops," << to_string(m->mechanism) << ",," << m->seq_len << ","
          << m->n_heads * m->d_k << "," << m->n_heads << ",,,,,," << m->total() << ","
          << m->qk_matmul << "," << m->score_scale << "," << m->normalization << ","
          << m->context_matmul << "," << m->projections << ","
          << format_double(rep.gflop_rel_diff_pct) << "\n";
    }
}

std::string bench_summary(const CompareReport& rep) {
    std::ostringstream os;
    os << "attention benchmark (" << rep.cpu_model << "; " << rep.compiler << "; "
       << rep.build_type << ")\n";
    os << "  flops: standard " << format_double(rep.flops_standard.gflops()) << " GFLOP, credal "
       << format_double(rep.flops_credal.gflops()) << " GFLOP, rel diff "
       << format_double(rep.gflop_rel_diff_pct) << "%\n";
    for (const BenchResult& r : rep.timings) {
        os << "  " << to_string(r.mechanism) << " " << to_string(r.phase) << ": median "
           << format_double(r.median_us) << " us (p5 " << format_double(r.p5_us) << ", p95 "
           << format_double(r.p95_us) << ")";
        if (r.mechanism == Mechanism::kCredal)
            os << ", overhead " << format_double(r.overhead_pct) << "%";
        os << "\n";
    }
    return os.str();
}

}  // namespace credal
