// Acceptance suite. Runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion; exit code is the number of
// failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "credal/bench.hpp"
#include "credal/experiment.hpp"
#include "credal/gradcheck.hpp"
#include "credal/io.hpp"
#include "credal/rng.hpp"

using namespace credal;
namespace fs = std::filesystem;

namespace {

struct CriterionResult {
    int id;
    std::string name;
    bool passed;
    std::string detail;
};

std::vector<CriterionResult> g_results;

void report(int id, const std::string& name, bool passed, const std::string& detail) {
    g_results.push_back({id, name, passed, detail});
    std::printf("%s  criterion %2d (%s): %s\n", passed ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
}

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::vector<double> random_values(std::mt19937_64& eng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = dist(eng);
    return v;
}

Mask random_mask(std::mt19937_64& eng, int rows, int cols) {
    std::vector<std::uint8_t> keep(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
        bool any = false;
        for (int j = 0; j < cols; ++j) {
            const bool k = (eng() & 3) != 0;
            keep[static_cast<std::size_t>(i) * cols + j] = k;
            any = any || k;
        }
        if (!any) keep[static_cast<std::size_t>(i) * cols + eng() % cols] = 1;
    }
    return Mask(rows, cols, std::move(keep));
}

CredalAttentionOutput run_credal(Graph& g, const std::vector<double>& s, int rows, int cols,
                                 const std::optional<Mask>& mask) {
    ScoreMatrix sm{Tensor::constant({rows, cols}, s), mask};
    Tensor v = Tensor::constant({cols, 1}, std::vector<double>(static_cast<std::size_t>(cols), 1.0));
    return credal_attention_from_scores(g, sm, v);
}

std::vector<double> softmax_row(std::vector<double> s) {
    double mx = s[0];
    for (double v : s) mx = std::fmax(mx, v);
    double sum = 0.0;
    for (double& v : s) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : s) v /= sum;
    return s;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

// ---------------------------------------------------------------------------

void criterion_1_equation_fidelity() {
    const double t0 = now_seconds();
    std::mt19937_64 eng(1001);
    double worst_ahat = 0.0, worst_u = 0.0, worst_alpha = 0.0;
    for (int row = 0; row < 1000; ++row) {
        const int L = 1 + static_cast<int>(eng() % 16);
        auto sv = random_values(eng, static_cast<std::size_t>(L), -20.0, 20.0);
        Graph g;
        auto out = run_credal(g, sv, 1, L, std::nullopt);
        // naive linear-domain oracle
        double a0 = 0.0;
        std::vector<double> alpha(sv.size());
        for (std::size_t j = 0; j < sv.size(); ++j) {
            alpha[j] = std::exp(sv[j]) + 1.0;
            a0 += alpha[j];
        }
        for (std::size_t j = 0; j < sv.size(); ++j) {
            worst_ahat = std::fmax(worst_ahat, std::fabs(out.a_hat.value()[j] - alpha[j] / a0));
            worst_alpha = std::fmax(worst_alpha,
                                    std::fabs(out.alpha.value()[j] - alpha[j]) / alpha[j]);
        }
        worst_u = std::fmax(worst_u, std::fabs(out.vacuity.value()[0] - L / a0));
        worst_alpha = std::fmax(worst_alpha, std::fabs(out.alpha0.value()[0] - a0) / a0);
    }
    const double elapsed = now_seconds() - t0;
    const bool ok = worst_ahat <= 1e-10 && worst_u <= 1e-10 && worst_alpha <= 1e-10 &&
                    elapsed < 1.0;
    std::ostringstream d;
    d << "1000 rows |s|<=20: max |a_hat-oracle| " << format_double(worst_ahat) << ", max |U-oracle| "
      << format_double(worst_u) << ", max rel alpha err " << format_double(worst_alpha) << ", "
      << format_double(elapsed) << " s (tol 1e-10, < 1 s)";
    report(1, "equation fidelity vs naive oracle", ok, d.str());
}

void criterion_2_normalization() {
    std::mt19937_64 eng(1002);
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int L = 2 + static_cast<int>(eng() % 9);
        auto sv = random_values(eng, static_cast<std::size_t>(L) * L, -8.0, 8.0);
        std::optional<Mask> mask;
        if (trial % 2 == 0) mask = random_mask(eng, L, L);
        Graph g;
        auto out = run_credal(g, sv, L, L, mask);
        for (int i = 0; i < L; ++i) {
            double sum = 0.0;
            for (int j = 0; j < L; ++j) {
                const double a = out.a_hat.value()[static_cast<std::size_t>(i) * L + j];
                if (mask && !mask->at(i, j) && a != 0.0) ok = false;  // masked must be exact 0
                sum += a;
            }
            worst = std::fmax(worst, std::fabs(sum - 1.0));
        }
    }
    ok = ok && worst <= 1e-10;
    report(2, "row normalization with masks", ok,
           "1000 instances: max |row sum - 1| = " + format_double(worst) +
               ", masked weights exactly 0 (tol 1e-10)");
}

void criterion_3_vacuity_bounds() {
    std::mt19937_64 eng(1003);
    bool in_range = true, monotone = true;
    for (int trial = 0; trial < 200; ++trial) {
        const int L = 2 + static_cast<int>(eng() % 9);
        auto sv = random_values(eng, static_cast<std::size_t>(L) * L, -10.0, 10.0);
        Graph g;
        auto base = run_credal(g, sv, L, L, std::nullopt);
        for (double u : base.vacuity.value()) in_range = in_range && u > 0.0 && u < 1.0;
        for (double c : {0.5, 1.0, 5.0}) {
            auto shifted = sv;
            for (double& x : shifted) x += c;
            Graph g2;
            auto out = run_credal(g2, shifted, L, L, std::nullopt);
            for (int i = 0; i < L; ++i)
                monotone = monotone && out.vacuity.value()[i] < base.vacuity.value()[i];
        }
    }
    const int L = 8;
    Graph g;
    auto low = run_credal(g, std::vector<double>(L * L, -30.0), L, L, std::nullopt);
    double worst_gap = 0.0;
    for (double u : low.vacuity.value()) worst_gap = std::fmax(worst_gap, std::fabs(1.0 - u));
    const bool limit_ok = worst_gap <= 1e-10;
    const bool ok = in_range && monotone && limit_ok;
    report(3, "vacuity bounds and shift monotonicity", ok,
           std::string("U in (0,1): ") + (in_range ? "yes" : "NO") +
               "; U(s+c) < U(s) at c in {0.5,1,5}: " + (monotone ? "yes" : "NO") +
               "; |1-U| at s=-30: " + format_double(worst_gap) + " (tol 1e-10)");
}

void criterion_4_softmax_recovery() {
    std::mt19937_64 eng(1004);
    double worst_diff = 0.0, worst_u = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int L = 1 + static_cast<int>(eng() % 16);
        auto sv = random_values(eng, static_cast<std::size_t>(L) * L, -3.0, 3.0);
        auto shifted = sv;
        for (double& x : shifted) x += 20.0;
        Graph g;
        auto out = run_credal(g, shifted, L, L, std::nullopt);
        for (int i = 0; i < L; ++i) {
            std::vector<double> row(sv.begin() + static_cast<std::ptrdiff_t>(i) * L,
                                    sv.begin() + static_cast<std::ptrdiff_t>(i + 1) * L);
            auto sm = softmax_row(row);
            for (int j = 0; j < L; ++j)
                worst_diff = std::fmax(
                    worst_diff,
                    std::fabs(out.a_hat.value()[static_cast<std::size_t>(i) * L + j] - sm[j]));
            worst_u = std::fmax(worst_u, out.vacuity.value()[i]);
        }
    }
    const bool ok = worst_diff < 1e-6 && worst_u < 1e-7;
    report(4, "softmax recovery at +20 shift", ok,
           "max |a_hat - softmax| = " + format_double(worst_diff) + " (< 1e-6), max U = " +
               format_double(worst_u) + " (< 1e-7)");
}

void criterion_5_differentiability() {
    const double t0 = now_seconds();
    ModelConfig desk;  // 2 layers, d_model 32, credal by default
    desk.seed = 7;
    GradCheckReport credal_rep = gradient_check_model(desk, 1e-4, 200, 1e-5, 7);
    ModelConfig control = desk;
    control.mechanism = Mechanism::kStandard;
    GradCheckReport std_rep = gradient_check_model(control, 1e-4, 200, 1e-5, 7);
    const double elapsed = now_seconds() - t0;
    const bool ok = credal_rep.passed && std_rep.passed && elapsed < 120.0;
    std::ostringstream d;
    d << "credal max rel err " << format_double(credal_rep.max_rel_error) << ", standard "
      << format_double(std_rep.max_rel_error) << " over " << credal_rep.checked
      << " params each (tol 1e-4, h 1e-5), " << format_double(elapsed) << " s (< 120 s)";
    report(5, "full-model gradient check", ok, d.str());
}

struct SeedRun {
    ExperimentOutcome outcome;
    std::uint64_t seed;
};

std::vector<SeedRun> g_runs;  // shared by criteria 6, 9, 10
fs::path g_out_root;

ExperimentConfig default_run_config(std::uint64_t seed, const fs::path& out) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    cfg.out_dir = out.string();
    return cfg;
}

void criterion_6_uncertainty_ordering() {
    const double t0 = now_seconds();
    bool ordering_all = true, accuracy_all = true;
    std::ostringstream d;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        ExperimentConfig cfg = default_run_config(seed, g_out_root / ("seed_" + std::to_string(seed)));
        ExperimentOutcome out = run_experiment(cfg);
        ordering_all = ordering_all && out.ordering_holds;
        accuracy_all = accuracy_all && out.report.id_accuracy >= 0.95;
        d << "seed " << seed << ": id " << format_double(out.report.id.mean_u) << " / ood "
          << format_double(out.report.ood.mean_u) << " / nonsense "
          << format_double(out.report.nonsense.mean_u) << ", acc "
          << format_double(out.report.id_accuracy) << " -> "
          << (out.ordering_holds ? "ordered" : "NOT ordered") << "; ";
        g_runs.push_back({std::move(out), seed});
    }
    const double elapsed = now_seconds() - t0;
    const bool ok = ordering_all && accuracy_all && elapsed < 300.0;
    d << format_double(elapsed) << " s (< 300 s)";
    report(6, "uncertainty ordering id < ood < nonsense (>=20% gaps, 3/3 seeds)", ok, d.str());
}

void criterion_7_gflop_parity() {
    FlopModel s = count_attention_flops(128, 64, 64, 4, Mechanism::kStandard);
    FlopModel c = count_attention_flops(128, 64, 64, 4, Mechanism::kCredal);
    const double rel = relative_flop_difference(s, c);
    const bool ok = rel < 0.005;
    report(7, "analytic GFLOP parity at L=128 d_model=256", ok,
           "standard " + std::to_string(s.total()) + " vs credal " + std::to_string(c.total()) +
               " FLOPs, rel diff " + format_double(100.0 * rel) + "% (< 0.5%)");
}

void criterion_8_overhead() {
    const double t0 = now_seconds();
    BenchConfig bc;
    bc.reps = 30;
    bc.warmup = 5;
    bc.seed = 9;
    bc.model.seed = 9;
    std::vector<BenchResult> results;
    for (Mechanism m : {Mechanism::kStandard, Mechanism::kCredal})
        for (BenchPhase p : {BenchPhase::kInference, BenchPhase::kTrainStep})
            results.push_back(time_mechanism(bc, m, p));
    CompareReport rep = compare_report(bc, std::move(results));
    const fs::path csv = g_out_root / "bench.csv";
    write_bench_csv(rep, csv.string());
    double inf = 0.0, train = 0.0;
    for (const BenchResult& r : rep.timings) {
        if (r.mechanism != Mechanism::kCredal) continue;
        (r.phase == BenchPhase::kInference ? inf : train) = r.overhead_pct;
    }
    const double elapsed = now_seconds() - t0;
    const bool ok = inf <= 25.0 && train <= 25.0 && elapsed < 180.0;
    std::ostringstream d;
    d << "credal overhead: inference " << format_double(inf) << "%, train step "
      << format_double(train) << "% (both <= 25%), csv " << csv.string() << ", "
      << format_double(elapsed) << " s (< 180 s)";
    report(8, "measured overhead vs standard attention", ok, d.str());
}

void criterion_9_abstention() {
    bool monotone_all = true, separation_all = true;
    std::ostringstream d;
    for (const SeedRun& run : g_runs) {
        const auto& oc = run.outcome;
        auto per_example_u = [&](const std::vector<LabeledSequence>& data) {
            std::vector<double> us;
            us.reserve(data.size());
            for (const LabeledSequence& ex : data) {
                Graph g;
                us.push_back(*forward_classify(g, oc.params, oc.model_cfg, ex.tokens)
                                  .model_uncertainty);
            }
            return us;
        };
        const auto id_u = per_example_u(gen_id(oc.eval_spec));
        const auto non_u = per_example_u(gen_nonsense(oc.eval_spec));

        // 21-point sweep over pooled uncertainties: rate non-increasing in tau
        std::vector<double> pooled = id_u;
        pooled.insert(pooled.end(), non_u.begin(), non_u.end());
        double prev = 1.1;
        for (int k = 0; k <= 20; ++k) {
            const double tau = static_cast<double>(k) / 20.0;
            int abst = 0;
            for (double u : pooled)
                if (abstain_decision({0.0, 0.0}, u, tau).abstain) ++abst;
            const double rate = static_cast<double>(abst) / static_cast<double>(pooled.size());
            if (rate > prev + 1e-15) monotone_all = false;
            prev = rate;
        }

        const double tau = 0.5 * (oc.report.id.mean_u + oc.report.nonsense.mean_u);
        auto rate_above = [&](const std::vector<double>& us) {
            int n = 0;
            for (double u : us)
                if (u > tau) ++n;
            return static_cast<double>(n) / static_cast<double>(us.size());
        };
        const double non_rate = rate_above(non_u);
        const double id_rate = rate_above(id_u);
        const bool sep = non_rate > 0.8 && id_rate < 0.2;
        separation_all = separation_all && sep;
        d << "seed " << run.seed << ": tau " << format_double(tau) << ", abstain(nonsense) "
          << format_double(non_rate) << " (> 0.8), abstain(id) " << format_double(id_rate)
          << " (< 0.2) -> " << (sep ? "ok" : "NOT separated") << "; ";
    }
    d << "tau sweep monotone: " << (monotone_all ? "yes" : "NO");
    report(9, "abstention rule separates nonsense from id", monotone_all && separation_all,
           d.str());
}

void criterion_10_determinism() {
    // rerun the seed-1 experiment with an identical config into a fresh
    // directory and compare artifact bytes against criterion 6's run
    ExperimentConfig cfg = default_run_config(1, g_out_root / "seed_1_rerun");
    ExperimentOutcome rerun = run_experiment(cfg);
    const ExperimentOutcome& first = g_runs.front().outcome;
    const bool csv_same = slurp(first.report_csv_path) == slurp(rerun.report_csv_path);
    const bool log_same = slurp(first.train_log_path) == slurp(rerun.train_log_path);
    const bool ckpt_same = slurp(first.checkpoint_path) == slurp(rerun.checkpoint_path);
    const bool ok = csv_same && log_same && ckpt_same;
    report(10, "byte-identical artifacts on rerun", ok,
           std::string("uncertainty.csv ") + (csv_same ? "identical" : "DIFFER") +
               ", train_log.jsonl " + (log_same ? "identical" : "DIFFER") + ", checkpoint.json " +
               (ckpt_same ? "identical" : "DIFFER"));
}

}  // namespace

int main() {
    g_out_root = fs::temp_directory_path() / "credal_acceptance";
    fs::remove_all(g_out_root);
    fs::create_directories(g_out_root);

    criterion_1_equation_fidelity();
    criterion_2_normalization();
    criterion_3_vacuity_bounds();
    criterion_4_softmax_recovery();
    criterion_5_differentiability();
    criterion_6_uncertainty_ordering();
    criterion_7_gflop_parity();
    criterion_8_overhead();
    criterion_9_abstention();
    criterion_10_determinism();

    int failed = 0;
    for (const CriterionResult& r : g_results)
        if (!r.passed) ++failed;
    std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(g_results.size()) - failed,
                g_results.size());
    return failed;
}
