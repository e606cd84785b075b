// Command-line entry point: data generation, training + uncertainty
// evaluation, gradient checks, and the attention benchmark. Every command is
// reproducible from (config file, seed); flags override file values, and each
// flag can also come from a CREDAL_* environment variable.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "credal/bench.hpp"
#include "credal/experiment.hpp"
#include "credal/io.hpp"
#include "credal/rng.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> mechanism;
    std::optional<int> reps;
    std::optional<double> tolerance;
};

credal::ExperimentConfig resolve_config(const CliOptions& opt) {
    credal::ExperimentConfig cfg;
    if (!opt.config_path.empty()) cfg = credal::load_experiment_config(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.out_dir) cfg.out_dir = *opt.out_dir;
    if (opt.mechanism) cfg.model.mechanism = credal::mechanism_from_string(*opt.mechanism);
    if (opt.reps) cfg.bench.reps = *opt.reps;
    if (opt.tolerance) cfg.gradcheck_tolerance = *opt.tolerance;
    return cfg;
}

int cmd_run(const credal::ExperimentConfig& cfg) {
    credal::ExperimentOutcome out = credal::run_experiment(cfg);
    const auto& r = out.report;
    std::cout << "id:       mean_u " << credal::format_double(r.id.mean_u) << " (std "
              << credal::format_double(r.id.std_u) << ", n " << r.id.n << ")\n";
    std::cout << "ood:      mean_u " << credal::format_double(r.ood.mean_u) << " (std "
              << credal::format_double(r.ood.std_u) << ", n " << r.ood.n << ")\n";
    std::cout << "nonsense: mean_u " << credal::format_double(r.nonsense.mean_u) << " (std "
              << credal::format_double(r.nonsense.std_u) << ", n " << r.nonsense.n << ")\n";
    std::cout << "id accuracy: " << credal::format_double(r.id_accuracy) << "\n";
    std::cout << "uncertainty ordering (id < ood < nonsense, >=20% gaps): "
              << (out.ordering_holds ? "holds" : "violated") << "\n";
    std::cout << "artifacts: " << out.report_csv_path.string() << ", "
              << out.report_json_path.string() << ", " << out.train_log_path.string() << ", "
              << out.checkpoint_path.string() << "\n";
    return out.ordering_holds ? 0 : 1;
}

int cmd_bench(const credal::ExperimentConfig& cfg) {
    credal::BenchConfig bc = cfg.bench;
    bc.seed = credal::derive_seed(cfg.seed, 5);
    bc.model.seed = credal::derive_seed(cfg.seed, 6);
    std::vector<credal::BenchResult> results;
    for (credal::Mechanism m : {credal::Mechanism::kStandard, credal::Mechanism::kCredal}) {
        for (credal::BenchPhase p : {credal::BenchPhase::kInference, credal::BenchPhase::kTrainStep}) {
            std::cout << "timing " << credal::to_string(m) << " " << credal::to_string(p) << " ("
                      << bc.reps << " reps)...\n";
            results.push_back(credal::time_mechanism(bc, m, p));
        }
    }
    credal::CompareReport rep = credal::compare_report(bc, std::move(results));
    std::filesystem::create_directories(cfg.out_dir);
    const std::string csv = (std::filesystem::path(cfg.out_dir) / "bench.csv").string();
    credal::write_bench_csv(rep, csv);
    std::cout << credal::bench_summary(rep);
    std::cout << "wrote " << csv << "\n";
    return 0;
}

int cmd_gradcheck(const credal::ExperimentConfig& cfg, bool single_mechanism) {
    credal::ModelConfig mc = cfg.model;
    mc.seed = credal::derive_seed(cfg.seed, 1);
    if (mc.n_layers > 2) {
        throw credal::ConfigError("gradcheck expects a small model (n_layers <= 2), got " +
                                  std::to_string(mc.n_layers));
    }
    std::vector<credal::Mechanism> mechs;
    if (single_mechanism) mechs = {mc.mechanism};
    else mechs = {credal::Mechanism::kStandard, credal::Mechanism::kCredal};

    bool all_passed = true;
    for (credal::Mechanism m : mechs) {
        credal::ModelConfig check_cfg = mc;
        check_cfg.mechanism = m;
        credal::GradCheckReport rep = credal::gradient_check_model(
            check_cfg, cfg.gradcheck_tolerance, 200, 1e-5, credal::derive_seed(cfg.seed, 7));
        std::cout << credal::to_string(m) << ": max rel error "
                  << credal::format_double(rep.max_rel_error) << " over " << rep.checked
                  << " parameters (tolerance " << credal::format_double(rep.tolerance) << ") -> "
                  << (rep.passed ? "pass" : "FAIL") << "\n";
        if (!rep.passed) {
            for (const auto& e : rep.worst) {
                std::cout << "  " << e.name << "[" << e.index << "]: analytic "
                          << credal::format_double(e.analytic) << ", numeric "
                          << credal::format_double(e.numeric) << ", rel error "
                          << credal::format_double(e.rel_error) << "\n";
            }
            all_passed = false;
        }
    }
    return all_passed ? 0 : 1;
}

int cmd_gen_data(const credal::ExperimentConfig& cfg) {
    credal::DatasetSpec spec{cfg.model.seq_len, cfg.model.vocab_size, cfg.n_eval_per_kind,
                             cfg.noise_prob, credal::derive_seed(cfg.seed, 4)};
    std::filesystem::create_directories(cfg.out_dir);
    const std::filesystem::path dir(cfg.out_dir);
    credal::write_dataset_jsonl((dir / "id.jsonl").string(), credal::gen_id(spec));
    credal::write_dataset_jsonl((dir / "ood.jsonl").string(), credal::gen_ood(spec));
    credal::write_dataset_jsonl((dir / "nonsense.jsonl").string(), credal::gen_nonsense(spec));
    std::cout << "wrote id.jsonl, ood.jsonl, nonsense.jsonl under " << cfg.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"credal transformer experiments: uncertainty-aware attention at desk scale"};
    app.require_subcommand(1);
    app.fallthrough();  // allow global flags after the subcommand name

    CliOptions opt;
    app.add_option("--config", opt.config_path, "JSON config file (schema_version 1)")
        ->envname("CREDAL_CONFIG");
    app.add_option("--seed", opt.seed, "master seed; module seeds derive from it")
        ->envname("CREDAL_SEED");
    app.add_option("--out", opt.out_dir, "output directory")->envname("CREDAL_OUT");
    app.add_option("--mechanism", opt.mechanism, "attention mechanism: standard|credal")
        ->envname("CREDAL_MECHANISM")
        ->check(CLI::IsMember({"standard", "credal"}));

    CLI::App* run = app.add_subcommand(
        "run", "train on ID data, evaluate uncertainty on ID/OOD/Nonsense; exit 0 iff the "
               "uncertainty ordering holds");
    CLI::App* bench = app.add_subcommand(
        "bench", "time standard vs credal attention and report analytic FLOPs");
    bench->add_option("--reps", opt.reps, "timed repetitions (minimum 30)")
        ->envname("CREDAL_REPS")
        ->check(CLI::Range(30, 1000000));
    CLI::App* gradcheck = app.add_subcommand(
        "gradcheck", "compare tape gradients against central finite differences");
    gradcheck->add_option("--tolerance", opt.tolerance, "max relative error allowed")
        ->envname("CREDAL_TOLERANCE");
    CLI::App* gen = app.add_subcommand("gen-data", "dump the three synthetic datasets as JSONL");

    CLI11_PARSE(app, argc, argv);

    try {
        const credal::ExperimentConfig cfg = resolve_config(opt);
        if (run->parsed()) return cmd_run(cfg);
        if (bench->parsed()) return cmd_bench(cfg);
        if (gradcheck->parsed()) return cmd_gradcheck(cfg, opt.mechanism.has_value());
        if (gen->parsed()) return cmd_gen_data(cfg);
    } catch (const credal::ConfigError& e) {
        std::cerr << "error [config]: " << e.what() << "\n";
        return 2;
    } catch (const credal::ContractError& e) {
        std::cerr << "error [contract]: " << e.what() << "\n";
        return 2;
    } catch (const credal::InputError& e) {
        std::cerr << "error [input]: " << e.what() << "\n";
        return 2;
    } catch (const credal::ShapeError& e) {
        std::cerr << "error [shape]: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error [runtime]: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
