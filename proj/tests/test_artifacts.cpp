#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "credal/experiment.hpp"
#include "credal/io.hpp"

using namespace credal;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

ExperimentConfig quick_config(const std::filesystem::path& out) {
    ExperimentConfig cfg;
    cfg.seed = 42;
    cfg.out_dir = out.string();
    cfg.n_train = 200;
    cfg.n_eval_per_kind = 60;
    cfg.train.epochs = 2;
    return cfg;
}

}  // namespace

TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, 2.0611536181902037e-9, -123456.75, 0.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("experiment config json round trip and overrides") {
    ExperimentConfig cfg;
    cfg.seed = 99;
    cfg.model.d_model = 48;
    cfg.model.n_heads = 6;
    cfg.train.epochs = 7;
    cfg.noise_prob = 0.25;
    cfg.bench.reps = 64;
    const auto path = std::filesystem::temp_directory_path() / "credal_test_cfg.json";
    save_experiment_config(path.string(), cfg);
    ExperimentConfig back = load_experiment_config(path.string());
    CHECK(back.seed == 99);
    CHECK(back.model.d_model == 48);
    CHECK(back.model.n_heads == 6);
    CHECK(back.train.epochs == 7);
    CHECK(back.noise_prob == doctest::Approx(0.25));
    CHECK(back.bench.reps == 64);
    std::filesystem::remove(path);
}

TEST_CASE("partial config files fall back to defaults") {
    const auto path = std::filesystem::temp_directory_path() / "credal_test_partial.json";
    {
        std::ofstream f(path);
        f << R"({"schema_version": 1, "seed": 7, "model": {"d_model": 16, "n_heads": 2}})";
    }
    ExperimentConfig cfg = load_experiment_config(path.string());
    CHECK(cfg.seed == 7);
    CHECK(cfg.model.d_model == 16);
    CHECK(cfg.model.vocab_size == 64);  // default preserved
    CHECK(cfg.train.epochs == TrainConfig{}.epochs);
    std::filesystem::remove(path);
}

TEST_CASE("unsupported schema version is rejected") {
    const auto path = std::filesystem::temp_directory_path() / "credal_test_badschema.json";
    {
        std::ofstream f(path);
        f << R"({"schema_version": 2})";
    }
    CHECK_THROWS_AS(load_experiment_config(path.string()), ConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("ordering predicate applies the 20 percent margins") {
    UncertaintyReport rep;
    rep.id.mean_u = 0.1;
    rep.ood.mean_u = 0.12;
    rep.nonsense.mean_u = 0.15;
    CHECK(uncertainty_ordering_holds(rep));  // exactly at the margins
    rep.ood.mean_u = 0.119;
    CHECK_FALSE(uncertainty_ordering_holds(rep));
    rep.ood.mean_u = 0.12;
    rep.nonsense.mean_u = 0.143;
    CHECK_FALSE(uncertainty_ordering_holds(rep));
}

TEST_CASE("run_experiment requires credal mode") {
    ExperimentConfig cfg = quick_config(std::filesystem::temp_directory_path() / "credal_na");
    cfg.model.mechanism = Mechanism::kStandard;
    try {
        run_experiment(cfg);
        FAIL("expected ContractError");
    } catch (const ContractError& e) {
        CHECK(std::string(e.what()).find("uncertainty requires credal mode") != std::string::npos);
    }
}

TEST_CASE("run_experiment is byte-deterministic for identical config and seed") {
    const auto base = std::filesystem::temp_directory_path() / "credal_det";
    std::filesystem::remove_all(base);
    ExperimentConfig a = quick_config(base / "a");
    ExperimentConfig b = quick_config(base / "b");
    ExperimentOutcome oa = run_experiment(a);
    ExperimentOutcome ob = run_experiment(b);
    CHECK(slurp(oa.report_csv_path) == slurp(ob.report_csv_path));
    CHECK(slurp(oa.train_log_path) == slurp(ob.train_log_path));
    CHECK(slurp(oa.checkpoint_path) == slurp(ob.checkpoint_path));
    CHECK(slurp(oa.report_json_path) == slurp(ob.report_json_path));
    CHECK(oa.report.id.n == 60);

    // csv carries id/ood/nonsense rows under the documented header
    std::istringstream csv(slurp(oa.report_csv_path));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "kind,n,mean_uncertainty,std_uncertainty,id_accuracy");
    std::getline(csv, line);
    CHECK(line.rfind("id,60,", 0) == 0);
    std::filesystem::remove_all(base);
}

TEST_CASE("different seeds give different reports") {
    const auto base = std::filesystem::temp_directory_path() / "credal_seeds";
    std::filesystem::remove_all(base);
    ExperimentConfig a = quick_config(base / "a");
    ExperimentConfig b = quick_config(base / "b");
    b.seed = 43;
    ExperimentOutcome oa = run_experiment(a);
    ExperimentOutcome ob = run_experiment(b);
    CHECK(oa.report.id.mean_u != ob.report.id.mean_u);
    std::filesystem::remove_all(base);
}
