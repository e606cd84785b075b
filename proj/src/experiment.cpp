#include "credal/experiment.hpp"

#include <fstream>

#include "credal/checkpoint.hpp"
#include "credal/io.hpp"
#include "credal/rng.hpp"

namespace credal {

bool uncertainty_ordering_holds(const UncertaintyReport& rep) {
    const double id = rep.id.mean_u, ood = rep.ood.mean_u, non = rep.nonsense.mean_u;
    return id > 0.0 && ood >= (1.0 + kOrderingMargin) * id && non >= (1.0 + kOrderingMargin) * ood;
}

void write_uncertainty_csv(const std::string& path, const UncertaintyReport& rep) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << "kind,n,mean_uncertainty,std_uncertainty,id_accuracy\n";
    f << "id," << rep.id.n << "," << format_double(rep.id.mean_u) << ","
      << format_double(rep.id.std_u) << "," << format_double(rep.id_accuracy) << "\n";
    f << "ood," << rep.ood.n << "," << format_double(rep.ood.mean_u) << ","
      << format_double(rep.ood.std_u) << ",\n";
    f << "nonsense," << rep.nonsense.n << "," << format_double(rep.nonsense.mean_u) << ","
      << format_double(rep.nonsense.std_u) << ",\n";
}

void write_uncertainty_json(const std::string& path, const UncertaintyReport& rep,
                            bool ordering_holds, std::uint64_t seed) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["seed"] = seed;
    auto kind = [](const KindStats& s) {
        return nlohmann::json{{"n", s.n}, {"mean_uncertainty", s.mean_u},
                              {"std_uncertainty", s.std_u}};
    };
    j["id"] = kind(rep.id);
    j["ood"] = kind(rep.ood);
    j["nonsense"] = kind(rep.nonsense);
    j["id_accuracy"] = rep.id_accuracy;
    j["ordering_holds"] = ordering_holds;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << j.dump(2) << "\n";
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
    if (cfg.model.mechanism != Mechanism::kCredal) {
        throw ContractError("uncertainty requires credal mode");
    }

    ModelConfig model_cfg = cfg.model;
    model_cfg.seed = derive_seed(cfg.seed, 1);
    TrainConfig train_cfg = cfg.train;
    train_cfg.seed = derive_seed(cfg.seed, 2);

    DatasetSpec train_spec{model_cfg.seq_len, model_cfg.vocab_size, cfg.n_train, cfg.noise_prob,
                           derive_seed(cfg.seed, 3)};
    DatasetSpec eval_spec{model_cfg.seq_len, model_cfg.vocab_size, cfg.n_eval_per_kind,
                          cfg.noise_prob, derive_seed(cfg.seed, 4)};

    const auto train_set = gen_id(train_spec);
    const auto id_eval = gen_id(eval_spec);
    const auto ood_eval = gen_ood(eval_spec);
    const auto nonsense_eval = gen_nonsense(eval_spec);

    TrainResult trained = train(model_cfg, train_cfg, train_set);
    UncertaintyReport report =
        evaluate_uncertainty(trained.params, model_cfg, id_eval, ood_eval, nonsense_eval);

    ExperimentOutcome out;
    out.report = report;
    out.ordering_holds = uncertainty_ordering_holds(report);
    out.train_log = trained.log;
    out.model_cfg = model_cfg;
    out.params = trained.params;
    out.eval_spec = eval_spec;

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    out.checkpoint_path = dir / "checkpoint.json";
    out.train_log_path = dir / "train_log.jsonl";
    out.report_csv_path = dir / "uncertainty.csv";
    out.report_json_path = dir / "uncertainty.json";

    save_checkpoint(out.checkpoint_path.string(), model_cfg, trained.params);
    write_train_log_jsonl(out.train_log_path.string(), trained.log);
    write_uncertainty_csv(out.report_csv_path.string(), report);
    write_uncertainty_json(out.report_json_path.string(), report, out.ordering_holds, cfg.seed);
    return out;
}

}  // namespace credal
