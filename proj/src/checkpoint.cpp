#include "credal/checkpoint.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "credal/config.hpp"

namespace credal {

void save_checkpoint(const std::string& path, const ModelConfig& cfg, const ModelParams& params) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["config"] = cfg;
    nlohmann::json p = nlohmann::json::object();
    for (const auto& [name, t] : params.named()) p[name] = t.value();
    j["params"] = std::move(p);
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << j.dump(2) << "\n";
}

std::pair<ModelConfig, ModelParams> load_checkpoint(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    f >> j;
    if (j.value("schema_version", 0) != 1) {
        throw ConfigError("unsupported checkpoint schema_version in " + path);
    }
    ModelConfig cfg = j.at("config").get<ModelConfig>();
    cfg.validate();
    ModelParams params = init_params(cfg);
    const nlohmann::json& p = j.at("params");
    for (auto& [name, t] : params.named()) {
        const auto it = p.find(name);
        if (it == p.end()) throw ConfigError("checkpoint missing parameter '" + name + "'");
        std::vector<double> v = it->get<std::vector<double>>();
        if (v.size() != t.size()) {
            throw ShapeError("checkpoint parameter '" + name + "' has " +
                             std::to_string(v.size()) + " values, expected " +
                             std::to_string(t.size()));
        }
        t.value_mut() = std::move(v);
    }
    return {cfg, std::move(params)};
}

}  // namespace credal
