#include "credal/data.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "credal/errors.hpp"
#include "credal/rng.hpp"

namespace credal {

namespace {

constexpr int kIdRange = 32;  // ID and OOD tokens live in [0, 32)

}  // namespace

std::string to_string(DataKind k) {
    switch (k) {
        case DataKind::kInDistribution: return "id";
        case DataKind::kOutOfDistribution: return "ood";
        case DataKind::kNonsense: return "nonsense";
    }
    return "?";
}

DataKind data_kind_from_string(const std::string& s) {
    if (s == "id") return DataKind::kInDistribution;
    if (s == "ood") return DataKind::kOutOfDistribution;
    if (s == "nonsense") return DataKind::kNonsense;
    throw ConfigError("unknown data kind '" + s + "'");
}

void DatasetSpec::validate() const {
    if (seq_len < 1) throw ConfigError("seq_len must be >= 1");
    if (vocab < kIdRange) throw ConfigError("vocab must be >= 32");
    if (n_per_kind < 0) throw ConfigError("n_per_kind must be >= 0");
    if (noise_prob < 0.0 || noise_prob > 1.0) {
        throw ConfigError("noise_prob must be in [0, 1], got " + std::to_string(noise_prob));
    }
}

std::vector<LabeledSequence> gen_id(const DatasetSpec& spec) {
    spec.validate();
    std::vector<LabeledSequence> out;
    out.reserve(static_cast<std::size_t>(spec.n_per_kind));
    for (int idx = 0; idx < spec.n_per_kind; ++idx) {
        std::mt19937_64 eng =
            make_engine(derive_seed(spec.seed ^ 0x49445f5345515345ULL, static_cast<std::uint64_t>(idx)));
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        std::uniform_int_distribution<int> tok(0, kIdRange - 1);
        LabeledSequence seq;
        seq.kind = DataKind::kInDistribution;
        seq.label = idx % 2;
        seq.tokens.resize(static_cast<std::size_t>(spec.seq_len));
        for (int i = 0; i < spec.seq_len; ++i) {
            const int base = seq.label == 0 ? (3 * i + 5) % kIdRange : (5 * i + 2) % kIdRange;
            // draw the coin first so token draws stay aligned across noise_prob
            const bool flip = coin(eng) < spec.noise_prob;
            seq.tokens[static_cast<std::size_t>(i)] = flip ? tok(eng) : base;
        }
        out.push_back(std::move(seq));
    }
    return out;
}

std::vector<LabeledSequence> gen_ood(const DatasetSpec& spec) {
    spec.validate();
    std::vector<LabeledSequence> out;
    out.reserve(static_cast<std::size_t>(spec.n_per_kind));
    for (int idx = 0; idx < spec.n_per_kind; ++idx) {
        std::mt19937_64 eng =
            make_engine(derive_seed(spec.seed ^ 0x4f4f445f53455145ULL, static_cast<std::uint64_t>(idx)));
        std::uniform_int_distribution<int> tok(0, kIdRange - 1);
        LabeledSequence seq;
        seq.kind = DataKind::kOutOfDistribution;
        seq.tokens.resize(static_cast<std::size_t>(spec.seq_len));
        for (int i = 0; i < spec.seq_len; ++i) seq.tokens[static_cast<std::size_t>(i)] = tok(eng);
        out.push_back(std::move(seq));
    }
    return out;
}

std::vector<LabeledSequence> gen_nonsense(const DatasetSpec& spec) {
    spec.validate();
    if (spec.vocab < 2 * kIdRange) {
        throw ConfigError("gen_nonsense needs vocab >= 64 for a disjoint token range, got " +
                          std::to_string(spec.vocab));
    }
    std::vector<LabeledSequence> out;
    out.reserve(static_cast<std::size_t>(spec.n_per_kind));
    for (int idx = 0; idx < spec.n_per_kind; ++idx) {
        std::mt19937_64 eng =
            make_engine(derive_seed(spec.seed ^ 0x4e4f4e53454e5345ULL, static_cast<std::uint64_t>(idx)));
        std::uniform_int_distribution<int> tok(kIdRange, 2 * kIdRange - 1);
        LabeledSequence seq;
        seq.kind = DataKind::kNonsense;
        seq.tokens.resize(static_cast<std::size_t>(spec.seq_len));
        for (int i = 0; i < spec.seq_len; ++i) seq.tokens[static_cast<std::size_t>(i)] = tok(eng);
        out.push_back(std::move(seq));
    }
    return out;
}

void write_dataset_jsonl(const std::string& path, const std::vector<LabeledSequence>& data) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    for (const LabeledSequence& seq : data) {
        nlohmann::json j;
        j["kind"] = to_string(seq.kind);
        if (seq.label >= 0) j["label"] = seq.label;
        else j["label"] = nullptr;
        j["tokens"] = seq.tokens;
        f << j.dump() << "\n";
    }
}

}  // namespace credal
