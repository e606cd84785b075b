#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace credal {

enum class DataKind { kInDistribution, kOutOfDistribution, kNonsense };
std::string to_string(DataKind k);
DataKind data_kind_from_string(const std::string& s);

struct LabeledSequence {
    std::vector<int> tokens;
    int label = -1;  // class index for ID; -1 for OOD/Nonsense
    DataKind kind = DataKind::kInDistribution;
};

struct DatasetSpec {
    int seq_len = 16;
    int vocab = 64;
    int n_per_kind = 500;
    double noise_prob = 0.15;
    std::uint64_t seed = 1;

    void validate() const;
};

// ID: two affine modular templates over tokens {0..31}, class balanced, each
// token independently replaced by uniform{0..31} with noise_prob.
//   class 0: token_i = (3 i + 5) mod 32
//   class 1: token_i = (5 i + 2) mod 32
std::vector<LabeledSequence> gen_id(const DatasetSpec& spec);

// OOD: tokens i.i.d. uniform{0..31} (the ID token range, no structure).
std::vector<LabeledSequence> gen_ood(const DatasetSpec& spec);

// Nonsense: tokens i.i.d. uniform{32..63}, disjoint from every training
// token. Requires vocab >= 64.
std::vector<LabeledSequence> gen_nonsense(const DatasetSpec& spec);

// Line-delimited records {"kind":..., "label":..., "tokens":[...]}.
void write_dataset_jsonl(const std::string& path, const std::vector<LabeledSequence>& data);

}  // namespace credal
