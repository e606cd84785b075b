#include "credal/flops.hpp"

namespace credal {

FlopModel count_attention_flops(int seq_len, int d_k, int d_v, int n_heads, Mechanism mechanism) {
    if (seq_len < 1 || d_k < 1 || d_v < 1 || n_heads < 1) {
        throw ConfigError("count_attention_flops: dimensions must be positive");
    }
    const std::int64_t L = seq_len, dk = d_k, dv = d_v, H = n_heads;
    const std::int64_t d_model = H * dk;

    FlopModel m;
    m.mechanism = mechanism;
    m.seq_len = seq_len;
    m.d_k = d_k;
    m.d_v = d_v;
    m.n_heads = n_heads;

    m.qk_matmul = H * 2 * L * dk * L;
    m.score_scale = H * L * L;
    m.context_matmul = H * 2 * L * L * dv;
    // q, k, v in; concatenated heads out
    m.projections = 2 * L * d_model * (H * dk)    // q
                    + 2 * L * d_model * (H * dk)  // k
                    + 2 * L * d_model * (H * dv)  // v
                    + 2 * L * (H * dv) * d_model; // out

    const std::int64_t softmax_row = 3 * L - 1;
    if (mechanism == Mechanism::kStandard) {
        m.normalization = H * L * softmax_row;
    } else {
        const std::int64_t softplus_row = 3 * L;
        const std::int64_t vacuity_row = 3;
        m.normalization = H * L * (softplus_row + softmax_row + vacuity_row);
    }
    return m;
}

double relative_flop_difference(const FlopModel& baseline, const FlopModel& other) {
    return static_cast<double>(other.total() - baseline.total()) /
           static_cast<double>(baseline.total());
}

}  // namespace credal
