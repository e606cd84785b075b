#pragma once

#include <cstdint>

#include "credal/attention.hpp"

namespace credal {

// Analytic FLOP model for one attention block, all heads, one forward pass.
// Convention: every scalar add/sub/mul/div/exp/log/log1p counts as 1 FLOP;
// an [m x k][k x n] matmul costs 2*m*k*n. d_model = n_heads * d_k, and the
// output projection maps n_heads * d_v back to d_model.
//
// Per-row normalization costs (row length L):
//   standard softmax: L exp + (L-1) add + L div                 = 3L - 1
//   credal:           softplus 3 per score (exp + log1p + add)  = 3L
//                     + the same softmax structure on softplus   = 3L - 1
//                     + vacuity (log of the reused sum, sub, exp) = 3
struct FlopModel {
    Mechanism mechanism = Mechanism::kStandard;
    int seq_len = 0, d_k = 0, d_v = 0, n_heads = 0;
    std::int64_t qk_matmul = 0;      // q k^T, all heads
    std::int64_t score_scale = 0;    // 1/sqrt(d_k) multiplies
    std::int64_t normalization = 0;  // the only term that differs by mechanism
    std::int64_t context_matmul = 0;
    std::int64_t projections = 0;    // q/k/v/output projections

    std::int64_t total() const {
        return qk_matmul + score_scale + normalization + context_matmul + projections;
    }
    double gflops() const { return static_cast<double>(total()) * 1e-9; }
};

FlopModel count_attention_flops(int seq_len, int d_k, int d_v, int n_heads, Mechanism mechanism);

// (b - a) / a as a fraction; a is the baseline.
double relative_flop_difference(const FlopModel& baseline, const FlopModel& other);

}  // namespace credal
