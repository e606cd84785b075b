#pragma once

#include <optional>
#include <string>
#include <vector>

#include "credal/graph.hpp"

namespace credal {

enum class Mechanism { kStandard, kCredal };
Mechanism mechanism_from_string(const std::string& s);
std::string to_string(Mechanism m);

// Map from raw score s to evidence e. Only kExp shares its exponential with
// the softmax normalization; the alternatives exist for ablations and are not
// used by the experiment harnesses.
enum class EvidenceKind { kExp, kSoftplus, kRelu };

struct AttentionInputs {
    Tensor q;                  // [L x d_k]
    Tensor k;                  // [L x d_k]
    Tensor v;                  // [L x d_v]
    std::optional<Mask> mask;  // true = attendable; every row keeps >= 1
    void validate() const;
};

// Raw pre-normalization scores s = (q k^T)/sqrt(d_k). Masked positions are
// flagged here, not yet replaced by -inf.
struct ScoreMatrix {
    Tensor s;  // [L x L]
    std::optional<Mask> mask;
    int seq_len() const { return s.rows(); }
};

struct StandardAttentionOutput {
    Tensor weights;  // [L x L]; rows sum to 1 over kept positions, masked exactly 0
    Tensor context;  // [L x d_v]
};

// Dirichlet concentration derived from log-evidence. alpha_ij = e_ij + 1 is
// carried in the log domain: log alpha = softplus(s) for exp evidence, so the
// linear-domain evidence is never materialized on the compute path.
struct Concentration {
    Tensor log_alpha;   // [L x L]
    Tensor alpha;       // [L x L], exp(log_alpha); > 1 at kept positions
    Tensor log_alpha0;  // [L], row logsumexp of log_alpha over kept positions
    Tensor alpha0;      // [L]
    std::optional<Mask> mask;
};

struct CredalAttentionOutput {
    Tensor a_hat;         // [L x L] expected attention; masked exactly 0
    Tensor log_evidence;  // [L x L]; equals s, masked positions -inf (readout)
    Tensor alpha;         // [L x L]
    Tensor alpha0;        // [L]
    Tensor vacuity;       // [L], each in (0,1)
    Tensor context;       // [L x d_v]
};

ScoreMatrix compute_scores(Graph& g, const AttentionInputs& in);

StandardAttentionOutput standard_attention(Graph& g, const ScoreMatrix& scores, const Tensor& v);

// Log-evidence is the score itself: log e_ij = s_ij. Returned as the same
// differentiable node; masking stays a flag until the normalization ops.
Tensor evidence_from_scores(const ScoreMatrix& scores);

Concentration concentration(Graph& g, const Tensor& log_evidence,
                            const std::optional<Mask>& mask,
                            EvidenceKind kind = EvidenceKind::kExp);

// a_hat_ij = alpha_ij / alpha_i0, computed as a row softmax of log_alpha so
// large scores never overflow.
Tensor expected_attention(Graph& g, const Concentration& c);

// U_i = L_eff(i) / alpha_i0 = exp(log L_eff(i) - log alpha_i0).
Tensor vacuity(Graph& g, const Concentration& c);

CredalAttentionOutput credal_attention(Graph& g, const AttentionInputs& in,
                                       EvidenceKind kind = EvidenceKind::kExp);
CredalAttentionOutput credal_attention_from_scores(Graph& g, const ScoreMatrix& scores,
                                                   const Tensor& v,
                                                   EvidenceKind kind = EvidenceKind::kExp);

struct MultiHeadParams {
    Tensor wq, wk, wv, wo;  // each [d_model x d_model]
    int n_heads = 1;
};

struct MultiHeadOutput {
    Tensor output;                    // [L x d_model]
    std::vector<Tensor> head_vacuity;  // n_heads tensors of [L]; empty for standard
};

MultiHeadOutput multi_head_attention(Graph& g, const Tensor& x, const MultiHeadParams& p,
                                     Mechanism mechanism,
                                     const std::optional<Mask>& mask = std::nullopt);

}  // namespace credal
