#include "credal/attention.hpp"

#include <cmath>
#include <limits>

namespace credal {

Mechanism mechanism_from_string(const std::string& s) {
    if (s == "standard") return Mechanism::kStandard;
    if (s == "credal") return Mechanism::kCredal;
    throw ConfigError("unknown mechanism '" + s + "' (expected standard|credal)");
}

std::string to_string(Mechanism m) {
    return m == Mechanism::kStandard ? "standard" : "credal";
}

void AttentionInputs::validate() const {
    if (q.rank() != 2 || k.rank() != 2 || v.rank() != 2) {
        throw ShapeError("attention inputs must be matrices: q " + shape_str(q.shape()) + ", k " +
                         shape_str(k.shape()) + ", v " + shape_str(v.shape()));
    }
    if (q.cols() != k.cols()) {
        throw ShapeError("q and k must share d_k: " + shape_str(q.shape()) + " vs " +
                         shape_str(k.shape()));
    }
    if (q.rows() != k.rows() || q.rows() != v.rows()) {
        throw ShapeError("q, k, v must share sequence length: " + shape_str(q.shape()) + ", " +
                         shape_str(k.shape()) + ", " + shape_str(v.shape()));
    }
    if (mask && (mask->rows != q.rows() || mask->cols != k.rows())) {
        throw ShapeError("mask " + std::to_string(mask->rows) + "x" + std::to_string(mask->cols) +
                         " does not match sequence length " + std::to_string(q.rows()));
    }
}

ScoreMatrix compute_scores(Graph& g, const AttentionInputs& in) {
    in.validate();
    const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(in.q.cols()));
    Tensor s = g.scale(g.matmul(in.q, g.transpose(in.k)), inv_sqrt_dk);
    return ScoreMatrix{s, in.mask};
}

StandardAttentionOutput standard_attention(Graph& g, const ScoreMatrix& scores, const Tensor& v) {
    Tensor w = scores.mask ? g.softmax_rows(scores.s, *scores.mask) : g.softmax_rows(scores.s);
    return StandardAttentionOutput{w, g.matmul(w, v)};
}

Tensor evidence_from_scores(const ScoreMatrix& scores) { return scores.s; }

Concentration concentration(Graph& g, const Tensor& log_evidence,
                            const std::optional<Mask>& mask, EvidenceKind kind) {
    Tensor log_alpha;
    switch (kind) {
        case EvidenceKind::kExp:
            // alpha = exp(s) + 1  =>  log alpha = softplus(s)
            log_alpha = g.softplus(log_evidence);
            break;
        case EvidenceKind::kSoftplus:
            log_alpha = g.log(g.add_scalar(g.softplus(log_evidence), 1.0));
            break;
        case EvidenceKind::kRelu:
            log_alpha = g.log(g.add_scalar(g.relu(log_evidence), 1.0));
            break;
    }
    Tensor log_alpha0 = mask ? g.logsumexp_rows(log_alpha, *mask) : g.logsumexp_rows(log_alpha);
    return Concentration{log_alpha, g.exp(log_alpha), log_alpha0, g.exp(log_alpha0), mask};
}

Tensor expected_attention(Graph& g, const Concentration& c) {
    return c.mask ? g.softmax_rows(c.log_alpha, *c.mask) : g.softmax_rows(c.log_alpha);
}

Tensor vacuity(Graph& g, const Concentration& c) {
    const int L = c.log_alpha.rows();
    std::vector<double> log_counts(static_cast<std::size_t>(L));
    for (int i = 0; i < L; ++i) {
        const int n_eff = c.mask ? c.mask->row_count(i) : c.log_alpha.cols();
        log_counts[static_cast<std::size_t>(i)] = std::log(static_cast<double>(n_eff));
    }
    Tensor log_l = Tensor::constant({L}, std::move(log_counts));
    return g.exp(g.sub(log_l, c.log_alpha0));
}

CredalAttentionOutput credal_attention_from_scores(Graph& g, const ScoreMatrix& scores,
                                                   const Tensor& v, EvidenceKind kind) {
    Tensor log_ev = evidence_from_scores(scores);
    Concentration c = concentration(g, log_ev, scores.mask, kind);
    Tensor a_hat = expected_attention(g, c);
    Tensor u = vacuity(g, c);
    Tensor context = g.matmul(a_hat, v);

    Tensor log_ev_out = log_ev;
    if (scores.mask) {
        std::vector<double> vals = log_ev.value();
        const int L = scores.seq_len();
        for (int i = 0; i < L; ++i)
            for (int j = 0; j < scores.mask->cols; ++j)
                if (!scores.mask->at(i, j))
                    vals[static_cast<std::size_t>(i) * scores.mask->cols + j] =
                        -std::numeric_limits<double>::infinity();
        log_ev_out = Tensor::constant(log_ev.shape(), std::move(vals));
    }
    return CredalAttentionOutput{a_hat, log_ev_out, c.alpha, c.alpha0, u, context};
}

CredalAttentionOutput credal_attention(Graph& g, const AttentionInputs& in, EvidenceKind kind) {
    ScoreMatrix scores = compute_scores(g, in);
    return credal_attention_from_scores(g, scores, in.v, kind);
}

MultiHeadOutput multi_head_attention(Graph& g, const Tensor& x, const MultiHeadParams& p,
                                     Mechanism mechanism, const std::optional<Mask>& mask) {
    if (x.rank() != 2) throw ShapeError("multi_head_attention input must be a matrix, got " +
                                        shape_str(x.shape()));
    const int d_model = x.cols();
    if (p.n_heads < 1) throw ConfigError("n_heads must be >= 1, got " + std::to_string(p.n_heads));
    if (d_model % p.n_heads != 0) {
        throw ConfigError("d_model " + std::to_string(d_model) + " not divisible by n_heads " +
                          std::to_string(p.n_heads));
    }
    for (const Tensor* w : {&p.wq, &p.wk, &p.wv, &p.wo}) {
        if (w->rank() != 2 || w->rows() != d_model || w->cols() != d_model) {
            throw ShapeError("projection weight " + shape_str(w->shape()) + " must be [" +
                             std::to_string(d_model) + "x" + std::to_string(d_model) + "]");
        }
    }
    const int d_head = d_model / p.n_heads;

    Tensor q = g.matmul(x, p.wq);
    Tensor k = g.matmul(x, p.wk);
    Tensor v = g.matmul(x, p.wv);

    std::vector<Tensor> contexts;
    std::vector<Tensor> vacuities;
    contexts.reserve(static_cast<std::size_t>(p.n_heads));
    for (int h = 0; h < p.n_heads; ++h) {
        const int c0 = h * d_head, c1 = (h + 1) * d_head;
        AttentionInputs head_in{g.slice_cols(q, c0, c1), g.slice_cols(k, c0, c1),
                                g.slice_cols(v, c0, c1), mask};
        if (mechanism == Mechanism::kStandard) {
            ScoreMatrix s = compute_scores(g, head_in);
            contexts.push_back(standard_attention(g, s, head_in.v).context);
        } else {
            CredalAttentionOutput out = credal_attention(g, head_in);
            contexts.push_back(out.context);
            vacuities.push_back(out.vacuity);
        }
    }
    Tensor merged = contexts.size() == 1 ? contexts.front() : g.concat_cols(contexts);
    return MultiHeadOutput{g.matmul(merged, p.wo), std::move(vacuities)};
}

}  // namespace credal
