#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "credal/tensor.hpp"

namespace credal {

// Reverse-mode tape. Every op appends one step in forward order; backward()
// replays the steps in reverse, so each node is visited exactly once and
// fan-out gradients accumulate additively. One Graph per forward pass;
// independent graphs share no mutable state and may live on separate threads.
//
// Leaf gradients accumulate across backward() calls; callers reset them
// between optimizer steps. Intermediate adjoints are cleared at the start of
// every backward() call.
class Graph {
  public:
    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    // c[i][j] = sum_t a[i][t] * b[t][j]
    Tensor matmul(const Tensor& a, const Tensor& b);
    Tensor transpose(const Tensor& x);

    Tensor add(const Tensor& a, const Tensor& b);
    Tensor sub(const Tensor& a, const Tensor& b);
    Tensor mul(const Tensor& a, const Tensor& b);
    Tensor scale(const Tensor& x, double c);
    Tensor add_scalar(const Tensor& x, double c);
    Tensor neg(const Tensor& x);
    // {m,n} + {n}, bias broadcast over rows.
    Tensor add_row_bias(const Tensor& x, const Tensor& bias);

    // log(1+exp(x)) as max(x,0) + log1p(exp(-|x|)); no overflow for |x|<=700.
    Tensor softplus(const Tensor& x);
    Tensor exp(const Tensor& x);
    Tensor log(const Tensor& x);  // elementwise, x > 0
    Tensor relu(const Tensor& x);
    Tensor gelu(const Tensor& x);

    // Row-stable softmax; masked positions get weight exactly 0 and are
    // excluded from the normalization.
    Tensor softmax_rows(const Tensor& x);
    Tensor softmax_rows(const Tensor& x, const Mask& mask);
    // y_i = log sum_j exp(x_ij) over kept positions, row-max shifted. {m,n}->{m}
    Tensor logsumexp_rows(const Tensor& x);
    Tensor logsumexp_rows(const Tensor& x, const Mask& mask);

    Tensor sum(const Tensor& x);        // -> {1}
    Tensor mean_rows(const Tensor& x);  // {m,n} -> {1,n}
    Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5);
    Tensor embed_rows(const Tensor& table, const std::vector<int>& ids);
    Tensor slice_cols(const Tensor& x, int begin, int end);
    Tensor concat_cols(const std::vector<Tensor>& parts);
    Tensor pick(const Tensor& x, std::size_t flat_index);  // -> {1}

    // Seeds d(loss)/d(loss) = 1 and sweeps the tape once in reverse.
    // loss must be scalar (numel == 1).
    void backward(const Tensor& loss);

    std::size_t num_steps() const { return steps_.size(); }

  private:
    struct Step {
        std::shared_ptr<TensorData> out;
        std::function<void()> back;
    };
    std::vector<Step> steps_;

    Tensor make_result(Shape shape, std::vector<double> value, bool requires_grad);
    void record(const Tensor& out, std::function<void()> back);
};

}  // namespace credal
