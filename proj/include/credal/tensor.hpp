#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "credal/errors.hpp"

namespace credal {

// Dense row-major shape. Rank 1 ({n}) or rank 2 ({m,n}); a scalar is {1}.
using Shape = std::vector<int>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

struct TensorData {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;  // empty until backward touches this node
    bool requires_grad = false;
};

// Shared handle to a node of the computation graph. Values are frozen once
// the tensor participates in recorded ops; the grad slot is the only mutable
// part during backward. Optimizers may rewrite leaf values between passes.
class Tensor {
  public:
    Tensor() = default;

    static Tensor variable(Shape shape, std::vector<double> value);
    static Tensor constant(Shape shape, std::vector<double> value);
    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor scalar(double v, bool requires_grad = false);

    bool defined() const { return d_ != nullptr; }
    const Shape& shape() const { return d_->shape; }
    std::size_t size() const { return d_->value.size(); }
    int rank() const { return static_cast<int>(d_->shape.size()); }
    int rows() const;
    int cols() const;

    const std::vector<double>& value() const { return d_->value; }
    // Leaf update (optimizer step / finite-difference probe). Do not call on
    // tensors already consumed by a recorded graph you still plan to replay.
    std::vector<double>& value_mut() { return d_->value; }
    double item() const;

    bool requires_grad() const { return d_->requires_grad; }
    // Gradient accumulated by backward; zeros if never touched.
    std::vector<double> grad() const;
    bool has_grad() const { return !d_->grad.empty(); }
    void zero_grad() { d_->grad.clear(); }

    TensorData* node() const { return d_.get(); }
    const std::shared_ptr<TensorData>& ptr() const { return d_; }

  private:
    explicit Tensor(std::shared_ptr<TensorData> d) : d_(std::move(d)) {}
    std::shared_ptr<TensorData> d_;
    friend class Graph;
};

// Boolean attendability mask for [rows x cols] score matrices. keep[i*cols+j]
// nonzero means position j is attendable from query i. Every row must keep at
// least one position.
struct Mask {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> keep;

    Mask() = default;
    Mask(int r, int c, std::vector<std::uint8_t> k);

    bool at(int i, int j) const { return keep[static_cast<std::size_t>(i) * cols + j] != 0; }
    int row_count(int i) const;
};

}  // namespace credal
