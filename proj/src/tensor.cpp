#include "credal/tensor.hpp"

#include <sstream>

namespace credal {

std::size_t numel(const Shape& shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return n;
}

std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << "x";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

static std::shared_ptr<TensorData> make_data(Shape shape, std::vector<double> value,
                                             bool requires_grad) {
    for (int d : shape) {
        if (d <= 0) throw ShapeError("tensor dimension must be positive, got " + shape_str(shape));
    }
    if (numel(shape) != value.size()) {
        throw ShapeError("value length " + std::to_string(value.size()) +
                         " does not match shape " + shape_str(shape));
    }
    auto d = std::make_shared<TensorData>();
    d->shape = std::move(shape);
    d->value = std::move(value);
    d->requires_grad = requires_grad;
    return d;
}

Tensor Tensor::variable(Shape shape, std::vector<double> value) {
    return Tensor(make_data(std::move(shape), std::move(value), true));
}

Tensor Tensor::constant(Shape shape, std::vector<double> value) {
    return Tensor(make_data(std::move(shape), std::move(value), false));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    std::vector<double> v(numel(shape), 0.0);
    return Tensor(make_data(std::move(shape), std::move(v), requires_grad));
}

Tensor Tensor::scalar(double v, bool requires_grad) {
    return Tensor(make_data({1}, {v}, requires_grad));
}

int Tensor::rows() const {
    if (rank() != 2) throw ShapeError("rows() on non-matrix tensor " + shape_str(shape()));
    return d_->shape[0];
}

int Tensor::cols() const {
    if (rank() != 2) throw ShapeError("cols() on non-matrix tensor " + shape_str(shape()));
    return d_->shape[1];
}

double Tensor::item() const {
    if (size() != 1) throw ContractError("item() requires a scalar, got " + shape_str(shape()));
    return d_->value[0];
}

std::vector<double> Tensor::grad() const {
    if (d_->grad.empty()) return std::vector<double>(size(), 0.0);
    return d_->grad;
}

Mask::Mask(int r, int c, std::vector<std::uint8_t> k) : rows(r), cols(c), keep(std::move(k)) {
    if (rows <= 0 || cols <= 0 ||
        keep.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
        throw ShapeError("mask storage does not match " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
    for (int i = 0; i < rows; ++i) {
        if (row_count(i) == 0) {
            throw ContractError("mask row " + std::to_string(i) + " keeps no position");
        }
    }
}

int Mask::row_count(int i) const {
    int n = 0;
    for (int j = 0; j < cols; ++j) n += at(i, j) ? 1 : 0;
    return n;
}

}  // namespace credal
