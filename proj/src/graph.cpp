#include "credal/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace credal {

namespace {

std::vector<double>& ensure_grad(TensorData* t) {
    if (t->grad.empty()) t->grad.assign(t->value.size(), 0.0);
    return t->grad;
}

double stable_softplus(double x) {
    return std::fmax(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

double sigmoid(double x) {
    if (x >= 0.0) {
        double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

Mask full_mask(int rows, int cols) {
    return Mask(rows, cols,
                std::vector<std::uint8_t>(static_cast<std::size_t>(rows) * cols, 1));
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + " shape mismatch: " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    }
}

}  // namespace

Tensor Graph::make_result(Shape shape, std::vector<double> value, bool requires_grad) {
    auto d = std::make_shared<TensorData>();
    d->shape = std::move(shape);
    d->value = std::move(value);
    d->requires_grad = requires_grad;
    return Tensor(std::move(d));
}

void Graph::record(const Tensor& out, std::function<void()> back) {
    steps_.push_back({out.ptr(), std::move(back)});
}

Tensor Graph::matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
        throw ShapeError("matmul shape mismatch: " + shape_str(a.shape()) + " * " +
                         shape_str(b.shape()));
    }
    const int m = a.rows(), k = a.cols(), n = b.cols();
    std::vector<double> out(static_cast<std::size_t>(m) * n, 0.0);
    const double* A = a.value().data();
    const double* B = b.value().data();
    for (int i = 0; i < m; ++i) {
        for (int t = 0; t < k; ++t) {
            const double av = A[i * k + t];
            const double* Brow = B + static_cast<std::size_t>(t) * n;
            double* Crow = out.data() + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) Crow[j] += av * Brow[j];
        }
    }
    const bool rg = a.requires_grad() || b.requires_grad();
    Tensor c = make_result({m, n}, std::move(out), rg);
    if (rg) {
        auto an = a.ptr(), bn = b.ptr(), cn = c.ptr();
        record(c, [an, bn, cn, m, k, n] {
            const auto& dC = cn->grad;
            if (an->requires_grad) {
                auto& dA = ensure_grad(an.get());
                const double* B = bn->value.data();
                for (int i = 0; i < m; ++i) {
                    const double* dCrow = dC.data() + static_cast<std::size_t>(i) * n;
                    for (int t = 0; t < k; ++t) {
                        const double* Brow = B + static_cast<std::size_t>(t) * n;
                        double s = 0.0;
                        for (int j = 0; j < n; ++j) s += dCrow[j] * Brow[j];
                        dA[i * k + t] += s;
                    }
                }
            }
            if (bn->requires_grad) {
                auto& dB = ensure_grad(bn.get());
                const double* A = an->value.data();
                for (int i = 0; i < m; ++i) {
                    const double* dCrow = dC.data() + static_cast<std::size_t>(i) * n;
                    for (int t = 0; t < k; ++t) {
                        const double av = A[i * k + t];
                        double* dBrow = dB.data() + static_cast<std::size_t>(t) * n;
                        for (int j = 0; j < n; ++j) dBrow[j] += av * dCrow[j];
                    }
                }
            }
        });
    }
    return c;
}

Tensor Graph::transpose(const Tensor& x) {
    if (x.rank() != 2) throw ShapeError("transpose requires a matrix, got " + shape_str(x.shape()));
    const int m = x.rows(), n = x.cols();
    std::vector<double> out(static_cast<std::size_t>(m) * n);
    const double* X = x.value().data();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j) * m + i] = X[i * n + j];
    Tensor y = make_result({n, m}, std::move(out), x.requires_grad());
    if (x.requires_grad()) {
        auto xn = x.ptr(), yn = y.ptr();
        record(y, [xn, yn, m, n] {
            auto& dX = ensure_grad(xn.get());
            const auto& dY = yn->grad;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) dX[i * n + j] += dY[static_cast<std::size_t>(j) * m + i];
        });
    }
    return y;
}

Tensor Graph::add(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "add");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] + b.value()[i];
    const bool rg = a.requires_grad() || b.requires_grad();
    Tensor c = make_result(a.shape(), std::move(out), rg);
    if (rg) {
        auto an = a.ptr(), bn = b.ptr(), cn = c.ptr();
        record(c, [an, bn, cn] {
            const auto& dC = cn->grad;
            if (an->requires_grad) {
                auto& dA = ensure_grad(an.get());
                for (std::size_t i = 0; i < dC.size(); ++i) dA[i] += dC[i];
            }
            if (bn->requires_grad) {
                auto& dB = ensure_grad(bn.get());
                for (std::size_t i = 0; i < dC.size(); ++i) dB[i] += dC[i];
            }
        });
    }
    return c;
}

Tensor Graph::sub(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "sub");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] - b.value()[i];
    const bool rg = a.requires_grad() || b.requires_grad();
    Tensor c = make_result(a.shape(), std::move(out), rg);
    if (rg) {
        auto an = a.ptr(), bn = b.ptr(), cn = c.ptr();
        record(c, [an, bn, cn] {
            const auto& dC = cn->grad;
            if (an->requires_grad) {
                auto& dA = ensure_grad(an.get());
                for (std::size_t i = 0; i < dC.size(); ++i) dA[i] += dC[i];
            }
            if (bn->requires_grad) {
                auto& dB = ensure_grad(bn.get());
                for (std::size_t i = 0; i < dC.size(); ++i) dB[i] -= dC[i];
            }
        });
    }
    return c;
}

Tensor Graph::mul(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "mul");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] * b.value()[i];
    const bool rg = a.requires_grad() || b.requires_grad();
    Tensor c = make_result(a.shape(), std::move(out), rg);
    if (rg) {
        auto an = a.ptr(), bn = b.ptr(), cn = c.ptr();
        record(c, [an, bn, cn] {
            const auto& dC = cn->grad;
            if (an->requires_grad) {
                auto& dA = ensure_grad(an.get());
                for (std::size_t i = 0; i < dC.size(); ++i) dA[i] += dC[i] * bn->value[i];
            }
            if (bn->requires_grad) {
                auto& dB = ensure_grad(bn.get());
                for (std::size_t i = 0; i < dC.size(); ++i) dB[i] += dC[i] * an->value[i];
            }
        });
    }
    return c;
}

Tensor Graph::scale(const Tensor& x, double c) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * x.value()[i];
    Tensor y = make_result(x.shape(), std::move(out), x.requires_grad());
    if (x.requires_grad()) {
        auto xn = x.ptr(), yn = y.ptr();
        record(y, [xn, yn, c] {
            auto& dX = ensure_grad(xn.get());
            const auto& dY = yn->grad;
            for (std::size_t i = 0; i < dY.size(); ++i) dX[i] += c * dY[i];
        });
    }
    return y;
}

Tensor Graph::add_scalar(const Tensor& x, double c) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.value()[i] + c;
    Tensor y = make_result(x.shape(), std::move(out), x.requires_grad());
    if (x.requires_grad()) {
        auto xn = x.ptr(), yn = y.ptr();
        record(y, [xn, yn] {
            auto& dX = ensure_grad(xn.get());
            const auto& dY = yn->grad;
            for (std::size_t i = 0; i < dY.size(); ++i) dX[i] += dY[i];
        });
    }
    return y;
}

Tensor Graph::neg(const Tensor& x) { return scale(x, -1.0); }

Tensor Graph::add_row_bias(const Tensor& x, const Tensor& bias) {
    if (x.rank() != 2 || bias.rank() != 1 || bias.shape()[0] != x.cols()) {
        throw ShapeError("add_row_bias shape mismatch: " + shape_str(x.shape()) + " + " +
                         shape_str(bias.shape()));
    }
    const int m = x.rows(), n = x.cols();
    std::vector<double> out(x.size());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            out[static_cast<std::size_t>(i) * n + j] = x.value()[i * n + j] + bias.value()[j];
    const bool rg = x.requires_grad() || bias.requires_grad();
    Tensor y = make_result(x.shape(), std::move(out), rg);
    if (rg) {
        auto xn = x.ptr(), bn = bias.ptr(), yn = y.ptr();
        record(y, [xn, bn, yn, m, n] {
            const auto& dY = yn->grad;
            if (xn->requires_grad) {
                auto& dX = ensure_grad(xn.get());
                for (std::size_t i = 0; i < dY.size(); ++i) dX[i] += dY[i];
            }
            if (bn->requires_grad) {
                auto& dB = ensure_grad(bn.get());
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < n; ++j) dB[j] += dY[static_cast<std::size_t>(i) * n + j];
            }
        });
    }
    return y;
}

Tensor Graph::softplus(const Tensor& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = stable_softplus(x.value()[i]);
    Tensor y = make_result(x.shape(), std::move(out), x.requires_grad());
    if (x.requires_grad()) {
        auto xn = x.ptr(), yn = y.ptr();
        record(y, [xn, yn] {
            auto& dX = ensure_grad(xn.get());
            const auto& dY = yn->grad;
            for (std::size_t i = 0; i < dY.size(); ++i) dX[i] += dY[i] * sigmoid(xn->value[i]);
        });
    }
    return y;
}

Tensor Graph::exp(const Tensor& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(x.value()[i]);
    Tensor y = make_result(x.shape(), std::move(out), x.requires_grad());
    if (x.requires_grad()) {
        auto xn = x.ptr(), yn = y.ptr();
        record(y, [xn, yn] {
            auto& dX = ensure_grad(xn.get());
            const auto& dY = yn->grad;
            for (std::size_t i = 0; i < dY.size(); ++i) dX[i] += dY[i] * yn->value[i];
        });
    }
    return y;
}

Tensor Graph::log(const Tensor& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(x.value()[i]);
    Tensor y = make_result(x.shape(), std::move(out), x.requires_grad());
    if (x.requires_grad()) {
        auto xn = x.ptr(), yn = y.ptr();
        record(y, [xn, yn] {
            auto& dX = ensure_grad(xn.get());
            const auto& dY = yn->grad;
            for (std::size_t i = 0; i < dY.size(); ++i) dX[i] += dY[i] / xn->value[i];
        });
    }
    return y;
}

Tensor Graph::relu(const Tensor& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::fmax(x.value()[i], 0.0);
    Tensor y = make_result(x.shape(), std::move(out), x.requires_grad());
    if (x.requires_grad()) {
        auto xn = x.ptr(), yn = y.ptr();
        record(y, [xn, yn] {
            auto& dX = ensure_grad(xn.get());
            const auto& dY = yn->grad;
            for (std::size_t i = 0; i < dY.size(); ++i)
                if (xn->value[i] > 0.0) dX[i] += dY[i];
        });
    }
    return y;
}

Tensor Graph::gelu(const Tensor& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = x.value()[i];
        out[i] = 0.5 * v * (1.0 + std::erf(v * kInvSqrt2));
    }
    Tensor y = make_result(x.shape(), std::move(out), x.requires_grad());
    if (x.requires_grad()) {
        auto xn = x.ptr(), yn = y.ptr();
        record(y, [xn, yn] {
            auto& dX = ensure_grad(xn.get());
            const auto& dY = yn->grad;
            for (std::size_t i = 0; i < dY.size(); ++i) {
                const double v = xn->value[i];
                const double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
                const double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
                dX[i] += dY[i] * (cdf + v * pdf);
            }
        });
    }
    return y;
}

Tensor Graph::softmax_rows(const Tensor& x) {
    if (x.rank() != 2) throw ShapeError("softmax_rows requires a matrix, got " + shape_str(x.shape()));
    return softmax_rows(x, full_mask(x.rows(), x.cols()));
}

Tensor Graph::softmax_rows(const Tensor& x, const Mask& mask) {
    if (x.rank() != 2) throw ShapeError("softmax_rows requires a matrix, got " + shape_str(x.shape()));
    const int m = x.rows(), n = x.cols();
    if (mask.rows != m || mask.cols != n) {
        throw ShapeError("softmax_rows mask " + std::to_string(mask.rows) + "x" +
                         std::to_string(mask.cols) + " does not match " + shape_str(x.shape()));
    }
    std::vector<double> out(x.size(), 0.0);
    const double* X = x.value().data();
    for (int i = 0; i < m; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j)
            if (mask.at(i, j)) mx = std::fmax(mx, X[i * n + j]);
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            if (!mask.at(i, j)) continue;
            const double e = std::exp(X[i * n + j] - mx);
            out[static_cast<std::size_t>(i) * n + j] = e;
            s += e;
        }
        const double inv = 1.0 / s;
        for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i) * n + j] *= inv;
    }
    Tensor y = make_result(x.shape(), std::move(out), x.requires_grad());
    if (x.requires_grad()) {
        auto xn = x.ptr(), yn = y.ptr();
        record(y, [xn, yn, m, n] {
            auto& dX = ensure_grad(xn.get());
            const auto& dY = yn->grad;
            const auto& Y = yn->value;
            // masked outputs are exactly 0, so they contribute nothing
            for (int i = 0; i < m; ++i) {
                double dot = 0.0;
                for (int j = 0; j < n; ++j)
                    dot += dY[static_cast<std::size_t>(i) * n + j] * Y[static_cast<std::size_t>(i) * n + j];
                for (int j = 0; j < n; ++j) {
                    const std::size_t k = static_cast<std::size_t>(i) * n + j;
                    dX[k] += Y[k] * (dY[k] - dot);
                }
            }
        });
    }
    return y;
}

Tensor Graph::logsumexp_rows(const Tensor& x) {
    if (x.rank() != 2)
        throw ShapeError("logsumexp_rows requires a matrix, got " + shape_str(x.shape()));
    return logsumexp_rows(x, full_mask(x.rows(), x.cols()));
}

Tensor Graph::logsumexp_rows(const Tensor& x, const Mask& mask) {
    if (x.rank() != 2)
        throw ShapeError("logsumexp_rows requires a matrix, got " + shape_str(x.shape()));
    const int m = x.rows(), n = x.cols();
    if (mask.rows != m || mask.cols != n) {
        throw ShapeError("logsumexp_rows mask " + std::to_string(mask.rows) + "x" +
                         std::to_string(mask.cols) + " does not match " + shape_str(x.shape()));
    }
    std::vector<double> out(static_cast<std::size_t>(m));
    const double* X = x.value().data();
    for (int i = 0; i < m; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j)
            if (mask.at(i, j)) mx = std::fmax(mx, X[i * n + j]);
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            if (mask.at(i, j)) s += std::exp(X[i * n + j] - mx);
        out[static_cast<std::size_t>(i)] = mx + std::log(s);
    }
    Tensor y = make_result({m}, std::move(out), x.requires_grad());
    if (x.requires_grad()) {
        auto xn = x.ptr(), yn = y.ptr();
        Mask mk = mask;
        record(y, [xn, yn, mk, m, n] {
            auto& dX = ensure_grad(xn.get());
            const auto& dY = yn->grad;
            const auto& Y = yn->value;
            for (int i = 0; i < m; ++i) {
                if (dY[static_cast<std::size_t>(i)] == 0.0) continue;
                for (int j = 0; j < n; ++j) {
                    if (!mk.at(i, j)) continue;
                    dX[static_cast<std::size_t>(i) * n + j] +=
                        dY[static_cast<std::size_t>(i)] * std::exp(xn->value[i * n + j] - Y[i]);
                }
            }
        });
    }
    return y;
}

Tensor Graph::sum(const Tensor& x) {
    double s = 0.0;
    for (double v : x.value()) s += v;
    Tensor y = make_result({1}, {s}, x.requires_grad());
    if (x.requires_grad()) {
        auto xn = x.ptr(), yn = y.ptr();
        record(y, [xn, yn] {
            auto& dX = ensure_grad(xn.get());
            const double g = yn->grad[0];
            for (std::size_t i = 0; i < dX.size(); ++i) dX[i] += g;
        });
    }
    return y;
}

Tensor Graph::mean_rows(const Tensor& x) {
    if (x.rank() != 2) throw ShapeError("mean_rows requires a matrix, got " + shape_str(x.shape()));
    const int m = x.rows(), n = x.cols();
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] += x.value()[i * n + j];
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] /= m;
    Tensor y = make_result({1, n}, std::move(out), x.requires_grad());
    if (x.requires_grad()) {
        auto xn = x.ptr(), yn = y.ptr();
        record(y, [xn, yn, m, n] {
            auto& dX = ensure_grad(xn.get());
            const auto& dY = yn->grad;
            const double inv = 1.0 / m;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) dX[static_cast<std::size_t>(i) * n + j] += dY[j] * inv;
        });
    }
    return y;
}

Tensor Graph::layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
    if (x.rank() != 2) throw ShapeError("layer_norm requires a matrix, got " + shape_str(x.shape()));
    const int m = x.rows(), n = x.cols();
    if (gain.rank() != 1 || gain.shape()[0] != n || bias.rank() != 1 || bias.shape()[0] != n) {
        throw ShapeError("layer_norm gain/bias " + shape_str(gain.shape()) + "/" +
                         shape_str(bias.shape()) + " do not match " + shape_str(x.shape()));
    }
    std::vector<double> out(x.size());
    std::vector<double> xhat(x.size());
    std::vector<double> inv_std(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double* row = x.value().data() + static_cast<std::size_t>(i) * n;
        double mu = 0.0;
        for (int j = 0; j < n; ++j) mu += row[j];
        mu /= n;
        double var = 0.0;
        for (int j = 0; j < n; ++j) var += (row[j] - mu) * (row[j] - mu);
        var /= n;
        const double inv = 1.0 / std::sqrt(var + eps);
        inv_std[static_cast<std::size_t>(i)] = inv;
        for (int j = 0; j < n; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * n + j;
            xhat[k] = (row[j] - mu) * inv;
            out[k] = gain.value()[j] * xhat[k] + bias.value()[j];
        }
    }
    const bool rg = x.requires_grad() || gain.requires_grad() || bias.requires_grad();
    Tensor y = make_result(x.shape(), std::move(out), rg);
    if (rg) {
        auto xn = x.ptr(), gn = gain.ptr(), bn = bias.ptr(), yn = y.ptr();
        record(y, [xn, gn, bn, yn, xhat = std::move(xhat), inv_std = std::move(inv_std), m, n] {
            const auto& dY = yn->grad;
            if (gn->requires_grad) {
                auto& dG = ensure_grad(gn.get());
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < n; ++j)
                        dG[j] += dY[static_cast<std::size_t>(i) * n + j] *
                                 xhat[static_cast<std::size_t>(i) * n + j];
            }
            if (bn->requires_grad) {
                auto& dB = ensure_grad(bn.get());
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < n; ++j) dB[j] += dY[static_cast<std::size_t>(i) * n + j];
            }
            if (xn->requires_grad) {
                auto& dX = ensure_grad(xn.get());
                for (int i = 0; i < m; ++i) {
                    double g_mean = 0.0, gx_mean = 0.0;
                    for (int j = 0; j < n; ++j) {
                        const std::size_t k = static_cast<std::size_t>(i) * n + j;
                        const double g = dY[k] * gn->value[j];
                        g_mean += g;
                        gx_mean += g * xhat[k];
                    }
                    g_mean /= n;
                    gx_mean /= n;
                    for (int j = 0; j < n; ++j) {
                        const std::size_t k = static_cast<std::size_t>(i) * n + j;
                        const double g = dY[k] * gn->value[j];
                        dX[k] += inv_std[static_cast<std::size_t>(i)] *
                                 (g - g_mean - xhat[k] * gx_mean);
                    }
                }
            }
        });
    }
    return y;
}

Tensor Graph::embed_rows(const Tensor& table, const std::vector<int>& ids) {
    if (table.rank() != 2)
        throw ShapeError("embed_rows requires a matrix table, got " + shape_str(table.shape()));
    const int v = table.rows(), d = table.cols();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || ids[i] >= v) {
            throw InputError("token id " + std::to_string(ids[i]) + " at position " +
                             std::to_string(i) + " out of range [0, " + std::to_string(v) + ")");
        }
    }
    const int L = static_cast<int>(ids.size());
    std::vector<double> out(static_cast<std::size_t>(L) * d);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < d; ++j)
            out[static_cast<std::size_t>(i) * d + j] = table.value()[static_cast<std::size_t>(ids[i]) * d + j];
    Tensor y = make_result({L, d}, std::move(out), table.requires_grad());
    if (table.requires_grad()) {
        auto tn = table.ptr(), yn = y.ptr();
        record(y, [tn, yn, ids, d] {
            auto& dT = ensure_grad(tn.get());
            const auto& dY = yn->grad;
            for (std::size_t i = 0; i < ids.size(); ++i)
                for (int j = 0; j < d; ++j)
                    dT[static_cast<std::size_t>(ids[i]) * d + j] += dY[i * d + j];
        });
    }
    return y;
}

Tensor Graph::slice_cols(const Tensor& x, int begin, int end) {
    if (x.rank() != 2) throw ShapeError("slice_cols requires a matrix, got " + shape_str(x.shape()));
    const int m = x.rows(), n = x.cols();
    if (begin < 0 || end > n || begin >= end) {
        throw ShapeError("slice_cols [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") invalid for " + shape_str(x.shape()));
    }
    const int w = end - begin;
    std::vector<double> out(static_cast<std::size_t>(m) * w);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < w; ++j)
            out[static_cast<std::size_t>(i) * w + j] = x.value()[static_cast<std::size_t>(i) * n + begin + j];
    Tensor y = make_result({m, w}, std::move(out), x.requires_grad());
    if (x.requires_grad()) {
        auto xn = x.ptr(), yn = y.ptr();
        record(y, [xn, yn, m, n, w, begin] {
            auto& dX = ensure_grad(xn.get());
            const auto& dY = yn->grad;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < w; ++j)
                    dX[static_cast<std::size_t>(i) * n + begin + j] += dY[static_cast<std::size_t>(i) * w + j];
        });
    }
    return y;
}

Tensor Graph::concat_cols(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ShapeError("concat_cols requires at least one tensor");
    const int m = parts.front().rows();
    int total = 0;
    bool rg = false;
    for (const Tensor& p : parts) {
        if (p.rank() != 2 || p.rows() != m) {
            throw ShapeError("concat_cols row mismatch: " + shape_str(parts.front().shape()) +
                             " vs " + shape_str(p.shape()));
        }
        total += p.cols();
        rg = rg || p.requires_grad();
    }
    std::vector<double> out(static_cast<std::size_t>(m) * total);
    int off = 0;
    for (const Tensor& p : parts) {
        const int w = p.cols();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < w; ++j)
                out[static_cast<std::size_t>(i) * total + off + j] = p.value()[static_cast<std::size_t>(i) * w + j];
        off += w;
    }
    Tensor y = make_result({m, total}, std::move(out), rg);
    if (rg) {
        std::vector<std::shared_ptr<TensorData>> ins;
        ins.reserve(parts.size());
        for (const Tensor& p : parts) ins.push_back(p.ptr());
        auto yn = y.ptr();
        record(y, [ins, yn, m, total] {
            const auto& dY = yn->grad;
            int off = 0;
            for (const auto& in : ins) {
                const int w = in->shape[1];
                if (in->requires_grad) {
                    auto& dP = ensure_grad(in.get());
                    for (int i = 0; i < m; ++i)
                        for (int j = 0; j < w; ++j)
                            dP[static_cast<std::size_t>(i) * w + j] += dY[static_cast<std::size_t>(i) * total + off + j];
                }
                off += w;
            }
        });
    }
    return y;
}

Tensor Graph::pick(const Tensor& x, std::size_t flat_index) {
    if (flat_index >= x.size()) {
        throw InputError("pick index " + std::to_string(flat_index) + " out of range for " +
                         shape_str(x.shape()));
    }
    Tensor y = make_result({1}, {x.value()[flat_index]}, x.requires_grad());
    if (x.requires_grad()) {
        auto xn = x.ptr(), yn = y.ptr();
        record(y, [xn, yn, flat_index] {
            ensure_grad(xn.get())[flat_index] += yn->grad[0];
        });
    }
    return y;
}

void Graph::backward(const Tensor& loss) {
    if (!loss.defined() || loss.size() != 1) {
        throw ContractError("backward requires a scalar loss, got " +
                            (loss.defined() ? shape_str(loss.shape()) : std::string("<empty>")));
    }
    // Fresh adjoints for this sweep; leaf grads persist and accumulate.
    for (auto& s : steps_) s.out->grad.clear();
    ensure_grad(loss.node())[0] += 1.0;
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
        if (it->out->grad.empty()) continue;
        it->back();
    }
}

}  // namespace credal
