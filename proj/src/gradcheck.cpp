#include "credal/gradcheck.hpp"

#include <cmath>

namespace credal {

static double evaluate_at(const std::function<Tensor(Graph&, const Tensor&)>& f,
                          const Shape& shape, const std::vector<double>& x) {
    Graph g;
    Tensor leaf = Tensor::constant(shape, x);
    return f(g, leaf).item();
}

FiniteDiffReport finite_difference_check(const std::function<Tensor(Graph&, const Tensor&)>& f,
                                         const Shape& shape, const std::vector<double>& x0,
                                         double h) {
    Tensor leaf = Tensor::variable(shape, x0);
    Graph g;
    Tensor loss = f(g, leaf);
    if (loss.size() != 1) {
        throw ContractError("finite_difference_check objective must be scalar, got " +
                            shape_str(loss.shape()));
    }
    g.backward(loss);
    const std::vector<double> analytic = leaf.grad();

    FiniteDiffReport rep;
    std::vector<double> x = x0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = x[i];
        x[i] = keep + h;
        const double fp = evaluate_at(f, shape, x);
        x[i] = keep - h;
        const double fm = evaluate_at(f, shape, x);
        x[i] = keep;
        const double numeric = (fp - fm) / (2.0 * h);
        const double rel =
            std::fabs(analytic[i] - numeric) / (std::fabs(analytic[i]) + std::fabs(numeric) + 1e-12);
        if (rel > rep.max_rel_error) {
            rep.max_rel_error = rel;
            rep.worst_index = i;
            rep.analytic_at_worst = analytic[i];
            rep.numeric_at_worst = numeric;
        }
    }
    return rep;
}

}  // namespace credal
