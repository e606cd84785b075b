#pragma once

#include <functional>
#include <vector>

#include "credal/graph.hpp"

namespace credal {

struct FiniteDiffReport {
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    double analytic_at_worst = 0.0;
    double numeric_at_worst = 0.0;
};

// Compares the tape gradient of a scalar objective against central finite
// differences. `f` must build the objective over the supplied leaf inside the
// supplied graph and be a pure function of the leaf values. Per-component
// relative error is |analytic - numeric| / (|analytic| + |numeric| + 1e-12);
// sensible step sizes are h in [1e-7, 1e-3].
FiniteDiffReport finite_difference_check(const std::function<Tensor(Graph&, const Tensor&)>& f,
                                         const Shape& shape, const std::vector<double>& x0,
                                         double h);

}  // namespace credal
