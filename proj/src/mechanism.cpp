#include "mechanism.hpp"

#include "numeric.hpp"

namespace bm {

double expected_value(const std::vector<double>& theta, const std::vector<double>& values,
                      const TypeDistribution& dist) {
    std::vector<double> weighted(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) weighted[i] = values[i] * dist.pdf(theta[i]);
    return numeric::trapezoid(theta, weighted);
}

void evaluate_outcome(MechanismSolution& sol, const TypeDistribution& dist, double resource_value) {
    const double mean_x = expected_value(sol.grid.theta, sol.grid.x, dist);
    sol.expected_spend = sol.grid.has_transfers() ? expected_value(sol.grid.theta, sol.grid.t, dist) : 0.0;
    sol.objective = mean_x - resource_value * sol.expected_spend;
}

}  // namespace bm
