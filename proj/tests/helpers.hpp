#pragma once

#include "model.hpp"

#include <cmath>
#include <string>

namespace bm::testing {

inline CostModel make_cost(std::string family, CostFn psi, CostFn psi_x, CostFn psi_theta, CostFn psi_x_theta,
                           CostFn psi_xx) {
    CostModel c;
    c.family = std::move(family);
    c.psi = std::move(psi);
    c.psi_x = std::move(psi_x);
    c.psi_theta = std::move(psi_theta);
    c.psi_x_theta = std::move(psi_x_theta);
    c.psi_xx = std::move(psi_xx);
    return c;
}

// theta * x, linear in the action.
inline CostModel linear_cost() {
    return make_cost(
        "linear", [](double x, double th) { return th * x; }, [](double, double th) { return th; },
        [](double x, double) { return x; }, [](double, double) { return 1.0; }, [](double, double) { return 0.0; });
}

// x^2 / theta: decreasing in the type.
inline CostModel inverse_type_cost() {
    return make_cost(
        "inverse", [](double x, double th) { return x * x / th; }, [](double x, double th) { return 2 * x / th; },
        [](double x, double th) { return -x * x / (th * th); }, [](double x, double th) { return -2 * x / (th * th); },
        [](double, double th) { return 2 / th; });
}

// (3 - theta) x^2 + theta x: increasing in both arguments on [1, 2] but submodular for x > 1/2.
inline CostModel submodular_cost() {
    return make_cost(
        "submodular", [](double x, double th) { return (3 - th) * x * x + th * x; },
        [](double x, double th) { return 2 * (3 - th) * x + th; }, [](double x, double) { return x - x * x; },
        [](double x, double) { return 1 - 2 * x; }, [](double, double th) { return 2 * (3 - th); });
}

inline ProblemSpec quadratic_uniform(double budget) {
    ProblemSpec s;
    s.cost = power_cost(1.0, 2.0);
    s.dist = uniform_distribution(1.0, 2.0);
    s.budget = budget;
    return s;
}

inline ProblemSpec quadratic_decreasing(double budget) {
    ProblemSpec s;
    s.cost = power_cost(1.0, 2.0);
    s.dist = linear_density_distribution(1.0, 2.0, -2.0);
    s.budget = budget;
    return s;
}

}  // namespace bm::testing
