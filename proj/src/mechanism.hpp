#pragma once

#include "feasibility.hpp"
#include "model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bm {

struct SolverConfig {
    std::size_t grid = 512;
    double tol = 1e-8;            // relative budget tolerance and FOC acceptance
    std::size_t envelope_grid = 2048;
    int max_bisection = 300;
};

struct MechanismSolution {
    Variant variant = Variant::kBaseline;
    std::string method;
    ScheduleGrid grid;
    std::vector<double> rho;          // costate on the pooled segment, 0 elsewhere
    std::vector<double> exclusion_w;  // multiplier on x >= 0, positive only where x = 0
    double lambda = 0.0;              // budget multiplier (expected-spend multiplier for ex-ante)
    double resource_value = 0.0;
    double theta_hat = 0.0;
    double x_bar = 0.0;
    std::optional<double> exclusion_threshold;
    bool complete_pooling = false;
    bool budget_binds = true;
    double budget_residual = 0.0;
    double foc_residual_max = 0.0;
    double threshold_residual = 0.0;
    double objective = 0.0;
    double expected_spend = 0.0;
    int iterations = 0;
};

/// Weighted integral of the schedule against the type density on its grid.
double expected_value(const std::vector<double>& theta, const std::vector<double>& values,
                      const TypeDistribution& dist);

/// Fills objective and expected spend; `resource_value` weights spend.
void evaluate_outcome(MechanismSolution& sol, const TypeDistribution& dist, double resource_value);

}  // namespace bm
