#pragma once

#include "lagrangian.hpp"
#include "mechanism.hpp"

namespace bm {

core::PoolingTest check_complete_pooling(const ProblemSpec& spec, const SolverConfig& cfg = {});

MechanismSolution solve_baseline(const ProblemSpec& spec, const SolverConfig& cfg = {});

struct ThresholdResidual {
    bool interior = false;  // false means there is no interior threshold to test
    double residual = 0.0;
};

ThresholdResidual pooling_threshold_residual(const MechanismSolution& sol, const ProblemSpec& spec);

struct FocResidual {
    double max_pointwise_residual = 0.0;
    double highest_action_foc_residual = 0.0;
};

/// Recomputes the first-order conditions from the stored grid.
FocResidual verify_interior_foc(const MechanismSolution& sol, const ProblemSpec& spec);

namespace detail {

/// Shared by the baseline, linear-value and multi-agent paths: the budget
/// binds at the lowest type and `k` is the per-unit resource value.
MechanismSolution solve_ex_post(const CostModel& cost, const TypeDistribution& dist, double budget, double k,
                                const SolverConfig& cfg);

void require_continuous(const ProblemSpec& spec, const char* who);

}  // namespace detail

}  // namespace bm
