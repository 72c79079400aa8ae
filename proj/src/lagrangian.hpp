#pragma once

#include "mechanism.hpp"
#include "model.hpp"

#include <optional>
#include <vector>

namespace bm::core {

/// Pointwise derivative of the Lagrangian in x for a separated type, with
/// budget multiplier `lambda` and per-unit resource value `k`. Written
/// without dividing by f so vanishing densities are harmless.
double separating_residual(const CostModel& cost, const TypeDistribution& dist, double x, double theta,
                           double lambda, double k);

/// Root in x of separating_residual, or 0 when the residual is already
/// nonpositive at x = 0 (the type is excluded).
double separating_action(const CostModel& cost, const TypeDistribution& dist, double theta, double lambda,
                         double k, std::optional<double> guess = std::nullopt);

/// Action that is optimal for a pooled block [lo, theta]: root in x of
/// F(theta)(1 - k psi_x) - lambda psi_x.
double pooled_action(const CostModel& cost, const TypeDistribution& dist, double theta, double lambda, double k);

/// Costate of the monotonicity constraint on a pooled block at level x_bar.
double pooled_costate(const CostModel& cost, const TypeDistribution& dist, double x_bar, double theta,
                      double lambda, double k);

struct CoreSchedule {
    std::vector<double> x;
    std::vector<double> rho;
    std::vector<double> w;
    double theta_hat = 0.0;
    double x_bar = 0.0;
    bool complete_pooling = false;
    std::optional<double> exclusion_threshold;
};

/// Pointwise-optimal schedule on `theta` for fixed multipliers. With
/// lambda > 0 the lowest types are pooled up to the smooth-pasting point.
/// Throws RegularityViolated if the result is not monotone or the pooled
/// costate turns negative.
CoreSchedule build_schedule(const CostModel& cost, const TypeDistribution& dist, const std::vector<double>& theta,
                            double lambda, double k);

/// Complete-pooling test: pooled level exhausting the budget at the highest
/// type, and whether the implied costate is nonnegative on the grid.
struct PoolingTest {
    bool pools_all = false;
    double x_bar = 0.0;
    double lambda = 0.0;
};

PoolingTest complete_pooling_test(const CostModel& cost, const TypeDistribution& dist,
                                  const std::vector<double>& theta, double budget, double k);

/// Level x with psi(x, theta) = target.
double action_for_cost(const CostModel& cost, double theta, double target);

/// Finds lambda > 0 such that the lowest type's transfer equals the budget.
MechanismSolution shoot_budget(const CostModel& cost, const TypeDistribution& dist, double budget, double k,
                               const SolverConfig& cfg, double lambda_guess);

/// Assembles a solution record (transfers, residuals) from a core schedule.
MechanismSolution finish_solution(const CostModel& cost, const TypeDistribution& dist,
                                  const std::vector<double>& theta, const CoreSchedule& sched, double lambda,
                                  double k);

}  // namespace bm::core
