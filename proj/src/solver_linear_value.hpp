#pragma once

#include "mechanism.hpp"

#include <vector>

namespace bm {

/// Marginal cost inflated by the marginal information rent.
double virtual_marginal_cost(double x, double theta, const ProblemSpec& spec);

MechanismSolution solve_linear_value(const ProblemSpec& spec, const SolverConfig& cfg = {});

/// Benchmark that ignores the budget when designing the schedule and then
/// runs out of money: the unconstrained menu is truncated at the option whose
/// transfer equals the budget, so every type still picks from an IC menu.
struct NaiveOutcome {
    MechanismSolution solution;
    AuditReport audit;
    bool truncated = false;
};

NaiveOutcome naive_solution(const ProblemSpec& spec, const SolverConfig& cfg = {});

struct StaticsRow {
    double k = 0.0;
    double x_bar = 0.0;
    double lambda = 0.0;
    double theta_hat = 0.0;
    std::optional<double> theta_tilde;
    double x_top = 0.0;  // action of the least efficient type
    double objective = 0.0;
    double spend = 0.0;
    bool binds = false;
};

struct StaticsPair {
    double k_from = 0.0;
    double k_to = 0.0;
    double dx_bar = 0.0;   // finite difference quotient
    double dlambda = 0.0;
    bool x_bar_increases = false;
    bool lambda_decreases = false;
};

struct StaticsReport {
    std::vector<StaticsRow> rows;
    std::vector<StaticsPair> pairs;   // consecutive binding pairs only
    std::vector<double> non_binding;  // k values excluded from the sign checks
};

/// Each k is solved on its own thread; `solutions` receives the schedules in k order.
StaticsReport comparative_statics(const ProblemSpec& spec, const std::vector<double>& k_grid,
                                  const SolverConfig& cfg = {}, std::vector<MechanismSolution>* solutions = nullptr);

}  // namespace bm
