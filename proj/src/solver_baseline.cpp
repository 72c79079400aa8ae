#include "solver_baseline.hpp"

#include "error.hpp"
#include "numeric.hpp"

#include <algorithm>
#include <cmath>

namespace bm {

namespace detail {

void require_continuous(const ProblemSpec& spec, const char* who) {
    validate_problem(spec);
    if (spec.dist.is_discrete())
        fail(ErrorCode::kInvalidArgument, std::string(who) + ": point-mass distributions go to the discrete oracle");
}

MechanismSolution solve_ex_post(const CostModel& cost, const TypeDistribution& dist, double budget, double k,
                                const SolverConfig& cfg) {
    const auto theta = numeric::linspace(dist.lo, dist.hi, cfg.grid);
    const auto test = core::complete_pooling_test(cost, dist, theta, budget, k);
    MechanismSolution sol;
    if (test.pools_all) {
        core::CoreSchedule sched;
        sched.x.assign(theta.size(), test.x_bar);
        sched.rho.resize(theta.size());
        for (std::size_t i = 0; i < theta.size(); ++i)
            sched.rho[i] = core::pooled_costate(cost, dist, test.x_bar, theta[i], test.lambda, k);
        sched.w.assign(theta.size(), 0.0);
        sched.theta_hat = theta.back();
        sched.x_bar = test.x_bar;
        sched.complete_pooling = true;
        sol = core::finish_solution(cost, dist, theta, sched, test.lambda, k);
        sol.budget_residual = sol.grid.t.front() - budget;
    } else {
        const double guess = test.lambda > 0.0 ? test.lambda : 1.0;
        sol = core::shoot_budget(cost, dist, budget, k, cfg, guess);
    }
    sol.budget_binds = true;
    sol.method = "shooting";
    evaluate_outcome(sol, dist, k);
    return sol;
}

}  // namespace detail

core::PoolingTest check_complete_pooling(const ProblemSpec& spec, const SolverConfig& cfg) {
    detail::require_continuous(spec, "check_complete_pooling");
    const auto theta = numeric::linspace(spec.dist.lo, spec.dist.hi, cfg.grid);
    return core::complete_pooling_test(spec.cost, spec.dist, theta, spec.budget, 0.0);
}

MechanismSolution solve_baseline(const ProblemSpec& spec, const SolverConfig& cfg) {
    detail::require_continuous(spec, "solve_baseline");
    auto sol = detail::solve_ex_post(spec.cost, spec.dist, spec.budget, 0.0, cfg);
    sol.variant = Variant::kBaseline;
    return sol;
}

namespace {

struct CoreMultipliers {
    double lambda;
    double k;
};

CoreMultipliers core_multipliers(const MechanismSolution& sol) {
    if (sol.variant == Variant::kExAnte) return {0.0, sol.lambda};
    return {sol.lambda, sol.resource_value};
}

TypeDistribution effective_distribution(const ProblemSpec& spec) {
    if (spec.variant == Variant::kMultiAgent) return order_statistic_distribution(spec.dist, spec.agents);
    return spec.dist;
}

}  // namespace

ThresholdResidual pooling_threshold_residual(const MechanismSolution& sol, const ProblemSpec& spec) {
    ThresholdResidual out;
    const auto& g = sol.grid;
    if (sol.complete_pooling || !(sol.theta_hat > g.theta.front()) || !(sol.theta_hat < g.theta.back()))
        return out;
    const auto dist = effective_distribution(spec);
    const auto m = core_multipliers(sol);
    const double th = sol.theta_hat;
    const double px = spec.cost.psi_x(sol.x_bar, th);
    const double lhs = spec.cost.psi_x_theta(sol.x_bar, th) / (px * (1.0 - m.k * px));
    out.interior = true;
    out.residual = std::abs(lhs - dist.pdf(th) / dist.cdf(th));
    return out;
}

FocResidual verify_interior_foc(const MechanismSolution& sol, const ProblemSpec& spec) {
    FocResidual out;
    const auto dist = effective_distribution(spec);
    const auto m = core_multipliers(sol);
    const auto& g = sol.grid;
    double f_max = 0.0;
    for (double th : g.theta) f_max = std::max(f_max, dist.pdf(th));
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.theta[i] <= sol.theta_hat || g.x[i] <= 0.0) continue;
        const double f = dist.pdf(g.theta[i]);
        if (f <= 1e-12 * f_max) continue;
        const double r = core::separating_residual(spec.cost, dist, g.x[i], g.theta[i], m.lambda, m.k) / f;
        out.max_pointwise_residual = std::max(out.max_pointwise_residual, std::abs(r));
    }
    if (m.lambda > 0.0)
        out.highest_action_foc_residual =
            std::abs(core::pooled_costate(spec.cost, dist, sol.x_bar, sol.theta_hat, m.lambda, m.k));
    return out;
}

}  // namespace bm
