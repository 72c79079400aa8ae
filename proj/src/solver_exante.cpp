#include "solver_exante.hpp"

#include "error.hpp"
#include "lagrangian.hpp"
#include "numeric.hpp"
#include "solver_baseline.hpp"

#include <cmath>

namespace bm {

MechanismSolution solve_exante(const ProblemSpec& spec, const SolverConfig& cfg) {
    detail::require_continuous(spec, "solve_exante");
    const auto theta = numeric::linspace(spec.dist.lo, spec.dist.hi, cfg.grid);
    const double budget = spec.budget;
    int evals = 0;

    auto solve_at = [&](double mu) {
        ++evals;
        const auto sched = core::build_schedule(spec.cost, spec.dist, theta, 0.0, mu);
        auto sol = core::finish_solution(spec.cost, spec.dist, theta, sched, 0.0, mu);
        evaluate_outcome(sol, spec.dist, 0.0);
        return sol;
    };
    auto spend_at = [&](double mu) { return solve_at(mu).expected_spend; };

    double lo = 1.0;
    double hi = 1.0;
    double s_lo = spend_at(lo);
    double s_hi = s_lo;
    for (int i = 0; s_lo <= budget; ++i) {
        if (i > 200) fail(ErrorCode::kNoConvergence, "ex-ante multiplier bracket exhausted (lower end)");
        hi = lo;
        s_hi = s_lo;
        lo /= 4.0;
        s_lo = spend_at(lo);
    }
    for (int i = 0; s_hi > budget; ++i) {
        if (i > 200) fail(ErrorCode::kNoConvergence, "ex-ante multiplier bracket exhausted (upper end)");
        lo = hi;
        s_lo = s_hi;
        hi *= 4.0;
        s_hi = spend_at(hi);
    }

    double best = hi;
    double best_gap = std::abs(s_hi - budget);
    for (int it = 0; it < cfg.max_bisection && best_gap > 1e-11 * budget; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (!(mid > lo && mid < hi)) break;
        const double s = spend_at(mid);
        if (std::abs(s - budget) < best_gap) {
            best = mid;
            best_gap = std::abs(s - budget);
        }
        (s > budget ? lo : hi) = mid;
    }

    auto sol = solve_at(best);
    sol.variant = Variant::kExAnte;
    sol.method = "shooting";
    sol.lambda = best;
    sol.resource_value = 0.0;
    sol.budget_binds = true;
    sol.budget_residual = sol.expected_spend - budget;
    sol.iterations = evals;
    if (std::abs(sol.budget_residual) > cfg.tol * budget)
        fail(ErrorCode::kNoConvergence, "ex-ante bisection did not reach tolerance");
    return sol;
}

}  // namespace bm
