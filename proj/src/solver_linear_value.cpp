#include "solver_linear_value.hpp"

#include "error.hpp"
#include "lagrangian.hpp"
#include "numeric.hpp"
#include "solver_baseline.hpp"

#include <algorithm>
#include <future>
#include <cmath>
#include <sstream>

namespace bm {

double virtual_marginal_cost(double x, double theta, const ProblemSpec& spec) {
    const double f = spec.dist.pdf(theta);
    if (!(f > 0.0)) fail(ErrorCode::kInvalidArgument, "virtual_marginal_cost: density vanishes at this type");
    return spec.cost.psi_x(x, theta) + spec.cost.psi_x_theta(x, theta) * spec.dist.cdf(theta) / f;
}

namespace {

void check_not_degenerate(const ProblemSpec& spec) {
    const double k = spec.resource_value;
    if (k * spec.cost.psi_x(0.0, spec.dist.lo) >= 1.0) {
        std::ostringstream os;
        os << "resource value k = " << k << " makes even the most efficient type unprofitable; mechanism is degenerate";
        fail(ErrorCode::kDegenerate, os.str());
    }
}

MechanismSolution unconstrained(const ProblemSpec& spec, const std::vector<double>& theta) {
    const double k = spec.resource_value;
    const auto sched = core::build_schedule(spec.cost, spec.dist, theta, 0.0, k);
    auto sol = core::finish_solution(spec.cost, spec.dist, theta, sched, 0.0, k);
    sol.budget_binds = false;
    sol.budget_residual = sol.grid.t.front() - spec.budget;
    evaluate_outcome(sol, spec.dist, k);
    return sol;
}

}  // namespace

MechanismSolution solve_linear_value(const ProblemSpec& spec, const SolverConfig& cfg) {
    detail::require_continuous(spec, "solve_linear_value");
    const double k = spec.resource_value;
    if (k == 0.0) {
        auto sol = solve_baseline(spec, cfg);
        sol.variant = Variant::kLinearValue;
        return sol;
    }
    check_not_degenerate(spec);
    const auto theta = numeric::linspace(spec.dist.lo, spec.dist.hi, cfg.grid);
    auto free = unconstrained(spec, theta);
    free.variant = Variant::kLinearValue;
    free.method = "unconstrained";
    if (free.grid.t.front() <= spec.budget * (1.0 + 1e-10)) return free;

    auto sol = detail::solve_ex_post(spec.cost, spec.dist, spec.budget, k, cfg);
    sol.variant = Variant::kLinearValue;
    return sol;
}

NaiveOutcome naive_solution(const ProblemSpec& spec, const SolverConfig& cfg) {
    detail::require_continuous(spec, "naive_solution");
    const double k = spec.resource_value;
    if (!(k > 0.0)) fail(ErrorCode::kInvalidArgument, "naive_solution: k = 0 has no budget-free optimum");
    check_not_degenerate(spec);
    const auto theta = numeric::linspace(spec.dist.lo, spec.dist.hi, cfg.grid);

    NaiveOutcome out;
    auto free = unconstrained(spec, theta);
    free.variant = Variant::kLinearValue;
    free.method = "naive";
    if (free.grid.t.front() <= spec.budget) {
        out.solution = std::move(free);
        out.audit = audit_ic_ir(out.solution.grid, spec.cost, spec.budget);
        return out;
    }

    // Remove the options whose transfer exceeds the budget. The types that
    // wanted them take the best remaining option, which is the cap level.
    const auto& xn = free.grid.x;
    ScheduleGrid capped;
    capped.theta = theta;
    auto spend_at = [&](double cap) {
        capped.x.resize(xn.size());
        for (std::size_t i = 0; i < xn.size(); ++i) capped.x[i] = std::min(xn[i], cap);
        return normalization_value(capped, spec.cost) - spec.budget;
    };
    numeric::RootOptions opts;
    opts.x_tol = 1e-15;
    const auto cap = numeric::bisect(spend_at, 0.0, xn.front(), opts);
    if (!cap) fail(ErrorCode::kNoConvergence, "naive_solution: truncation level not bracketed");
    spend_at(*cap);

    MechanismSolution sol = free;
    sol.grid = transfers_from_schedule(capped, spec.cost);
    sol.x_bar = *cap;
    sol.budget_binds = true;
    sol.budget_residual = sol.grid.t.front() - spec.budget;
    auto crossing = [&](double th) {
        return core::separating_action(spec.cost, spec.dist, th, 0.0, k) - *cap;
    };
    sol.theta_hat = numeric::bisect(crossing, theta.front(), theta.back()).value_or(theta.front());
    std::fill(sol.rho.begin(), sol.rho.end(), 0.0);
    evaluate_outcome(sol, spec.dist, k);
    out.solution = std::move(sol);
    out.truncated = true;
    out.audit = audit_ic_ir(out.solution.grid, spec.cost, spec.budget);
    return out;
}

StaticsReport comparative_statics(const ProblemSpec& spec, const std::vector<double>& k_grid,
                                  const SolverConfig& cfg, std::vector<MechanismSolution>* solutions) {
    if (k_grid.size() < 3) fail(ErrorCode::kInvalidArgument, "comparative_statics: need at least 3 k values");
    std::vector<std::future<MechanismSolution>> jobs;
    for (double k : k_grid) {
        ProblemSpec s = spec;
        s.variant = Variant::kLinearValue;
        s.resource_value = k;
        jobs.push_back(std::async(std::launch::async, [s, cfg] { return solve_linear_value(s, cfg); }));
    }
    std::vector<MechanismSolution> solved;
    for (auto& j : jobs) solved.push_back(j.get());

    StaticsReport rep;
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        const double k = k_grid[i];
        const auto& sol = solved[i];
        StaticsRow row;
        row.k = k;
        row.x_bar = sol.x_bar;
        row.lambda = sol.lambda;
        row.theta_hat = sol.theta_hat;
        row.theta_tilde = sol.exclusion_threshold;
        row.x_top = sol.grid.x.back();
        row.objective = sol.objective;
        row.spend = sol.expected_spend;
        row.binds = sol.budget_binds && sol.lambda > 0.0;
        rep.rows.push_back(row);
        if (!row.binds) rep.non_binding.push_back(k);
    }
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        const auto& a = rep.rows[i - 1];
        const auto& b = rep.rows[i];
        if (!a.binds || !b.binds) continue;
        StaticsPair p;
        p.k_from = a.k;
        p.k_to = b.k;
        p.dx_bar = (b.x_bar - a.x_bar) / (b.k - a.k);
        p.dlambda = (b.lambda - a.lambda) / (b.k - a.k);
        p.x_bar_increases = p.dx_bar > 0.0;
        p.lambda_decreases = p.dlambda < 0.0;
        rep.pairs.push_back(p);
    }
    if (solutions) *solutions = std::move(solved);
    return rep;
}

}  // namespace bm
