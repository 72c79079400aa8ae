#include "solver_separable.hpp"

#include "error.hpp"
#include "lagrangian.hpp"
#include "numeric.hpp"
#include "solver_baseline.hpp"

#include <algorithm>
#include <future>
#include <cmath>

namespace bm {

namespace {

double cross(double ox, double oy, double ax, double ay, double bx, double by) {
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

// Moves a chord endpoint from its grid position to the exact tangency point
// of `gap`, searching a widening window around the grid guess.
double refine_endpoint(const std::function<double(double)>& gap, double guess, double lo_limit, double hi_limit,
                       double h) {
    for (double w = 2.0 * h; w <= 128.0 * h; w *= 2.0) {
        const double lo = std::max(lo_limit, guess - w);
        const double hi = std::min(hi_limit, guess + w);
        if (!(lo < hi)) break;
        if (auto r = numeric::safeguarded_newton(gap, lo, hi, guess)) return *r;
    }
    return guess;
}

}  // namespace

double ConcaveEnvelope::f_tilde_at(double th, const TypeDistribution& dist) const {
    for (const auto& c : chords)
        if (th > c.a && th <= c.b) return c.slope;
    return dist.pdf(th);
}

double ConcaveEnvelope::pooling_end() const {
    if (!chords.empty() && chords.front().a == 0.0) return chords.front().b;
    return theta.size() > 1 ? theta[1] : 0.0;
}

ConcaveEnvelope concave_majorant(const TypeDistribution& dist, std::size_t grid_size) {
    if (grid_size < 64) fail(ErrorCode::kInvalidArgument, "concave_majorant: grid_size must be >= 64");
    if (dist.is_discrete()) fail(ErrorCode::kInvalidArgument, "concave_majorant: continuous distribution required");
    if (!(dist.lo >= 0.0)) fail(ErrorCode::kInvalidArgument, "concave_majorant: support must be nonnegative");
    ConcaveEnvelope env;
    env.theta = numeric::linspace(0.0, dist.hi, grid_size);
    env.F.resize(grid_size);
    for (std::size_t j = 0; j < grid_size; ++j) env.F[j] = env.theta[j] < dist.lo ? 0.0 : dist.cdf(env.theta[j]);
    env.F.back() = 1.0;

    std::vector<std::size_t> hull;
    for (std::size_t j = 0; j < grid_size; ++j) {
        while (hull.size() >= 2) {
            const auto o = hull[hull.size() - 2];
            const auto a = hull.back();
            const double c = cross(env.theta[o], env.F[o], env.theta[a], env.F[a], env.theta[j], env.F[j]);
            if (c >= -1e-15 * (env.theta[j] - env.theta[o])) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(j);
    }

    env.cav.resize(grid_size);
    env.f_tilde.resize(grid_size);
    for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
        const auto a = hull[s];
        const auto b = hull[s + 1];
        const double slope = (env.F[b] - env.F[a]) / (env.theta[b] - env.theta[a]);
        for (std::size_t j = a; j <= b; ++j) {
            env.cav[j] = env.F[a] + slope * (env.theta[j] - env.theta[a]);
            if (j > a) env.f_tilde[j] = slope;
        }
        if (a == 0) env.f_tilde[0] = slope;
        if (b - a >= 2) env.chords.push_back({env.theta[a], env.theta[b], slope});
    }

    const double h = env.theta[1] - env.theta[0];
    const double top = dist.hi;
    for (auto& c : env.chords) {
        const bool move_a = c.a > 0.0;
        const bool move_b = c.b < top;
        for (int pass = 0; pass < (move_a && move_b ? 20 : 1); ++pass) {
            if (move_b) {
                const double a = c.a;
                const double Fa = a < dist.lo ? 0.0 : dist.cdf(a);
                auto gap = [&](double b) { return dist.cdf(b) - Fa - dist.pdf(b) * (b - a); };
                c.b = refine_endpoint(gap, c.b, std::max(a + h, dist.lo), top, h);
            }
            if (move_a) {
                const double b = c.b;
                const double Fb = dist.cdf(b);
                auto gap = [&](double a) { return Fb - dist.cdf(a) - dist.pdf(a) * (b - a); };
                c.a = refine_endpoint(gap, c.a, dist.lo, b - h, h);
            }
        }
        const double Fa = c.a < dist.lo ? 0.0 : dist.cdf(c.a);
        c.slope = (dist.cdf(c.b) - Fa) / (c.b - c.a);
    }
    return env;
}

MechanismSolution solve_separable(const ProblemSpec& spec, const SolverConfig& cfg) {
    detail::require_continuous(spec, "solve_separable");
    if (!spec.cost.separable) fail(ErrorCode::kInvalidArgument, "solve_separable: cost is not separable");
    const auto& sep = *spec.cost.separable;
    if (!sep.strictly_convex) fail(ErrorCode::kInvalidArgument, "solve_separable: Gamma is not strictly convex");

    const auto env = concave_majorant(spec.dist, cfg.envelope_grid);
    const auto theta = numeric::linspace(spec.dist.lo, spec.dist.hi, cfg.grid);
    const std::size_t n = theta.size();
    std::vector<double> ft(n);
    for (std::size_t i = 0; i < n; ++i) ft[i] = env.f_tilde_at(theta[i], spec.dist);

    const double range = spec.dist.hi - spec.dist.lo;
    double theta_hat = std::min(env.pooling_end(), spec.dist.hi);
    const bool complete = theta_hat >= spec.dist.hi - 1e-12 * range;
    if (complete) theta_hat = spec.dist.hi;

    auto schedule_at = [&](double lambda) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = sep.gamma_prime_inverse(ft[i] / lambda);
        return x;
    };

    double lambda = 0.0;
    std::vector<double> x;
    int evals = 0;
    if (complete) {
        const double x_bar = core::action_for_cost(spec.cost, spec.dist.hi, spec.budget);
        lambda = ft.front() / sep.gamma_prime(x_bar);
        x.assign(n, x_bar);
    } else {
        ScheduleGrid g;
        g.theta = theta;
        auto spend = [&](double lam) {
            ++evals;
            g.x = schedule_at(lam);
            return normalization_value(g, spec.cost) - spec.budget;
        };
        double lo = 1.0;
        double hi = 1.0;
        for (int i = 0; spend(lo) <= 0.0; ++i) {
            if (i > 200) fail(ErrorCode::kNoConvergence, "separable: lambda bracket exhausted");
            lo /= 4.0;
        }
        for (int i = 0; spend(hi) > 0.0; ++i) {
            if (i > 200) fail(ErrorCode::kNoConvergence, "separable: lambda bracket exhausted");
            hi *= 4.0;
        }
        double best = hi;
        double best_gap = std::abs(spend(hi));
        for (int it = 0; it < cfg.max_bisection && best_gap > 1e-10 * spec.budget; ++it) {
            const double mid = std::sqrt(lo * hi);
            if (!(mid > lo && mid < hi)) break;
            const double s = spend(mid);
            if (std::abs(s) < best_gap) {
                best = mid;
                best_gap = std::abs(s);
            }
            (s > 0.0 ? lo : hi) = mid;
        }
        lambda = best;
        x = schedule_at(lambda);
    }

    core::CoreSchedule sched;
    sched.x = x;
    sched.theta_hat = theta_hat;
    sched.x_bar = x.front();
    sched.complete_pooling = complete;
    sched.rho.assign(n, 0.0);
    sched.w.assign(n, 0.0);
    for (std::size_t i = 0; i < n && theta[i] <= theta_hat; ++i)
        sched.rho[i] = core::pooled_costate(spec.cost, spec.dist, sched.x_bar, theta[i], lambda, 0.0);

    auto sol = core::finish_solution(spec.cost, spec.dist, theta, sched, lambda, 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] <= 0.0 || ft[i] <= 0.0) continue;
        worst = std::max(worst, std::abs(lambda * sep.gamma_prime(x[i]) - ft[i]) / ft[i]);
    }
    sol.foc_residual_max = worst;
    sol.variant = spec.variant;
    sol.method = "concavification";
    sol.budget_binds = true;
    sol.budget_residual = sol.grid.t.front() - spec.budget;
    sol.iterations = evals;
    evaluate_outcome(sol, spec.dist, 0.0);
    if (std::abs(sol.budget_residual) > cfg.tol * spec.budget)
        fail(ErrorCode::kNoConvergence, "separable: budget bisection did not reach tolerance");
    return sol;
}

ThresholdInvariance threshold_invariance_report(const ProblemSpec& spec, const std::vector<double>& budgets,
                                                const SolverConfig& cfg) {
    if (budgets.size() < 2) fail(ErrorCode::kInvalidArgument, "threshold_invariance_report: need >= 2 budgets");
    std::vector<std::future<MechanismSolution>> jobs;
    for (double T : budgets) {
        ProblemSpec s = spec;
        s.budget = T;
        jobs.push_back(std::async(std::launch::async, [s, cfg] { return solve_separable(s, cfg); }));
    }
    ThresholdInvariance rep;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < budgets.size(); ++i) {
        const auto sol = jobs[i].get();
        rep.budgets.push_back(budgets[i]);
        rep.theta_hat.push_back(sol.theta_hat);
        lo = std::min(lo, sol.theta_hat);
        hi = std::max(hi, sol.theta_hat);
    }
    rep.spread = hi - lo;
    return rep;
}

}  // namespace bm
