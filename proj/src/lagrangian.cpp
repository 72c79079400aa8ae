#include "lagrangian.hpp"

#include "error.hpp"
#include "numeric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bm::core {

double separating_residual(const CostModel& cost, const TypeDistribution& dist, double x, double theta,
                           double lambda, double k) {
    const double f = dist.pdf(theta);
    const double F = dist.cdf(theta);
    return f * (1.0 - k * cost.psi_x(x, theta)) - (lambda + k * F) * cost.psi_x_theta(x, theta);
}

double separating_action(const CostModel& cost, const TypeDistribution& dist, double theta, double lambda,
                         double k, std::optional<double> guess) {
    auto s = [&](double x) { return separating_residual(cost, dist, x, theta, lambda, k); };
    if (s(0.0) <= 0.0) return 0.0;
    const double start = std::max(1e-3, guess.value_or(1.0) * 1.5);
    const auto hi = numeric::expand_bracket(s, start, 1.0);
    if (!hi) {
        std::ostringstream os;
        os << "separating action unbounded at type " << theta << " (lambda = " << lambda << ")";
        fail(ErrorCode::kNoConvergence, os.str());
    }
    std::optional<double> g = guess;
    if (g && !(*g > 0.0 && *g < *hi)) g.reset();
    const auto root = numeric::safeguarded_newton(s, 0.0, *hi, g);
    if (!root) fail(ErrorCode::kNoConvergence, "separating action root not bracketed");
    return *root;
}

double pooled_action(const CostModel& cost, const TypeDistribution& dist, double theta, double lambda, double k) {
    const double F = dist.cdf(theta);
    auto g = [&](double x) {
        const double m = cost.psi_x(x, theta);
        return F * (1.0 - k * m) - lambda * m;
    };
    if (g(0.0) <= 0.0) return 0.0;
    const auto hi = numeric::expand_bracket(g, 1e-3, 1.0);
    if (!hi) fail(ErrorCode::kNoConvergence, "pooled action unbounded");
    const auto root = numeric::safeguarded_newton(g, 0.0, *hi);
    if (!root) fail(ErrorCode::kNoConvergence, "pooled action root not bracketed");
    return *root;
}

double pooled_costate(const CostModel& cost, const TypeDistribution& dist, double x_bar, double theta,
                      double lambda, double k) {
    const double m = cost.psi_x(x_bar, theta);
    return lambda * m - dist.cdf(theta) * (1.0 - k * m);
}

namespace {

// Positive while pooling up to `theta` is still too early; its first zero is
// the smooth-pasting point.
double pasting_gap(const CostModel& cost, const TypeDistribution& dist, double theta, double x_sep, double lambda,
                   double k) {
    return pooled_costate(cost, dist, x_sep, theta, lambda, k);
}

}  // namespace

CoreSchedule build_schedule(const CostModel& cost, const TypeDistribution& dist, const std::vector<double>& theta,
                            double lambda, double k) {
    const std::size_t n = theta.size();
    CoreSchedule out;
    std::vector<double> xs(n);
    std::optional<double> guess;
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = separating_action(cost, dist, theta[i], lambda, k, guess);
        if (xs[i] > 0.0) guess = xs[i];
    }

    std::size_t pooled_nodes = 0;  // nodes with theta <= theta_hat
    out.theta_hat = theta.front();
    out.x_bar = xs.front();
    if (lambda > 0.0) {
        std::size_t cross = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (pasting_gap(cost, dist, theta[i], xs[i], lambda, k) <= 0.0) {
                cross = i;
                break;
            }
        }
        if (cross == n) {
            out.complete_pooling = true;
            out.theta_hat = theta.back();
            out.x_bar = pooled_action(cost, dist, theta.back(), lambda, k);
            pooled_nodes = n;
        } else if (cross == 0) {
            out.theta_hat = theta.front();
            out.x_bar = xs.front();
            pooled_nodes = 1;
        } else {
            auto gap = [&](double th) {
                const double xsep = separating_action(cost, dist, th, lambda, k, xs[cross]);
                return pasting_gap(cost, dist, th, xsep, lambda, k);
            };
            const auto root = numeric::safeguarded_newton(gap, theta[cross - 1], theta[cross]);
            out.theta_hat = root.value_or(theta[cross]);
            out.x_bar = separating_action(cost, dist, out.theta_hat, lambda, k, xs[cross]);
            pooled_nodes = cross;
            if (theta[cross] <= out.theta_hat) pooled_nodes = cross + 1;
        }
    } else {
        pooled_nodes = 1;
    }

    out.x = xs;
    out.rho.assign(n, 0.0);
    for (std::size_t i = 0; i < pooled_nodes && i < n; ++i) {
        out.x[i] = out.x_bar;
        if (lambda > 0.0) out.rho[i] = pooled_costate(cost, dist, out.x_bar, theta[i], lambda, k);
    }

    out.w.assign(n, 0.0);
    for (std::size_t i = pooled_nodes; i < n; ++i) {
        if (out.x[i] > 0.0) continue;
        out.w[i] = std::max(0.0, -separating_residual(cost, dist, 0.0, theta[i], lambda, k));
        if (!out.exclusion_threshold) {
            double cut = theta[i];
            auto s0 = [&](double th) { return separating_residual(cost, dist, 0.0, th, lambda, k); };
            if (i > 0 && s0(theta[i - 1]) > 0.0) {
                if (auto r = numeric::safeguarded_newton(s0, theta[i - 1], theta[i])) cut = *r;
            }
            if (cut < theta.back() - 1e-12 * (theta.back() - theta.front())) out.exclusion_threshold = cut;
        }
    }

    // Regularity: the pointwise solution must be monotone and the pooled
    // costate nonnegative, otherwise interior ironing would be needed.
    const double x_slack = 1e-9 * std::max(1.0, out.x.front());
    for (std::size_t i = 1; i < n; ++i) {
        if (out.x[i] > out.x[i - 1] + x_slack) {
            std::ostringstream os;
            os << "schedule not monotone near type " << theta[i] << "; interior ironing required";
            fail(ErrorCode::kRegularityViolated, os.str());
        }
    }
    if (lambda > 0.0) {
        const double rho_tol = 1e-9 * std::max(1.0, std::abs(lambda * cost.psi_x(out.x_bar, theta.front())));
        for (std::size_t i = 0; i < n; ++i) {
            if (out.rho[i] < -rho_tol) {
                std::ostringstream os;
                os << "pooling costate negative at type " << theta[i] << "; interior ironing required";
                fail(ErrorCode::kRegularityViolated, os.str());
            }
        }
    }
    return out;
}

double action_for_cost(const CostModel& cost, double theta, double target) {
    if (target <= 0.0) return 0.0;
    auto g = [&](double x) { return cost.psi(x, theta) - target; };
    const auto hi = numeric::expand_bracket(g, 1.0, -1.0);
    if (!hi) fail(ErrorCode::kNoConvergence, "cost is bounded below the target; unbounded action demanded");
    const auto root = numeric::safeguarded_newton(g, 0.0, *hi);
    if (!root) fail(ErrorCode::kNoConvergence, "action_for_cost: root not bracketed");
    return *root;
}

PoolingTest complete_pooling_test(const CostModel& cost, const TypeDistribution& dist,
                                  const std::vector<double>& theta, double budget, double k) {
    PoolingTest res;
    const double top = theta.back();
    res.x_bar = action_for_cost(cost, top, budget);
    res.lambda = 1.0 / cost.psi_x(res.x_bar, top) - k;
    if (!(res.lambda > 0.0)) return res;
    const double tol = 1e-10 * std::max(1.0, res.lambda * cost.psi_x(res.x_bar, theta.front()));
    res.pools_all = true;
    for (double th : theta) {
        if (pooled_costate(cost, dist, res.x_bar, th, res.lambda, k) < -tol) {
            res.pools_all = false;
            break;
        }
    }
    return res;
}

MechanismSolution finish_solution(const CostModel& cost, const TypeDistribution& dist,
                                  const std::vector<double>& theta, const CoreSchedule& sched, double lambda,
                                  double k) {
    MechanismSolution sol;
    ScheduleGrid g;
    g.theta = theta;
    g.x = sched.x;
    sol.grid = transfers_from_schedule(g, cost);
    sol.rho = sched.rho;
    sol.exclusion_w = sched.w;
    sol.lambda = lambda;
    sol.resource_value = k;
    sol.theta_hat = sched.theta_hat;
    sol.x_bar = sched.x_bar;
    sol.exclusion_threshold = sched.exclusion_threshold;
    sol.complete_pooling = sched.complete_pooling;

    double f_max = 0.0;
    for (double th : theta) f_max = std::max(f_max, dist.pdf(th));
    double worst = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (theta[i] <= sched.theta_hat || sched.x[i] <= 0.0) continue;
        const double f = dist.pdf(theta[i]);
        if (f <= 1e-12 * f_max) continue;
        worst = std::max(worst, std::abs(separating_residual(cost, dist, sched.x[i], theta[i], lambda, k)) / f);
    }
    if (lambda > 0.0)
        worst = std::max(worst, std::abs(pooled_costate(cost, dist, sched.x_bar, sched.theta_hat, lambda, k)));
    sol.foc_residual_max = worst;

    if (lambda > 0.0 && sched.theta_hat > theta.front() && sched.theta_hat < theta.back()) {
        const double m = cost.psi_x(sched.x_bar, sched.theta_hat);
        const double lhs = cost.psi_x_theta(sched.x_bar, sched.theta_hat) / (m * (1.0 - k * m));
        sol.threshold_residual = std::abs(lhs - dist.pdf(sched.theta_hat) / dist.cdf(sched.theta_hat));
    }
    return sol;
}

MechanismSolution shoot_budget(const CostModel& cost, const TypeDistribution& dist, double budget, double k,
                               const SolverConfig& cfg, double lambda_guess) {
    const auto theta = numeric::linspace(dist.lo, dist.hi, cfg.grid);
    int evals = 0;
    auto spend_at = [&](double lambda) {
        ++evals;
        const auto sched = build_schedule(cost, dist, theta, lambda, k);
        ScheduleGrid g;
        g.theta = theta;
        g.x = sched.x;
        return normalization_value(g, cost);
    };

    double lam = (lambda_guess > 0.0 && std::isfinite(lambda_guess)) ? lambda_guess : 1.0;
    double lo = lam;
    double hi = lam;
    double spend_lo = spend_at(lam);
    double spend_hi = spend_lo;
    // Spend falls as lambda rises; grow the bracket geometrically.
    for (int i = 0; spend_lo <= budget; ++i) {
        if (i > 200) fail(ErrorCode::kNoConvergence, "lambda bracket exhausted (lower end)");
        hi = lo;
        spend_hi = spend_lo;
        lo /= 4.0;
        spend_lo = spend_at(lo);
    }
    for (int i = 0; spend_hi > budget; ++i) {
        if (i > 200) fail(ErrorCode::kNoConvergence, "lambda bracket exhausted (upper end)");
        lo = hi;
        spend_lo = spend_hi;
        hi *= 4.0;
        spend_hi = spend_at(hi);
    }
    if (!(spend_lo > budget && spend_hi <= budget))
        fail(ErrorCode::kNoConvergence, "spend is not decreasing in lambda across the bracket");

    const double target = 1e-10 * budget;
    double best = hi;
    double best_gap = std::abs(spend_hi - budget);
    for (int it = 0; it < cfg.max_bisection && best_gap > target; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (!(mid > lo && mid < hi)) break;
        const double s = spend_at(mid);
        if (std::abs(s - budget) < best_gap) {
            best = mid;
            best_gap = std::abs(s - budget);
        }
        if (s > budget) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    const auto sched = build_schedule(cost, dist, theta, best, k);
    auto sol = finish_solution(cost, dist, theta, sched, best, k);
    sol.budget_residual = sol.grid.t.front() - budget;
    sol.iterations = evals;
    if (std::abs(sol.budget_residual) > cfg.tol * budget)
        fail(ErrorCode::kNoConvergence, "budget bisection did not reach tolerance");
    return sol;
}

}  // namespace bm::core
