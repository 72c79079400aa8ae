#include "multi_agent.hpp"

#include "error.hpp"
#include "lagrangian.hpp"
#include "solver_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>

namespace bm {

MechanismSolution solve_multi_agent(const ProblemSpec& spec, const SolverConfig& cfg) {
    detail::require_continuous(spec, "solve_multi_agent");
    const auto dist = order_statistic_distribution(spec.dist, spec.agents);
    auto sol = detail::solve_ex_post(spec.cost, dist, spec.budget, 0.0, cfg);
    sol.variant = Variant::kMultiAgent;
    return sol;
}

std::vector<double> winner_weights(const std::vector<double>& probs) {
    const std::size_t n = probs.size();
    std::vector<double> tail(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) tail[i] = tail[i + 1] + probs[i];
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = tail[i] * tail[i] - tail[i + 1] * tail[i + 1];
    return w;
}

std::vector<double> win_probabilities(const std::vector<double>& probs, TieBreak tie) {
    const std::size_t n = probs.size();
    std::vector<double> above(n, 0.0);
    double s = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        above[i] = s;
        s += probs[i];
    }
    const double share = tie == TieBreak::kUniform ? 0.5 : 1.0;
    std::vector<double> W(n);
    for (std::size_t j = 0; j < n; ++j) W[j] = above[j] + share * probs[j];
    return W;
}

std::vector<double> example_probs(double delta, double p_top) {
    const double rest = 1.0 - p_top;
    return {(1.0 - delta) * rest, delta * rest, p_top};
}

namespace {

struct BicProblem {
    std::vector<double> types;
    std::vector<double> weight;  // objective weight per type
    std::vector<double> W;       // win probability per report
    const CostModel* cost = nullptr;
    double budget = 0.0;
    double x_cap = 0.0;
    std::size_t n = 0;

    std::size_t dim() const { return 2 * n; }
    double lower(std::size_t) const { return 0.0; }
    double upper(std::size_t k) const { return k < n ? x_cap : budget; }

    // Constraint values g >= 0: all ordered BIC pairs, then IR.
    void constraints(const std::vector<double>& z, std::vector<double>& g) const {
        g.clear();
        const double* x = z.data();
        const double* t = z.data() + n;
        for (std::size_t i = 0; i < n; ++i) {
            const double own = W[i] * (t[i] - cost->psi(x[i], types[i]));
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) g.push_back(own - W[j] * (t[j] - cost->psi(x[j], types[i])));
        }
        for (std::size_t i = 0; i < n; ++i) g.push_back(t[i] - cost->psi(x[i], types[i]));
    }

    // Augmented Lagrangian value and gradient for multipliers `mult`, penalty `rho`.
    double merit(const std::vector<double>& z, const std::vector<double>& mult, double rho,
                 std::vector<double>* grad) const {
        const double* x = z.data();
        const double* t = z.data() + n;
        double val = 0.0;
        if (grad) grad->assign(dim(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            val -= weight[i] * x[i];
            if (grad) (*grad)[i] -= weight[i];
        }
        std::size_t c = 0;
        auto add = [&](double g, auto&& grad_fn) {
            const double m = mult[c++];
            if (m - rho * g > 0.0) {
                val += -m * g + 0.5 * rho * g * g;
                if (grad) grad_fn(-m + rho * g);
            } else {
                val -= 0.5 * m * m / rho;
            }
        };
        for (std::size_t i = 0; i < n; ++i) {
            const double own = W[i] * (t[i] - cost->psi(x[i], types[i]));
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double g = own - W[j] * (t[j] - cost->psi(x[j], types[i]));
                add(g, [&](double s) {
                    (*grad)[i] += s * (-W[i] * cost->psi_x(x[i], types[i]));
                    (*grad)[n + i] += s * W[i];
                    (*grad)[j] += s * (W[j] * cost->psi_x(x[j], types[i]));
                    (*grad)[n + j] += s * (-W[j]);
                });
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double g = t[i] - cost->psi(x[i], types[i]);
            add(g, [&](double s) {
                (*grad)[n + i] += s;
                (*grad)[i] += s * (-cost->psi_x(x[i], types[i]));
            });
        }
        return val;
    }

    void project(std::vector<double>& z) const {
        for (std::size_t k = 0; k < dim(); ++k) z[k] = std::clamp(z[k], lower(k), upper(k));
    }
};

// Projected quasi-Newton minimization of the merit function over the box.
void minimize_box(const BicProblem& P, std::vector<double>& z, const std::vector<double>& mult, double rho,
                  int max_iter) {
    const std::size_t d = P.dim();
    std::vector<double> H(d * d, 0.0);
    auto reset = [&] {
        std::fill(H.begin(), H.end(), 0.0);
        for (std::size_t k = 0; k < d; ++k) H[k * d + k] = 1.0;
    };
    reset();
    std::vector<double> g, g_new, dir(d), z_new(d), s(d), y(d);
    double f = P.merit(z, mult, rho, &g);
    for (int it = 0; it < max_iter; ++it) {
        std::vector<bool> active(d, false);
        double pg = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double step = std::clamp(z[k] - g[k], P.lower(k), P.upper(k)) - z[k];
            pg = std::max(pg, std::abs(step));
            active[k] = (z[k] <= P.lower(k) && g[k] > 0.0) || (z[k] >= P.upper(k) && g[k] < 0.0);
        }
        if (pg < 1e-13) break;

        double slope = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            double v = 0.0;
            if (!active[a])
                for (std::size_t b = 0; b < d; ++b)
                    if (!active[b]) v -= H[a * d + b] * g[b];
            dir[a] = v;
            slope += v * g[a];
        }
        if (!(slope < 0.0)) {
            reset();
            slope = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
                dir[a] = active[a] ? 0.0 : -g[a];
                slope += dir[a] * g[a];
            }
            if (!(slope < 0.0)) break;
        }

        double alpha = 1.0;
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t k = 0; k < d; ++k) z_new[k] = z[k] + alpha * dir[k];
            P.project(z_new);
            double decrease = 0.0;
            for (std::size_t k = 0; k < d; ++k) decrease += g[k] * (z_new[k] - z[k]);
            f_new = P.merit(z_new, mult, rho, nullptr);
            if (f_new <= f + 1e-4 * decrease) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
        P.merit(z_new, mult, rho, &g_new);

        double sy = 0.0, ss = 0.0, yy = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            s[k] = z_new[k] - z[k];
            y[k] = g_new[k] - g[k];
            sy += s[k] * y[k];
            ss += s[k] * s[k];
            yy += y[k] * y[k];
        }
        if (sy > 1e-12 * std::sqrt(ss * yy)) {
            // Inverse BFGS update: H <- (I - r s y')H(I - r y s') + r s s'.
            const double r = 1.0 / sy;
            std::vector<double> Hy(d, 0.0);
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b) Hy[a] += H[a * d + b] * y[b];
            double yHy = 0.0;
            for (std::size_t a = 0; a < d; ++a) yHy += y[a] * Hy[a];
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b)
                    H[a * d + b] += -r * (Hy[a] * s[b] + s[a] * Hy[b]) + (r * r * yHy + r) * s[a] * s[b];
        }
        const double change = std::sqrt(ss);
        z = z_new;
        g = g_new;
        const double prev = f;
        f = f_new;
        if (change < 1e-15 && std::abs(prev - f) < 1e-16) break;
    }
}

std::vector<double> augmented_lagrangian(const BicProblem& P, std::vector<double> z, const BicConfig& cfg) {
    std::vector<double> g;
    P.constraints(z, g);
    std::vector<double> mult(g.size(), 0.0);
    double rho = 10.0;
    double prev_violation = std::numeric_limits<double>::infinity();
    P.project(z);
    for (int outer = 0; outer < cfg.max_outer; ++outer) {
        minimize_box(P, z, mult, rho, cfg.max_inner);
        P.constraints(z, g);
        double violation = 0.0;
        for (std::size_t c = 0; c < g.size(); ++c) {
            violation = std::max(violation, std::max(0.0, -g[c]));
            mult[c] = std::max(0.0, mult[c] - rho * g[c]);
        }
        if (violation < 1e-12 && outer > 2) break;
        if (violation > 0.25 * prev_violation) rho = std::min(rho * 10.0, 1e10);
        prev_violation = violation;
    }
    return z;
}

// Largest transfers supporting the actions x: u_i = W_i t_i satisfies a
// system of difference constraints, solved by Bellman-Ford from a source
// carrying the budget caps.
std::optional<std::vector<double>> max_transfers(const BicProblem& P, const std::vector<double>& x) {
    const std::size_t n = P.n;
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = P.W[i] * P.budget;
    for (std::size_t round = 0; round <= n; ++round) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const double own = P.W[i] * P.cost->psi(x[i], P.types[i]);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double bound = u[i] + P.W[j] * P.cost->psi(x[j], P.types[i]) - own;
                if (u[j] > bound + 1e-15 * std::max(1.0, std::abs(bound))) {
                    u[j] = bound;
                    changed = true;
                }
            }
        }
        if (!changed) break;
        if (round == n) return std::nullopt;
    }
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = P.W[i] > 0.0 ? u[i] / P.W[i] : P.budget;
    return t;
}

void audit(const BicProblem& P, DiscreteMechanism& m) {
    const std::size_t n = P.n;
    m.max_ic_violation = 0.0;
    m.max_ir_violation = 0.0;
    m.max_budget_violation = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double own = P.W[i] * (m.t[i] - P.cost->psi(m.x[i], P.types[i]));
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                m.max_ic_violation = std::max(m.max_ic_violation,
                                              P.W[j] * (m.t[j] - P.cost->psi(m.x[j], P.types[i])) - own);
        m.max_ir_violation = std::max(m.max_ir_violation, P.cost->psi(m.x[i], P.types[i]) - m.t[i]);
        m.max_budget_violation = std::max({m.max_budget_violation, m.t[i] - P.budget, -m.t[i]});
    }
    const double tol = 1e-8 * std::max(1.0, P.budget);
    m.feasible = m.max_ic_violation <= tol && m.max_ir_violation <= tol && m.max_budget_violation <= tol;
    m.objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) m.objective += P.weight[i] * m.x[i];
}

DiscreteMechanism finish(const BicProblem& P, const std::vector<double>& z) {
    DiscreteMechanism m;
    m.types = P.types;
    m.win_probs = P.W;
    m.x.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(P.n));
    m.t.assign(z.begin() + static_cast<std::ptrdiff_t>(P.n), z.end());
    // Re-derive transfers exactly; shrink actions marginally if the local
    // solve left them a hair outside the feasible set.
    for (double shrink : {0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6}) {
        std::vector<double> x = m.x;
        for (double& v : x) v *= (1.0 - shrink);
        if (auto t = max_transfers(P, x)) {
            DiscreteMechanism trial = m;
            trial.x = x;
            trial.t = *t;
            audit(P, trial);
            if (trial.feasible) return trial;
        }
    }
    audit(P, m);
    return m;
}

}  // namespace

DiscreteMechanism solve_discrete_bic(const std::vector<double>& types, const std::vector<double>& probs,
                                     const CostModel& cost, double budget, const BicConfig& cfg) {
    if (types.size() < 2 || types.size() != probs.size())
        fail(ErrorCode::kInvalidArgument, "solve_discrete_bic: need >= 2 types with matching probabilities");
    if (budget < 0.0) fail(ErrorCode::kInvalidArgument, "solve_discrete_bic: negative budget");
    for (std::size_t i = 1; i < types.size(); ++i)
        if (!(types[i] > types[i - 1])) fail(ErrorCode::kInvalidArgument, "solve_discrete_bic: types must increase");
    double total = 0.0;
    for (double p : probs) {
        if (!(p > 0.0)) fail(ErrorCode::kInvalidArgument, "solve_discrete_bic: probabilities must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) fail(ErrorCode::kInvalidArgument, "solve_discrete_bic: probabilities must sum to 1");
    if (cfg.restarts < 1) fail(ErrorCode::kInvalidArgument, "solve_discrete_bic: need at least one restart");

    BicProblem P;
    P.types = types;
    P.n = types.size();
    P.weight = winner_weights(probs);
    P.W = win_probabilities(probs, cfg.tie_break);
    P.cost = &cost;
    P.budget = budget;
    P.x_cap = budget > 0.0 ? core::action_for_cost(cost, types.front(), budget) : 0.0;

    std::vector<std::future<DiscreteMechanism>> jobs;
    jobs.reserve(static_cast<std::size_t>(cfg.restarts));
    for (int r = 0; r < cfg.restarts; ++r) {
        jobs.push_back(std::async(std::launch::async, [&P, &cfg, r] {
            std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(r));
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            std::vector<double> z(P.dim());
            for (std::size_t k = 0; k < P.dim(); ++k) z[k] = P.upper(k) * unit(rng);
            return finish(P, augmented_lagrangian(P, std::move(z), cfg));
        }));
    }

    std::optional<DiscreteMechanism> best;
    int feasible_runs = 0;
    for (auto& job : jobs) {
        auto m = job.get();
        if (!m.feasible) continue;
        ++feasible_runs;
        if (!best || m.objective > best->objective + 1e-12) best = std::move(m);
    }
    if (!best) {
        // x = t = 0 is always feasible; report it rather than an infeasible incumbent.
        DiscreteMechanism zero;
        zero.types = types;
        zero.x.assign(P.n, 0.0);
        zero.t.assign(P.n, 0.0);
        zero.win_probs = P.W;
        audit(P, zero);
        zero.notes.push_back("no restart converged to a feasible point; returning the null mechanism");
        best = std::move(zero);
    }
    best->probs = probs;
    best->notes.push_back(std::to_string(feasible_runs) + "/" + std::to_string(cfg.restarts) +
                          " restarts ended feasible");
    return *best;
}

}  // namespace bm
