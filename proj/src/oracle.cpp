#include "oracle.hpp"

#include "error.hpp"
#include "lagrangian.hpp"
#include "numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bm {

namespace {

struct TypeSet {
    std::vector<double> theta;
    std::vector<double> p;
};

TypeSet discretize(const TypeDistribution& dist, std::size_t n) {
    TypeSet ts;
    if (dist.is_discrete()) {
        ts.theta = dist.atoms->types;
        ts.p = dist.atoms->probs;
        return ts;
    }
    const double h = (dist.hi - dist.lo) / static_cast<double>(n);
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double b = i + 1 == n ? dist.hi : dist.lo + h * static_cast<double>(i + 1);
        const double Fb = i + 1 == n ? 1.0 : dist.cdf(b);
        ts.theta.push_back(dist.lo + h * (static_cast<double>(i) + 0.5));
        ts.p.push_back(Fb - prev);
        prev = Fb;
    }
    return ts;
}

// Everything the DP needs about one discretized instance.
struct Instance {
    TypeSet types;
    std::vector<double> actions;
    // Per type i and action j: contribution to the ex-post budget (lowest
    // type's transfer) and to the expected transfer.
    std::vector<std::vector<double>> lowest_cost;
    std::vector<std::vector<double>> expected_cost;
    const CostModel* cost = nullptr;
    double k = 0.0;
    bool ex_ante = false;
    double budget = 0.0;

    std::size_t n() const { return types.theta.size(); }
    std::size_t m() const { return actions.size(); }
    const std::vector<std::vector<double>>& budget_cost() const { return ex_ante ? expected_cost : lowest_cost; }
};

void fill_costs(Instance& I) {
    const std::size_t n = I.n();
    const std::size_t m = I.m();
    const auto& th = I.types.theta;
    I.lowest_cost.assign(n, std::vector<double>(m));
    I.expected_cost.assign(n, std::vector<double>(m));
    double below = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double a = I.actions[j];
            const double own = I.cost->psi(a, th[i]);
            const double rent = i == 0 ? own : own - I.cost->psi(a, th[i - 1]);
            I.lowest_cost[i][j] = rent;
            I.expected_cost[i][j] = I.types.p[i] * own + (i == 0 ? 0.0 : below * rent);
        }
        below += I.types.p[i];
    }
}

struct DpResult {
    std::vector<std::size_t> index;
    double objective = 0.0;  // sum p a - k * expected transfer
    double budget_used = 0.0;
};

DpResult evaluate(const Instance& I, const std::vector<std::size_t>& idx) {
    DpResult r;
    r.index = idx;
    const auto& bc = I.budget_cost();
    for (std::size_t i = 0; i < I.n(); ++i) {
        r.objective += I.types.p[i] * I.actions[idx[i]] - I.k * I.expected_cost[i][idx[i]];
        r.budget_used += bc[i][idx[i]];
    }
    return r;
}

// Maximizes sum_i [p_i a_i - k e_i(a_i) - mu b_i(a_i)] over nonincreasing
// action indices. Ties resolve to the smaller action.
DpResult monotone_dp(const Instance& I, double mu) {
    const std::size_t n = I.n();
    const std::size_t m = I.m();
    const auto& bc = I.budget_cost();
    std::vector<double> best(m), suffix(m);
    std::vector<std::size_t> suffix_arg(m);
    std::vector<std::vector<std::size_t>> from(n, std::vector<std::size_t>(m, 0));
    auto value = [&](std::size_t i, std::size_t j) {
        return I.types.p[i] * I.actions[j] - I.k * I.expected_cost[i][j] - mu * bc[i][j];
    };
    for (std::size_t j = 0; j < m; ++j) best[j] = value(0, j);
    for (std::size_t i = 1; i < n; ++i) {
        suffix[m - 1] = best[m - 1];
        suffix_arg[m - 1] = m - 1;
        for (std::size_t j = m - 1; j-- > 0;) {
            if (best[j] >= suffix[j + 1]) {
                suffix[j] = best[j];
                suffix_arg[j] = j;
            } else {
                suffix[j] = suffix[j + 1];
                suffix_arg[j] = suffix_arg[j + 1];
            }
        }
        for (std::size_t j = 0; j < m; ++j) {
            best[j] = value(i, j) + suffix[j];
            from[i][j] = suffix_arg[j];
        }
    }
    std::size_t j = 0;
    for (std::size_t c = 1; c < m; ++c)
        if (best[c] > best[j]) j = c;
    std::vector<std::size_t> idx(n);
    for (std::size_t i = n; i-- > 0;) {
        idx[i] = j;
        if (i > 0) j = from[i][j];
    }
    return evaluate(I, idx);
}

struct LagrangianResult {
    DpResult dp;
    double mu = 0.0;
};

LagrangianResult lagrangian_search(const Instance& I) {
    const double T = I.budget;
    LagrangianResult out;
    if (!I.ex_ante && I.k > 0.0) {
        auto free = monotone_dp(I, 0.0);
        if (free.budget_used <= T) {
            out.dp = free;
            return out;
        }
    }
    double lo = 0.0;
    double hi = 1.0;
    DpResult at_hi = monotone_dp(I, hi);
    for (int i = 0; at_hi.budget_used > T; ++i) {
        if (i > 200) fail(ErrorCode::kNoConvergence, "oracle: multiplier bracket exhausted");
        lo = hi;
        hi *= 2.0;
        at_hi = monotone_dp(I, hi);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        auto r = monotone_dp(I, mid);
        if (r.budget_used <= T) {
            hi = mid;
            at_hi = std::move(r);
        } else {
            lo = mid;
        }
    }
    out.dp = at_hi;
    out.mu = hi;
    return out;
}

struct Continuous {
    std::vector<double> x;
    double objective = 0.0;
    double budget_used = 0.0;
};

// Budget used when types [0, L) share action a and the rest keep x.
double budget_with_block(const Instance& I, std::size_t L, double a, double tail_budget) {
    const auto& th = I.types.theta;
    const auto& p = I.types.p;
    if (!I.ex_ante) return I.cost->psi(a, th[L - 1]) + tail_budget;
    double s = tail_budget;
    double below = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
        const double own = I.cost->psi(a, th[i]);
        s += p[i] * own + (i == 0 ? 0.0 : below * (own - I.cost->psi(a, th[i - 1])));
        below += p[i];
    }
    return s;
}

double expected_transfer_of(const Instance& I, const std::vector<double>& x) {
    const auto& th = I.types.theta;
    const auto& p = I.types.p;
    double s = 0.0;
    double below = 0.0;
    for (std::size_t i = 0; i < I.n(); ++i) {
        const double own = I.cost->psi(x[i], th[i]);
        s += p[i] * own + (i == 0 ? 0.0 : below * (own - I.cost->psi(x[i], th[i - 1])));
        below += p[i];
    }
    return s;
}

double lowest_transfer_of(const Instance& I, const std::vector<double>& x) {
    const auto& th = I.types.theta;
    double s = I.cost->psi(x[0], th[0]);
    for (std::size_t i = 1; i < I.n(); ++i) s += I.cost->psi(x[i], th[i]) - I.cost->psi(x[i], th[i - 1]);
    return s;
}

Continuous score(const Instance& I, std::vector<double> x) {
    Continuous c;
    double mean = 0.0;
    for (std::size_t i = 0; i < I.n(); ++i) mean += I.types.p[i] * x[i];
    const double et = expected_transfer_of(I, x);
    c.objective = mean - I.k * et;
    c.budget_used = I.ex_ante ? et : lowest_transfer_of(I, x);
    c.x = std::move(x);
    return c;
}

// Spends leftover budget continuously: for each prefix length L the first L
// types are pooled at the level that exhausts the budget; the best candidate
// (including the untouched input) wins.
Continuous budget_fill(const Instance& I, const std::vector<double>& x0, double x_hi) {
    const std::size_t n = I.n();
    const auto& th = I.types.theta;
    Continuous best = score(I, x0);
    // Suffix sums of the budget contribution of the untouched tail.
    std::vector<double> tail(n + 1, 0.0);
    {
        std::vector<double> below(n, 0.0);
        for (std::size_t i = 1; i < n; ++i) below[i] = below[i - 1] + I.types.p[i - 1];
        for (std::size_t i = n; i-- > 0;) {
            const double own = I.cost->psi(x0[i], th[i]);
            const double rent = i == 0 ? own : own - I.cost->psi(x0[i], th[i - 1]);
            const double b = I.ex_ante ? I.types.p[i] * own + below[i] * rent : rent;
            tail[i] = tail[i + 1] + b;
        }
    }
    for (std::size_t L = 1; L <= n; ++L) {
        const double floor = L < n ? x0[L] : 0.0;
        auto excess = [&](double a) { return budget_with_block(I, L, a, tail[L]) - I.budget; };
        if (excess(floor) > 0.0) continue;
        double top = std::max(x_hi, floor * 2.0 + 1e-9);
        for (int i = 0; excess(top) < 0.0 && i < 60; ++i) top *= 2.0;
        const auto a = numeric::safeguarded_newton(excess, floor, top);
        if (!a) continue;
        std::vector<double> x = x0;
        for (std::size_t i = 0; i < L; ++i) x[i] = *a;
        auto cand = score(I, std::move(x));
        if (cand.objective > best.objective + 1e-15) best = std::move(cand);
    }
    return best;
}

Instance make_instance(const ProblemSpec& spec, std::size_t n_types, std::size_t n_actions, double x_max) {
    Instance I;
    TypeDistribution dist = spec.dist;
    if (spec.variant == Variant::kMultiAgent && !dist.is_discrete())
        dist = order_statistic_distribution(dist, spec.agents);
    I.types = discretize(dist, n_types);
    I.actions = numeric::linspace(0.0, x_max, n_actions);
    I.cost = &spec.cost;
    I.k = spec.variant == Variant::kLinearValue ? spec.resource_value : 0.0;
    I.ex_ante = spec.variant == Variant::kExAnte;
    I.budget = spec.budget;
    fill_costs(I);
    return I;
}

double initial_x_max(const ProblemSpec& spec, const TypeSet& ts) {
    return core::action_for_cost(spec.cost, ts.theta.front(), spec.budget);
}

// Exact optimum of the discretized problem with budget costs rounded up to
// whole buckets: DP over (action of the previous type, buckets used).
double exact_budget_dp(const Instance& I, std::size_t buckets) {
    const std::size_t n = I.n();
    const std::size_t m = I.m();
    const double unit = I.budget / static_cast<double>(buckets);
    const auto& bc = I.budget_cost();
    const double neg = -std::numeric_limits<double>::infinity();
    const std::size_t B = buckets + 1;
    std::vector<double> V(m * B, neg), S(m * B, neg), next(m * B, neg);
    auto need = [&](std::size_t i, std::size_t j) -> std::size_t {
        const double c = bc[i][j] / unit;
        const double r = std::ceil(c - 1e-12);
        return r < 0.0 ? 0 : static_cast<std::size_t>(r);
    };
    auto value = [&](std::size_t i, std::size_t j) {
        return I.types.p[i] * I.actions[j] - I.k * I.expected_cost[i][j];
    };
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t c = need(0, j);
        if (c < B) V[j * B + c] = value(0, j);
    }
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t b = 0; b < B; ++b) {
            S[(m - 1) * B + b] = V[(m - 1) * B + b];
            for (std::size_t j = m - 1; j-- > 0;) S[j * B + b] = std::max(V[j * B + b], S[(j + 1) * B + b]);
        }
        std::fill(next.begin(), next.end(), neg);
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t c = need(i, j);
            if (c >= B) continue;
            const double v = value(i, j);
            for (std::size_t b = c; b < B; ++b) {
                const double prev = S[j * B + (b - c)];
                if (prev > neg) next[j * B + b] = std::max(next[j * B + b], prev + v);
            }
        }
        std::swap(V, next);
    }
    double best = neg;
    for (double v : V) best = std::max(best, v);
    return best;
}

}  // namespace

DiscreteMechanism brute_force_discrete(const ProblemSpec& spec, const OracleConfig& cfg) {
    validate_problem(spec);
    if (cfg.n_types > 2000 || cfg.n_actions > 2000)
        fail(ErrorCode::kInvalidArgument, "oracle: at most 2000 types and 2000 actions");
    if (cfg.n_types < 1 || cfg.n_actions < 2) fail(ErrorCode::kInvalidArgument, "oracle: grid too small");

    Instance I = make_instance(spec, cfg.n_types, cfg.n_actions, 1.0);
    double x_max = initial_x_max(spec, I.types);
    I = make_instance(spec, cfg.n_types, cfg.n_actions, x_max);
    LagrangianResult lag = lagrangian_search(I);
    // Under an expected-spend cap the lowest type can exceed the budget, so
    // widen the action range while the top action is in use.
    for (int grow = 0; I.ex_ante && lag.dp.index.front() + 1 == I.m() && grow < 20; ++grow) {
        x_max *= 2.0;
        I = make_instance(spec, cfg.n_types, cfg.n_actions, x_max);
        lag = lagrangian_search(I);
    }

    std::vector<double> x0(I.n());
    for (std::size_t i = 0; i < I.n(); ++i) x0[i] = I.actions[lag.dp.index[i]];
    const bool slack_budget = I.k > 0.0 && lag.mu == 0.0;
    Continuous filled = slack_budget ? score(I, x0) : budget_fill(I, x0, x_max);

    DiscreteMechanism m;
    m.types = I.types.theta;
    m.probs = I.types.p;
    m.x = filled.x;
    m.multiplier = lag.mu;
    m.lagrangian_objective = lag.dp.objective;
    m.objective = filled.objective;
    m.budget_used = filled.budget_used;

    // Discrete envelope transfers: the highest type gets zero rent.
    const std::size_t n = I.n();
    const auto& th = I.types.theta;
    m.t.assign(n, 0.0);
    double rent = 0.0;
    m.t[n - 1] = spec.cost.psi(m.x[n - 1], th[n - 1]);
    for (std::size_t i = n - 1; i-- > 0;) {
        rent += spec.cost.psi(m.x[i + 1], th[i + 1]) - spec.cost.psi(m.x[i + 1], th[i]);
        m.t[i] = rent + spec.cost.psi(m.x[i], th[i]);
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double own = m.t[i] - spec.cost.psi(m.x[i], th[i]);
        m.max_ir_violation = std::max(m.max_ir_violation, -own);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) m.max_ic_violation = std::max(m.max_ic_violation, m.t[j] - spec.cost.psi(m.x[j], th[i]) - own);
    }
    const double tol = 1e-8 * std::max(1.0, spec.budget);
    const double used = I.ex_ante ? expected_transfer_of(I, m.x) : m.t.front();
    m.max_budget_violation = std::max(0.0, used - spec.budget);
    m.feasible = m.max_ic_violation <= tol && m.max_ir_violation <= tol && m.max_budget_violation <= tol;

    if (cfg.exact_check && !spec.dist.is_discrete()) {
        Instance C = make_instance(spec, cfg.exact_types, cfg.exact_actions, x_max);
        const double exact = exact_budget_dp(C, cfg.exact_buckets);
        const double coarse_lag = lagrangian_search(C).dp.objective;
        m.exact_objective = exact;
        m.coarse_lagrangian = coarse_lag;
        m.duality_gap = exact - coarse_lag;
        const double step = C.actions[1] - C.actions[0];
        m.gap_warning = std::abs(m.duality_gap) > step;
        if (m.gap_warning) m.notes.push_back("Lagrangian and exact budget DP differ by more than one action step");
    }
    return m;
}

SubsidyOutcome linear_subsidy_outcome(const ProblemSpec& spec, double rate, std::size_t grid) {
    validate_problem(spec);
    if (!(rate > 0.0)) fail(ErrorCode::kInvalidArgument, "linear subsidy: rate must be positive");
    if (spec.dist.is_discrete()) fail(ErrorCode::kInvalidArgument, "linear subsidy: continuous distribution required");
    SubsidyOutcome out;
    out.rate = rate;
    out.cap = spec.budget / rate;
    ScheduleGrid g;
    g.theta = numeric::linspace(spec.dist.lo, spec.dist.hi, grid);
    g.x.resize(grid);
    for (std::size_t i = 0; i < grid; ++i) {
        const double th = g.theta[i];
        auto excess = [&](double x) { return spec.cost.psi_x(x, th) - rate; };
        double x = 0.0;
        if (excess(0.0) < 0.0) {
            if (excess(out.cap) <= 0.0) {
                x = out.cap;
            } else {
                x = numeric::safeguarded_newton(excess, 0.0, out.cap).value_or(out.cap);
            }
        }
        g.x[i] = std::min(x, out.cap);
    }
    const double at_cap = out.cap * (1.0 - 1e-12);
    for (std::size_t i = 0; i < grid && g.x[i] >= at_cap; ++i) {
        out.has_cap_run = true;
        out.cap_run_end = i;
    }
    out.schedule = transfers_from_schedule(g, spec.cost);
    out.spend_normalization = out.schedule.t.front();
    return out;
}

DominanceResult dominance_check(const ProblemSpec& spec, double rate, std::size_t grid) {
    DominanceResult res;
    res.base = linear_subsidy_outcome(spec, rate, grid);
    res.slack = spec.budget - res.base.spend_normalization;
    if (!(res.slack > 0.0))
        fail(ErrorCode::kInvalidArgument,
             "dominance_check: linear subsidy already exhausts the budget; the instance violates the premises");

    const auto& base = res.base.schedule;
    ScheduleGrid g;
    g.theta = base.theta;
    auto excess = [&](double a) {
        g.x = base.x;
        for (auto& x : g.x) x = std::max(x, a);
        return normalization_value(g, spec.cost) - spec.budget;
    };
    const double floor = base.x.front();
    double top = std::max(1.0, 2.0 * floor);
    for (int i = 0; excess(top) < 0.0; ++i) {
        if (i > 200) fail(ErrorCode::kNoConvergence, "dominance_check: raise level not bracketed");
        top *= 2.0;
    }
    const auto level = numeric::safeguarded_newton(excess, floor, top);
    if (!level) fail(ErrorCode::kNoConvergence, "dominance_check: raise level not found");
    excess(*level);
    res.dominating = transfers_from_schedule(g, spec.cost);
    res.raised_level = *level;
    std::size_t end = 0;
    while (end + 1 < g.x.size() && base.x[end + 1] < *level) ++end;
    res.segment_end = g.theta[end];

    res.weakly_dominates = true;
    std::size_t last_strict = 0;
    bool any_strict = false;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        if (res.dominating.x[i] < base.x[i] - 1e-12) res.weakly_dominates = false;
        if (res.dominating.x[i] > base.x[i] + 1e-12) {
            if (i == 0 || (any_strict && last_strict + 1 == i)) {
                last_strict = i;
                any_strict = true;
            }
        }
    }
    res.strict_measure = any_strict ? g.theta[last_strict] - g.theta.front() : 0.0;
    return res;
}

}  // namespace bm
