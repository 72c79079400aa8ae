#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "feasibility.hpp"
#include "helpers.hpp"
#include "numeric.hpp"
#include "oracle.hpp"
#include "solver_baseline.hpp"
#include "solver_exante.hpp"
#include "solver_separable.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace bm;
using namespace bm::testing;

namespace {

constexpr std::uint64_t kSeed = 0x5eed2024;

ScheduleGrid random_monotone(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ScheduleGrid g;
    const double lo = 0.5 + u(rng);
    g.theta = numeric::linspace(lo, lo + 0.5 + 2 * u(rng), n);
    double x = 3 * u(rng);
    for (std::size_t i = 0; i < n; ++i) {
        // Flat runs about 30% of the time, occasional jumps.
        const double r = u(rng);
        if (r >= 0.35) x -= 0.02 * u(rng);
        else if (r >= 0.3) x *= 0.5;
        x = std::max(x, 0.0);
        g.x.push_back(x);
    }
    return g;
}

}  // namespace

TEST_CASE("envelope transfers pass the exhaustive audit") {
    std::mt19937_64 rng(kSeed);
    const CostModel costs[] = {power_cost(1, 2), power_cost(2, 3.5), quadratic_plus_linear_cost(1, 0.5),
                               power_sum_cost(1, 2, 0.3, 3), table_cost({0, 1, 2, 5}, {0, 1, 3, 8})};
    for (int trial = 0; trial < 60; ++trial) {
        const auto& c = costs[trial % 5];
        const auto g = transfers_from_schedule(random_monotone(rng, 20 + trial * 3), c);
        const auto a = audit_ic_ir(g, c);
        CHECK(a.max_ic_gain <= 1e-8);
        CHECK(a.min_ir_slack >= -1e-12);
        for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.t[i] <= g.t[i - 1] + 1e-12);
        CHECK(*std::max_element(g.t.begin(), g.t.end()) == g.t.front());
    }
}

TEST_CASE("every builtin density integrates to one") {
    std::mt19937_64 rng(kSeed + 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const double a = 3 * u(rng);
        const double b = a + 0.1 + 3 * u(rng);
        const double w = b - a;
        const double max_slope = 2 / (w * w);  // keeps the linear density nonnegative
        const TypeDistribution ds[] = {uniform_distribution(a, b),
                                       linear_density_distribution(a, b, max_slope * (2 * u(rng) - 1)),
                                       truncated_power_distribution(a, b, 4 * u(rng) - 2 + (a > 0 ? 0 : 1.5))};
        for (const auto& d : ds) {
            const double mass = numeric::integrate(d.pdf, d.lo, d.hi);
            CHECK_MESSAGE(std::abs(mass - 1.0) <= 1e-8, d.kind);
            CHECK(d.cdf(d.hi) == doctest::Approx(1.0));
            CHECK(d.cdf(d.lo) == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("power costs satisfy the assumptions for every exponent >= 1") {
    std::mt19937_64 rng(kSeed + 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double p = 1 + 4 * u(rng);
        const double lo = 0.1 + 2 * u(rng);
        const auto rep = validate_cost_model(power_cost(0.5 + u(rng), p), uniform_distribution(lo, lo + 1 + u(rng)));
        CHECK_MESSAGE(rep.ok(), p);
    }
    CHECK_FALSE(validate_cost_model(submodular_cost(), uniform_distribution(1, 2)).ok());
    CHECK_FALSE(validate_cost_model(inverse_type_cost(), uniform_distribution(1, 2)).ok());
}

TEST_CASE("baseline solutions bind the budget with a positive multiplier") {
    std::mt19937_64 rng(kSeed + 3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        ProblemSpec s;
        s.cost = trial % 3 == 0 ? power_sum_cost(1, 2, 0.2 + u(rng), 3) : power_cost(1, 2 + 2 * u(rng));
        s.dist = linear_density_distribution(1, 2, -2 * u(rng));
        s.budget = 0.2 + 4 * u(rng);
        SolverConfig cfg;
        cfg.grid = 257;
        const auto sol = solve_baseline(s, cfg);
        CHECK(sol.lambda > 0.0);
        CHECK(std::abs(sol.grid.t.front() - s.budget) <= 1e-8 * s.budget);
        CHECK(sol.theta_hat > s.dist.lo);
        const auto a = audit_ic_ir(sol.grid, s.cost, s.budget);
        CHECK(a.feasible);
        for (std::size_t i = 0; i < sol.grid.size() && sol.grid.theta[i] < sol.theta_hat; ++i)
            CHECK(std::abs(sol.grid.t[i] - s.budget) <= 1e-8 * s.budget);
    }
}

TEST_CASE("concavification agrees with shooting on separable instances") {
    std::mt19937_64 rng(kSeed + 4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        ProblemSpec s;
        s.cost = power_cost(1, 1.5 + 2 * u(rng));
        s.dist = linear_density_distribution(1, 2, -2 * u(rng));
        s.budget = 0.3 + 2 * u(rng);
        const auto a = solve_baseline(s);
        const auto b = solve_separable(s);
        double m = 0.0;
        for (std::size_t i = 0; i < a.grid.size(); ++i) m = std::max(m, std::abs(a.grid.x[i] - b.grid.x[i]));
        CHECK(m <= 1e-4);
    }
}

TEST_CASE("ex-ante objective is at least the ex-post one") {
    std::mt19937_64 rng(kSeed + 5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        ProblemSpec s = quadratic_uniform(0.5 + 2 * u(rng));
        s.dist = linear_density_distribution(1, 2, -2 * u(rng));
        const auto post = solve_baseline(s);
        s.variant = Variant::kExAnte;
        const auto ante = solve_exante(s);
        CHECK(ante.objective >= post.objective - 1e-9);
    }
}

TEST_CASE("discrete oracle envelopes are IC on random laws") {
    std::mt19937_64 rng(kSeed + 6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<double> types, probs;
        double th = 1.0, total = 0.0;
        const int n = 3 + trial;
        for (int i = 0; i < n; ++i) {
            types.push_back(th);
            th += 0.1 + u(rng);
            probs.push_back(0.1 + u(rng));
            total += probs.back();
        }
        for (double& p : probs) p /= total;
        ProblemSpec s = quadratic_uniform(0.5 + 2 * u(rng));
        s.dist = discrete_distribution(types, probs);
        OracleConfig oc;
        oc.n_actions = 200;
        const auto m = brute_force_discrete(s, oc);
        CHECK(m.feasible);
        CHECK(m.max_ic_violation <= 1e-8 * std::max(1.0, s.budget));
        for (std::size_t i = 1; i < m.x.size(); ++i) CHECK(m.x[i] <= m.x[i - 1] + 1e-12);
    }
}
