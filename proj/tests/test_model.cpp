#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "error.hpp"
#include "helpers.hpp"
#include "model.hpp"
#include "numeric.hpp"

#include <cmath>

using namespace bm;
using namespace bm::testing;

TEST_CASE("numeric: gauss-kronrod and trapezoid") {
    CHECK(numeric::integrate([](double x) { return std::exp(x); }, 0, 1) == doctest::Approx(std::exp(1) - 1).epsilon(1e-13));
    const auto x = numeric::linspace(0, 1, 101);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 2 * x[i];
    CHECK(numeric::trapezoid(x, y) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x.front() == 0.0);
    CHECK(x.back() == 1.0);
}

TEST_CASE("numeric: roots") {
    auto f = [](double x) { return x * x - 2; };
    const auto r = numeric::safeguarded_newton(f, 0, 2);
    REQUIRE(r);
    CHECK(*r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK_FALSE(numeric::safeguarded_newton(f, 2, 3));
    const auto b = numeric::bisect([](double x) { return std::abs(x - 0.3) < 1e-300 ? 0.0 : (x > 0.3 ? 1.0 : -1.0); }, 0, 1);
    REQUIRE(b);
    CHECK(*b == doctest::Approx(0.3).epsilon(1e-12));
    const auto hi = numeric::expand_bracket([](double x) { return x - 1000; }, 1, -1);
    REQUIRE(hi);
    CHECK(*hi >= 1000);
}

TEST_CASE("cost validation: quadratic passes every clause") {
    const auto rep = validate_cost_model(power_cost(1, 2), uniform_distribution(1, 2));
    CHECK(rep.ok());
    for (const auto& c : rep.clauses) CHECK_MESSAGE(c.passed, c.name);
}

TEST_CASE("cost validation: linear cost is weakly convex only") {
    const auto rep = validate_cost_model(linear_cost(), uniform_distribution(1, 2));
    CHECK(rep.ok());
    REQUIRE(rep.find("strictly_convex"));
    CHECK_FALSE(rep.find("strictly_convex")->passed);
    CHECK_FALSE(rep.find("strictly_convex")->enforced);
    CHECK(rep.find("convex_in_action")->passed);
}

TEST_CASE("cost validation: x / theta fails monotonicity in the type") {
    const auto rep = validate_cost_model(inverse_type_cost(), uniform_distribution(1, 2));
    CHECK_FALSE(rep.ok());
    CHECK_FALSE(rep.find("increasing_in_type")->passed);
}

TEST_CASE("cost validation: submodular counterexample") {
    const auto rep = validate_cost_model(submodular_cost(), uniform_distribution(1, 2));
    CHECK_FALSE(rep.ok());
    CHECK_FALSE(rep.find("supermodular")->passed);
}

TEST_CASE("cost validation: inconsistent derivative is caught") {
    auto c = power_cost(1, 2);
    c.psi_x = [](double x, double th) { return 3 * th * x; };
    const auto rep = validate_cost_model(c, uniform_distribution(1, 2));
    CHECK_FALSE(rep.find("derivatives_consistent")->passed);
}

TEST_CASE("cost validation: nonzero cost of inaction is rejected") {
    auto c = power_cost(1, 2);
    c.psi = [](double x, double th) { return th * x * x + 0.1; };
    CHECK_THROWS_AS(validate_cost_model(c, uniform_distribution(1, 2)), Error);
}

TEST_CASE("builtin costs") {
    const auto q = power_cost(1, 2);
    CHECK(q.psi(1.5, 2.0) == doctest::Approx(4.5));
    CHECK(q.psi_x(1.5, 2.0) == doctest::Approx(6.0));
    CHECK(q.separable.has_value());
    const auto ql = quadratic_plus_linear_cost(1, 1);
    CHECK(ql.psi_x(0.0, 2.0) == doctest::Approx(2.0));
    CHECK(ql.psi_x_theta(0.0, 2.0) == doctest::Approx(1.0));
    const auto tab = table_cost({0, 1, 2}, {0, 2, 4});
    CHECK(tab.psi(1.0, 1.0) == doctest::Approx(1.0));  // Gamma = x^2 on the knots
    CHECK(tab.psi(2.0, 3.0) == doctest::Approx(12.0));
    CHECK(validate_cost_model(tab, uniform_distribution(1, 2), 32, 2.0).ok());
    const auto ps = power_sum_cost(1, 2, 0.5, 3);
    CHECK(ps.psi(1.0, 2.0) == doctest::Approx(2 + 0.5 * 4));
    CHECK_FALSE(ps.separable.has_value());
    CHECK(validate_cost_model(ps, uniform_distribution(1, 2)).ok());
    CHECK_THROWS_AS(power_cost(1, 0.5), Error);
    CHECK_THROWS_AS(table_cost({0, 1}, {1, 0}), Error);
}

TEST_CASE("distributions") {
    const auto u = uniform_distribution(1, 2);
    CHECK(u.pdf(1.3) == doctest::Approx(1.0));
    CHECK(u.cdf(1.3) == doctest::Approx(0.3));
    const auto l = linear_density_distribution(1, 2, -2);
    for (double t : {1.0, 1.25, 1.7, 2.0}) {
        CHECK(l.pdf(t) == doctest::Approx(2 * (2 - t)));
        CHECK(l.cdf(t) == doctest::Approx(4 * t - t * t - 3));
    }
    const auto u01 = uniform_distribution(0, 1);
    CHECK(u01.cdf(0.37) == doctest::Approx(0.37));
    CHECK_THROWS_AS(uniform_distribution(2, 1), Error);
    CHECK_THROWS_AS(linear_density_distribution(1, 2, -5), Error);
    CHECK_THROWS_AS(discrete_distribution({1, 2}, {0.5, 0.6}), Error);
    const auto d = discrete_distribution({1, 2, 3}, {0.2, 0.3, 0.5});
    CHECK(d.is_discrete());
    CHECK(d.cdf(2.5) == doctest::Approx(0.5));
}

TEST_CASE("order statistic of the minimum") {
    const auto u = uniform_distribution(0, 1);
    const auto same = order_statistic_distribution(u, 1);
    CHECK(same.cdf(0.4) == u.cdf(0.4));
    const auto two = order_statistic_distribution(u, 2);
    for (double t : {0.1, 0.5, 0.9}) CHECK(two.cdf(t) == doctest::Approx(2 * t - t * t));
    const auto three = order_statistic_distribution(uniform_distribution(1, 2), 3);
    CHECK(three.cdf(2.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(order_statistic_distribution(u, 0), Error);
}

TEST_CASE("distribution validation") {
    for (const auto& d : {uniform_distribution(1, 2), linear_density_distribution(1, 2, -2),
                          truncated_power_distribution(1, 2, 0.5), truncated_power_distribution(0.5, 3, -1)}) {
        const auto rep = validate_distribution(d);
        CHECK_MESSAGE(rep.ok, d.kind);
        CHECK(rep.total_mass == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("variant names round trip") {
    for (auto v : {Variant::kBaseline, Variant::kLinearValue, Variant::kExAnte, Variant::kMultiAgent})
        CHECK(parse_variant(variant_name(v)) == v);
    CHECK_THROWS_AS(parse_variant("bogus"), Error);
}
