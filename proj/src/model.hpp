#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bm {

using CostFn = std::function<double(double x, double theta)>;
using UnaryFn = std::function<double(double)>;

/// Cost of taking action x for an agent of type theta, with its partials.
/// When the cost is `theta * Gamma(x)` the `separable` block is filled in.
struct CostModel {
    std::string family;
    CostFn psi;
    CostFn psi_x;
    CostFn psi_theta;
    CostFn psi_x_theta;
    CostFn psi_xx;

    struct Separable {
        UnaryFn gamma;
        UnaryFn gamma_prime;
        UnaryFn gamma_second;
        UnaryFn gamma_prime_inverse;  // clamped at 0 below gamma_prime(0)
        bool strictly_convex = true;
    };
    std::optional<Separable> separable;
};

struct DiscreteTypes {
    std::vector<double> types;  // ascending
    std::vector<double> probs;
};

/// Type distribution on a bounded support. Point-mass laws carry `atoms` and
/// are only accepted by the discrete oracle and the BIC optimizer.
struct TypeDistribution {
    std::string kind;
    double lo = 0.0;
    double hi = 1.0;
    UnaryFn pdf;
    UnaryFn cdf;
    std::optional<DiscreteTypes> atoms;

    bool is_discrete() const { return atoms.has_value(); }
};

enum class Variant { kBaseline, kLinearValue, kExAnte, kMultiAgent };

const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);

struct ProblemSpec {
    CostModel cost;
    TypeDistribution dist;
    double budget = 1.0;
    Variant variant = Variant::kBaseline;
    double resource_value = 0.0;  // k, linear-value variant only
    int agents = 1;               // multi-agent variant only
};

void validate_problem(const ProblemSpec& spec);

// Builtin cost families.
CostModel power_cost(double scale, double exponent);
CostModel quadratic_plus_linear_cost(double a, double b);
CostModel table_cost(std::vector<double> knots, std::vector<double> marginal);
CostModel power_sum_cost(double a, double p, double b, double q);

// Builtin type distributions.
TypeDistribution uniform_distribution(double a, double b);
TypeDistribution linear_density_distribution(double a, double b, double slope);
TypeDistribution truncated_power_distribution(double a, double b, double alpha);
TypeDistribution discrete_distribution(std::vector<double> types, std::vector<double> probs);

/// Law of the minimum of `agents` independent draws from `dist`.
TypeDistribution order_statistic_distribution(const TypeDistribution& dist, int agents);

struct ClauseResult {
    std::string name;
    bool passed = true;
    bool enforced = true;   // informational clauses never fail the report
    double worst_value = 0.0;
    double worst_x = 0.0;
    double worst_theta = 0.0;
};

struct ValidationReport {
    std::vector<ClauseResult> clauses;
    bool ok() const;
    const ClauseResult* find(const std::string& name) const;
};

/// Sample-based check of the cost assumptions on a samples x samples box
/// (0, x_max] x [lo, hi]. Throws InvalidArgument if psi(0, theta) != 0.
ValidationReport validate_cost_model(const CostModel& cost, const TypeDistribution& dist,
                                     int samples = 32, double x_max = 2.0);

struct DistributionReport {
    double total_mass = 0.0;
    double cdf_lo = 0.0;
    double cdf_hi = 1.0;
    double max_density_mismatch = 0.0;
    bool monotone = true;
    bool ok = true;
};

DistributionReport validate_distribution(const TypeDistribution& dist, int samples = 64);

}  // namespace bm
