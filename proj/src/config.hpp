#pragma once

#include "mechanism.hpp"
#include "multi_agent.hpp"
#include "oracle.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace bm {

enum class Method { kShooting, kSeparable };

struct Table1Config {
    std::vector<double> types{1.0, 2.0, 3.0};
    std::vector<double> deltas{0.3, 0.4, 0.5};
    double p_top = 0.8;
    double budget = 3.0;
    CostModel cost;
    BicConfig bic;
};

struct RunConfig {
    ProblemSpec spec;
    SolverConfig solver;
    Method method = Method::kShooting;
    OracleConfig oracle;
    std::vector<double> sweep_k{0.0, 0.1, 0.2, 0.3};
    std::vector<double> sweep_T{0.5, 1.0, 2.0, 4.0};
    std::vector<double> subsidy_rates{0.5, 1.0, 2.0};
    Table1Config table1;
    std::uint64_t seed = 20240601;
    nlohmann::json raw;
};

CostModel parse_cost(const nlohmann::json& j);
TypeDistribution parse_distribution(const nlohmann::json& j);

/// Throws Error(kConfig) on any schema violation.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// "baseline", "ex_ante", "linear_value:0.3", "multi_agent:2".
void apply_variant_override(RunConfig& cfg, const std::string& text);
void set_variant(RunConfig& cfg, const std::string& name, double param);

}  // namespace bm
