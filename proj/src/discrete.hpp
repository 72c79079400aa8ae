#pragma once

#include <optional>
#include <string>
#include <vector>

namespace bm {

/// Mechanism over a finite list of types. Produced by the discrete oracle
/// and the two-agent BIC optimizer.
struct DiscreteMechanism {
    std::vector<double> types;
    std::vector<double> probs;
    std::vector<double> x;
    std::vector<double> t;
    std::vector<double> win_probs;  // BIC only: chance of winning with each report

    double objective = 0.0;
    double max_ic_violation = 0.0;
    double max_ir_violation = 0.0;
    double max_budget_violation = 0.0;
    bool feasible = false;

    // Oracle diagnostics.
    double multiplier = 0.0;
    double budget_used = 0.0;
    double lagrangian_objective = 0.0;        // before the continuous budget fill
    std::optional<double> exact_objective;    // coarse budget-discretized DP
    std::optional<double> coarse_lagrangian;  // Lagrangian DP at the same coarse grid
    double duality_gap = 0.0;
    bool gap_warning = false;
    std::vector<std::string> notes;
};

}  // namespace bm
