#pragma once

#include "discrete.hpp"
#include "feasibility.hpp"
#include "model.hpp"

namespace bm {

struct OracleConfig {
    std::size_t n_types = 200;
    std::size_t n_actions = 400;
    bool exact_check = true;
    std::size_t exact_types = 20;
    std::size_t exact_actions = 40;
    std::size_t exact_buckets = 512;
};

/// Independent optimizer over a discretized type space: Lagrangian relaxation
/// of the budget with a monotone dynamic program per multiplier, followed by
/// a continuous fill of the top constant block. Transfers come from the
/// discrete envelope and are audited over all pairs.
DiscreteMechanism brute_force_discrete(const ProblemSpec& spec, const OracleConfig& cfg = {});

/// Pays a constant rate r per unit of action, capped by the budget.
struct SubsidyOutcome {
    double rate = 0.0;
    double cap = 0.0;  // T / r
    ScheduleGrid schedule;  // x_r with envelope transfers
    double spend_normalization = 0.0;
    std::size_t cap_run_end = 0;  // last index of the initial run at the cap, or npos-like 0 when none
    bool has_cap_run = false;
};

SubsidyOutcome linear_subsidy_outcome(const ProblemSpec& spec, double rate, std::size_t grid = 512);

struct DominanceResult {
    SubsidyOutcome base;
    ScheduleGrid dominating;
    double slack = 0.0;
    double raised_level = 0.0;
    double segment_end = 0.0;
    double strict_measure = 0.0;
    bool weakly_dominates = false;
};

/// Replaces x_r by max(x_r, a), with the floor a chosen so the lowest
/// type's transfer uses the whole budget.
DominanceResult dominance_check(const ProblemSpec& spec, double rate, std::size_t grid = 512);

}  // namespace bm
