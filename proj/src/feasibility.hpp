#pragma once

#include "model.hpp"

#include <optional>
#include <vector>

namespace bm {

/// Type grid with the action and (optionally) transfer at each node.
struct ScheduleGrid {
    std::vector<double> theta;
    std::vector<double> x;
    std::vector<double> t;  // empty when transfers have not been built

    std::size_t size() const { return theta.size(); }
    bool has_transfers() const { return t.size() == theta.size() && !t.empty(); }
};

struct AuditReport {
    bool monotone = true;
    double max_ic_gain = 0.0;
    std::size_t ic_type = 0;       // the type that gains by deviating
    std::size_t ic_report = 0;     // the report it would send
    double min_ir_slack = 0.0;
    std::size_t ir_type = 0;
    double budget_slack = 0.0;     // T - max t
    double normalization_value = 0.0;
    double richardson_error = 0.0;
    double tolerance = 0.0;
    bool feasible = false;
};

double feasibility_tolerance(double budget);
bool is_nonincreasing(const std::vector<double>& x, double slack);

/// Fills t using the envelope formula; x must be nonincreasing. Adjacent IC
/// holds exactly on the grid, which gives IC for every pair.
ScheduleGrid transfers_from_schedule(const ScheduleGrid& schedule, const CostModel& cost);

/// Value of the lowest type's transfer under the envelope formula.
double normalization_value(const ScheduleGrid& schedule, const CostModel& cost);

AuditReport check_feasibility(const ScheduleGrid& schedule, const CostModel& cost, double budget);

/// Exhaustive pairwise IC and pointwise IR scan. Budget slack is filled only
/// when a budget is given.
AuditReport audit_ic_ir(const ScheduleGrid& schedule, const CostModel& cost,
                        std::optional<double> budget = std::nullopt);

struct SubsidySchedule {
    std::vector<double> x_level;  // descending
    std::vector<double> t_level;

    /// Piecewise-linear payment for action x, zero at x = 0.
    double evaluate(double x) const;
};

SubsidySchedule subsidy_schedule(const ScheduleGrid& schedule);

}  // namespace bm
