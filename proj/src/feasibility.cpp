#include "feasibility.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bm {

double feasibility_tolerance(double budget) { return 1e-8 * std::max(1.0, budget); }

bool is_nonincreasing(const std::vector<double>& x, double slack) {
    for (std::size_t i = 1; i < x.size(); ++i)
        if (x[i] > x[i - 1] + slack) return false;
    return true;
}

namespace {

double monotone_slack(const std::vector<double>& x) {
    return 1e-9 * std::max(1.0, x.empty() ? 0.0 : std::abs(x.front()));
}

void check_grid(const ScheduleGrid& g) {
    if (g.theta.size() < 2 || g.x.size() != g.theta.size())
        fail(ErrorCode::kInvalidArgument, "schedule grid needs >= 2 nodes with one action per node");
    for (std::size_t i = 1; i < g.theta.size(); ++i)
        if (!(g.theta[i] > g.theta[i - 1])) fail(ErrorCode::kInvalidArgument, "schedule grid types must increase");
}

// Information rent accrued across cell i: average of the two exact
// piecewise-constant rents using the left and right node actions.
double cell_rent(const CostModel& c, double x0, double x1, double th0, double th1) {
    return 0.5 * ((c.psi(x0, th1) - c.psi(x0, th0)) + (c.psi(x1, th1) - c.psi(x1, th0)));
}

std::vector<double> envelope_transfers(const std::vector<double>& theta, const std::vector<double>& x,
                                       const CostModel& c) {
    const std::size_t n = theta.size();
    std::vector<double> t(n);
    double rent = 0.0;
    t[n - 1] = c.psi(x[n - 1], theta[n - 1]);
    for (std::size_t k = n - 1; k-- > 0;) {
        rent += cell_rent(c, x[k], x[k + 1], theta[k], theta[k + 1]);
        t[k] = c.psi(x[k], theta[k]) + rent;
    }
    return t;
}

}  // namespace

ScheduleGrid transfers_from_schedule(const ScheduleGrid& schedule, const CostModel& cost) {
    check_grid(schedule);
    if (!is_nonincreasing(schedule.x, monotone_slack(schedule.x)))
        fail(ErrorCode::kInvalidArgument, "transfers_from_schedule: action schedule must be nonincreasing");
    ScheduleGrid out = schedule;
    out.t = envelope_transfers(schedule.theta, schedule.x, cost);
    return out;
}

double normalization_value(const ScheduleGrid& schedule, const CostModel& cost) {
    check_grid(schedule);
    return envelope_transfers(schedule.theta, schedule.x, cost).front();
}

namespace {

double richardson_estimate(const ScheduleGrid& g, const CostModel& cost, double full) {
    if (g.size() < 5) return 0.0;
    std::vector<double> th, x;
    for (std::size_t i = 0; i < g.size(); i += 2) {
        th.push_back(g.theta[i]);
        x.push_back(g.x[i]);
    }
    if (th.back() != g.theta.back()) {
        th.push_back(g.theta.back());
        x.push_back(g.x.back());
    }
    const double coarse = envelope_transfers(th, x, cost).front();
    return std::abs(full - coarse) / 3.0;
}

}  // namespace

AuditReport check_feasibility(const ScheduleGrid& schedule, const CostModel& cost, double budget) {
    check_grid(schedule);
    AuditReport rep;
    rep.tolerance = feasibility_tolerance(budget);
    rep.monotone = is_nonincreasing(schedule.x, monotone_slack(schedule.x));
    rep.normalization_value = normalization_value(schedule, cost);
    rep.richardson_error = richardson_estimate(schedule, cost, rep.normalization_value);
    rep.budget_slack = budget - rep.normalization_value;
    rep.feasible = rep.monotone && rep.normalization_value <= budget + rep.tolerance;
    return rep;
}

AuditReport audit_ic_ir(const ScheduleGrid& schedule, const CostModel& cost, std::optional<double> budget) {
    check_grid(schedule);
    if (!schedule.has_transfers()) fail(ErrorCode::kInvalidArgument, "audit_ic_ir: schedule has no transfers");
    const std::size_t n = schedule.size();
    const auto& th = schedule.theta;
    const auto& x = schedule.x;
    const auto& t = schedule.t;

    AuditReport rep;
    rep.tolerance = feasibility_tolerance(budget.value_or(1.0));
    rep.monotone = is_nonincreasing(x, monotone_slack(x));
    rep.max_ic_gain = -std::numeric_limits<double>::infinity();
    rep.min_ir_slack = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < n; ++i) {
        const double own = t[i] - cost.psi(x[i], th[i]);
        if (own < rep.min_ir_slack) {
            rep.min_ir_slack = own;
            rep.ir_type = i;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double gain = (t[j] - cost.psi(x[j], th[i])) - own;
            if (gain > rep.max_ic_gain) {
                rep.max_ic_gain = gain;
                rep.ic_type = i;
                rep.ic_report = j;
            }
        }
    }
    rep.normalization_value = t.front();
    const double max_t = *std::max_element(t.begin(), t.end());
    rep.budget_slack = budget ? *budget - max_t : 0.0;
    rep.feasible = rep.max_ic_gain <= rep.tolerance && rep.min_ir_slack >= -rep.tolerance &&
                   rep.budget_slack >= -rep.tolerance;
    return rep;
}

double SubsidySchedule::evaluate(double x) const {
    if (x_level.empty() || x <= 0.0) return 0.0;
    // Walk the ascending view: (0, 0), then levels from smallest to largest.
    double x_prev = 0.0;
    double t_prev = 0.0;
    for (std::size_t k = x_level.size(); k-- > 0;) {
        const double xl = x_level[k];
        const double tl = t_level[k];
        if (x <= xl) {
            if (xl == x_prev) return tl;
            return t_prev + (tl - t_prev) * (x - x_prev) / (xl - x_prev);
        }
        x_prev = xl;
        t_prev = tl;
    }
    return t_level.front();
}

SubsidySchedule subsidy_schedule(const ScheduleGrid& schedule) {
    check_grid(schedule);
    if (!schedule.has_transfers()) fail(ErrorCode::kInvalidArgument, "subsidy_schedule: schedule has no transfers");
    const auto& x = schedule.x;
    const auto& t = schedule.t;
    const double x_tol = 1e-9 * std::max(1.0, std::abs(x.front()));
    const double t_tol = 1e-8 * std::max(1.0, std::abs(t.front()));
    if (!is_nonincreasing(x, x_tol) || !is_nonincreasing(t, t_tol))
        fail(ErrorCode::kInvalidArgument, "subsidy_schedule: actions and transfers must be nonincreasing");

    SubsidySchedule s;
    std::size_t start = 0;
    while (start < x.size()) {
        std::size_t end = start;
        while (end + 1 < x.size() && std::abs(x[end + 1] - x[start]) <= x_tol) ++end;
        for (std::size_t k = start; k <= end; ++k) {
            if (std::abs(t[k] - t[start]) > t_tol) {
                std::ostringstream os;
                os << "subsidy_schedule: equal actions with different transfers at types " << schedule.theta[start]
                   << " and " << schedule.theta[k];
                fail(ErrorCode::kInvalidArgument, os.str());
            }
        }
        if (!(x[start] <= x_tol && std::abs(t[start]) <= t_tol)) {
            s.x_level.push_back(x[start]);
            s.t_level.push_back(t[start]);
        }
        start = end + 1;
    }
    return s;
}

}  // namespace bm
