#include "commands.hpp"

#include "error.hpp"
#include "io.hpp"
#include "multi_agent.hpp"
#include "oracle.hpp"
#include "solver_baseline.hpp"
#include "solver_exante.hpp"
#include "solver_linear_value.hpp"
#include "solver_separable.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace bm {

using nlohmann::json;

namespace {

std::string variant_label(Variant v) {
    std::string s = variant_name(v);
    std::replace(s.begin(), s.end(), '_', '-');
    return s;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json audit_json(const AuditReport& a) {
    return {{"monotone", a.monotone},
            {"max_ic_gain", a.max_ic_gain},
            {"ic_type", a.ic_type},
            {"ic_report", a.ic_report},
            {"min_ir_slack", a.min_ir_slack},
            {"ir_type", a.ir_type},
            {"budget_slack", a.budget_slack},
            {"normalization_value", a.normalization_value},
            {"tolerance", a.tolerance},
            {"feasible", a.feasible}};
}

std::string pair_text(const AuditReport& a, const ScheduleGrid& g) {
    std::ostringstream os;
    os << "type " << a.ic_type << " (theta=" << io::fmt(g.theta[a.ic_type]) << ") gains "
       << io::fmt(a.max_ic_gain) << " by reporting " << a.ic_report << " (theta=" << io::fmt(g.theta[a.ic_report])
       << ")";
    return os.str();
}

void require_variant(const RunConfig& cfg, std::initializer_list<Variant> allowed, const char* command) {
    for (Variant v : allowed)
        if (cfg.spec.variant == v) return;
    fail(ErrorCode::kConfig, std::string(command) + " does not support variant '" + variant_name(cfg.spec.variant) +
                                 "'");
}

ProblemSpec with_resource_value(const ProblemSpec& spec, double k) {
    ProblemSpec s = spec;
    s.variant = Variant::kLinearValue;
    s.resource_value = k;
    return s;
}

double figure_k(const RunConfig& cfg) {
    if (cfg.spec.variant == Variant::kLinearValue && cfg.spec.resource_value > 0.0) return cfg.spec.resource_value;
    double k = 0.0;
    for (double v : cfg.sweep_k) k = std::max(k, v);
    return k > 0.0 ? k : 0.3;
}

// ---- subcommands ----

CommandResult cmd_solve(const RunConfig& cfg, const std::string& dir) {
    const auto sol = solve_configured(cfg);
    const auto audit = audit_solution(sol, cfg);
    CommandResult res;
    if (!audit.passed) {
        io::write_json(io::join(dir, "audit.json"), audit_json(audit.report));
        fail(ErrorCode::kAuditFailed, "solve: audit failed, nothing written: " + audit.failure);
    }
    res.files = write_solution(sol, audit, dir);
    res.summary = solution_summary(sol, audit);
    return res;
}

CommandResult cmd_audit(const RunConfig& cfg, const std::string& dir, const CommandOptions& opts) {
    if (opts.schedule_path.empty()) fail(ErrorCode::kConfig, "audit needs --schedule <csv>");
    const auto csv = io::read_csv(opts.schedule_path);
    ScheduleGrid g;
    g.theta = csv.column("theta");
    g.x = csv.column("x");
    const bool has_t = csv.has("t");
    if (has_t) {
        g.t = csv.column("t");
    } else {
        g = transfers_from_schedule(g, cfg.spec.cost);
    }
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!std::isfinite(g.theta[i]) || !std::isfinite(g.x[i]) || !std::isfinite(g.t[i]))
            fail(ErrorCode::kInvalidArgument, "audit: schedule row " + std::to_string(i) + " has a missing value");

    const std::optional<double> budget =
        cfg.spec.variant == Variant::kExAnte ? std::nullopt : std::optional<double>(cfg.spec.budget);
    const auto rep = audit_ic_ir(g, cfg.spec.cost, budget);
    json j = audit_json(rep);
    j["schedule"] = opts.schedule_path;
    j["rows"] = g.size();
    j["transfers_supplied"] = has_t;
    j["budget"] = cfg.spec.budget;
    j["worst_pair"] = {{"type", rep.ic_type},
                       {"theta_type", g.theta[rep.ic_type]},
                       {"report", rep.ic_report},
                       {"theta_report", g.theta[rep.ic_report]},
                       {"gain", rep.max_ic_gain}};
    io::write_json(io::join(dir, "audit.json"), j);
    CommandResult res;
    res.files = {"audit.json"};
    res.summary = j;
    if (!rep.feasible) {
        std::ostringstream os;
        os << "audit failed: worst IC pair: " << pair_text(rep, g) << "; min IR slack " << io::fmt(rep.min_ir_slack)
           << " at type " << rep.ir_type << "; budget slack " << io::fmt(rep.budget_slack);
        fail(ErrorCode::kAuditFailed, os.str());
    }
    return res;
}

CommandResult cmd_sweep_k(const RunConfig& cfg, const std::string& dir) {
    require_variant(cfg, {Variant::kBaseline, Variant::kLinearValue}, "sweep-k");
    std::vector<MechanismSolution> sols;
    const auto rep = comparative_statics(cfg.spec, cfg.sweep_k, cfg.solver, &sols);

    io::Column k{"k", {}}, xb{"x_bar", {}}, lam{"lambda", {}}, th{"theta_hat", {}}, tt{"theta_tilde", {}},
        obj{"objective", {}}, sp{"spend", {}}, binds{"binds", {}};
    for (const auto& r : rep.rows) {
        k.values.push_back(r.k);
        xb.values.push_back(r.x_bar);
        lam.values.push_back(r.lambda);
        th.values.push_back(r.theta_hat);
        tt.values.push_back(r.theta_tilde.value_or(std::nan("")));
        obj.values.push_back(r.objective);
        sp.values.push_back(r.spend);
        binds.values.push_back(r.binds ? 1.0 : 0.0);
    }
    CommandResult res;
    io::write_csv(io::join(dir, "sweep.csv"), {k, xb, lam, th, tt, obj, sp, binds});
    res.files.push_back("sweep.csv");

    io::ensure_dir(io::join(dir, "sweep_k"));
    std::vector<std::future<std::string>> writes;
    for (std::size_t i = 0; i < sols.size(); ++i) {
        writes.push_back(std::async(std::launch::async, [&, i] {
            const auto name = "sweep_k/schedule_" + std::to_string(i) + ".csv";
            const auto& g = sols[i].grid;
            io::write_csv(io::join(dir, name), {{"theta", g.theta}, {"x", g.x}, {"t", g.t}, {"rho", sols[i].rho}});
            return name;
        }));
    }
    for (auto& w : writes) res.files.push_back(w.get());

    json pairs = json::array();
    bool all_signs = !rep.pairs.empty();
    for (const auto& p : rep.pairs) {
        pairs.push_back({{"k_from", p.k_from},
                         {"k_to", p.k_to},
                         {"dx_bar_dk", p.dx_bar},
                         {"dlambda_dk", p.dlambda},
                         {"x_bar_increases", p.x_bar_increases},
                         {"lambda_decreases", p.lambda_decreases}});
        all_signs = all_signs && p.x_bar_increases && p.lambda_decreases;
    }
    res.summary = {{"pairs", pairs}, {"non_binding_k", rep.non_binding}, {"all_signs_hold", all_signs}};
    io::write_json(io::join(dir, "sweep_signs.json"), res.summary);
    res.files.push_back("sweep_signs.json");
    return res;
}

CommandResult cmd_sweep_T(const RunConfig& cfg, const std::string& dir) {
    require_variant(cfg, {Variant::kBaseline}, "sweep-T");
    const auto rep = threshold_invariance_report(cfg.spec, cfg.sweep_T, cfg.solver);
    io::write_csv(io::join(dir, "threshold_invariance.csv"), {{"T", rep.budgets}, {"theta_hat", rep.theta_hat}});
    const double step = (cfg.spec.dist.hi - cfg.spec.dist.lo) / static_cast<double>(cfg.solver.grid - 1);
    CommandResult res;
    res.files = {"threshold_invariance.csv", "threshold_invariance.json"};
    res.summary = {{"budgets", rep.budgets},
                   {"theta_hat", rep.theta_hat},
                   {"spread", rep.spread},
                   {"grid_step", step},
                   {"invariant_within_grid_step", rep.spread <= step}};
    io::write_json(io::join(dir, "threshold_invariance.json"), res.summary);
    return res;
}

CommandResult cmd_concavify(const RunConfig& cfg, const std::string& dir) {
    const auto env = concave_majorant(cfg.spec.dist, cfg.solver.envelope_grid);
    io::write_csv(io::join(dir, "envelope.csv"),
                  {{"theta", env.theta}, {"F", env.F}, {"cavF", env.cav}, {"f_tilde", env.f_tilde}});
    json chords = json::array();
    for (const auto& c : env.chords) chords.push_back({{"a", c.a}, {"b", c.b}, {"slope", c.slope}});
    CommandResult res;
    res.files = {"envelope.csv", "envelope.json"};
    res.summary = {{"pooling_end", env.pooling_end()}, {"chords", chords}, {"grid", env.theta.size()}};
    io::write_json(io::join(dir, "envelope.json"), res.summary);
    return res;
}

CommandResult cmd_oracle(const RunConfig& cfg, const std::string& dir) {
    const auto m = brute_force_discrete(cfg.spec, cfg.oracle);
    io::write_csv(io::join(dir, "oracle.csv"), {{"theta", m.types}, {"p", m.probs}, {"x", m.x}, {"t", m.t}});

    json j = {{"variant", variant_label(cfg.spec.variant)},
              {"n_types", m.types.size()},
              {"objective", m.objective},
              {"feasible", m.feasible},
              {"max_ic_violation", m.max_ic_violation},
              {"max_ir_violation", m.max_ir_violation},
              {"max_budget_violation", m.max_budget_violation},
              {"multiplier", m.multiplier},
              {"budget_used", m.budget_used},
              {"lagrangian_objective", m.lagrangian_objective},
              {"exact_objective", optional_number(m.exact_objective)},
              {"coarse_lagrangian", optional_number(m.coarse_lagrangian)},
              {"gap_bound", m.duality_gap},
              {"gap_warning", m.gap_warning},
              {"notes", m.notes}};
    if (!cfg.spec.dist.is_discrete()) {
        try {
            const auto sol = solve_configured(cfg);
            j["continuous_objective"] = sol.objective;
            j["relative_difference"] = (m.objective - sol.objective) / std::abs(sol.objective);
        } catch (const Error& e) {
            j["continuous_objective"] = nullptr;
            j["continuous_error"] = e.what();
        }
    }
    io::write_json(io::join(dir, "oracle.json"), j);
    CommandResult res;
    res.files = {"oracle.csv", "oracle.json"};
    res.summary = j;
    return res;
}

CommandResult cmd_table1(const RunConfig& cfg, const std::string& dir) {
    const auto& t1 = cfg.table1;
    std::vector<std::future<DiscreteMechanism>> jobs;
    for (double delta : t1.deltas) {
        jobs.push_back(std::async(std::launch::async, [&t1, delta] {
            return solve_discrete_bic(t1.types, example_probs(delta, t1.p_top), t1.cost, t1.budget, t1.bic);
        }));
    }
    std::vector<io::Column> cols{{"delta", {}}, {"x1", {}}, {"x2", {}}, {"x3", {}},
                                 {"t1", {}},    {"t2", {}}, {"t3", {}}, {"objective", {}}};
    json rows = json::array();
    for (std::size_t r = 0; r < t1.deltas.size(); ++r) {
        const auto m = jobs[r].get();
        const double vals[] = {t1.deltas[r], m.x[0], m.x[1], m.x[2], m.t[0], m.t[1], m.t[2], m.objective};
        for (std::size_t c = 0; c < cols.size(); ++c) cols[c].values.push_back(vals[c]);
        rows.push_back({{"delta", t1.deltas[r]},
                        {"x", m.x},
                        {"t", m.t},
                        {"win_probs", m.win_probs},
                        {"objective", m.objective},
                        {"feasible", m.feasible},
                        {"max_ic_violation", m.max_ic_violation},
                        {"max_ir_violation", m.max_ir_violation},
                        {"max_budget_violation", m.max_budget_violation},
                        {"middle_below_top", m.x[1] < m.x[2]},
                        {"notes", m.notes}});
    }
    io::write_csv(io::join(dir, "table1.csv"), cols);
    CommandResult res;
    res.files = {"table1.csv", "table1.json"};
    res.summary = {{"types", t1.types},
                   {"p_top", t1.p_top},
                   {"budget", t1.budget},
                   {"restarts", t1.bic.restarts},
                   {"seed", t1.bic.seed},
                   {"tie_break", t1.bic.tie_break == TieBreak::kUniform ? "uniform" : "low-index"},
                   {"rows", rows}};
    io::write_json(io::join(dir, "table1.json"), res.summary);
    return res;
}

CommandResult cmd_subsidy(const RunConfig& cfg, const std::string& dir) {
    CommandResult res;
    std::vector<io::Column> cols{{"rate", {}},          {"cap", {}},           {"spend_normalization", {}},
                                 {"slack", {}},         {"raised_level", {}},  {"segment_end", {}},
                                 {"strict_measure", {}}, {"weakly_dominates", {}}};
    json rows = json::array();
    for (std::size_t i = 0; i < cfg.subsidy_rates.size(); ++i) {
        const double r = cfg.subsidy_rates[i];
        const auto d = dominance_check(cfg.spec, r, cfg.solver.grid);
        const double vals[] = {r,
                               d.base.cap,
                               d.base.spend_normalization,
                               d.slack,
                               d.raised_level,
                               d.segment_end,
                               d.strict_measure,
                               d.weakly_dominates ? 1.0 : 0.0};
        for (std::size_t c = 0; c < cols.size(); ++c) cols[c].values.push_back(vals[c]);
        const auto name = "subsidy_rate_" + std::to_string(i) + ".csv";
        io::write_csv(io::join(dir, name), {{"theta", d.base.schedule.theta},
                                            {"x_subsidy", d.base.schedule.x},
                                            {"t_subsidy", d.base.schedule.t},
                                            {"x_dominating", d.dominating.x},
                                            {"t_dominating", d.dominating.t}});
        res.files.push_back(name);
        rows.push_back({{"rate", r},
                        {"spend_normalization", d.base.spend_normalization},
                        {"below_budget", d.base.spend_normalization < cfg.spec.budget},
                        {"weakly_dominates", d.weakly_dominates},
                        {"strict_measure", d.strict_measure}});
    }
    io::write_csv(io::join(dir, "subsidy_benchmark.csv"), cols);
    res.files.push_back("subsidy_benchmark.csv");
    res.summary = {{"budget", cfg.spec.budget}, {"rates", rows}};
    io::write_json(io::join(dir, "subsidy_benchmark.json"), res.summary);
    res.files.push_back("subsidy_benchmark.json");
    return res;
}

CommandResult cmd_figures(const RunConfig& cfg, const std::string& dir) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    CommandResult res;
    const auto sol = solve_configured(cfg);
    const auto audit = audit_solution(sol, cfg);
    if (!audit.passed) fail(ErrorCode::kAuditFailed, "figures: audit failed: " + audit.failure);
    const auto label = variant_label(sol.variant);

    auto put = [&](const std::string& name, const io::PlotSpec& p) {
        io::write_text(io::join(dir, name), io::render_svg(p));
        res.files.push_back(name);
    };
    put("x_theta.svg", {"Action schedule (" + label + ")", "type", "action x", {{"x", sol.grid.theta, sol.grid.x}}});
    put("t_theta.svg",
        {"Transfer schedule (" + label + ")", "type", "transfer t", {{"t", sol.grid.theta, sol.grid.t, "#d62728"}}});

    const double k = figure_k(cfg);
    if (cfg.spec.variant == Variant::kBaseline || cfg.spec.variant == Variant::kLinearValue) {
        const auto spec_k = with_resource_value(cfg.spec, k);
        const auto opt = solve_linear_value(spec_k, cfg.solver);
        const auto naive = naive_solution(spec_k, cfg.solver);
        const auto& o = opt.grid;
        const auto& n = naive.solution.grid;
        put("naive_vs_optimal.svg",
            {"Optimal vs naive, k = " + io::fmt(k), "type", "action / transfer",
             {{"x optimal", o.theta, o.x, palette[0]},
              {"x naive", n.theta, n.x, palette[0], true},
              {"t optimal", o.theta, o.t, palette[1]},
              {"t naive", n.theta, n.t, palette[1], true}}});

        std::vector<MechanismSolution> sols;
        if (cfg.sweep_k.size() >= 3) {
            comparative_statics(cfg.spec, cfg.sweep_k, cfg.solver, &sols);
            io::PlotSpec p{"Action schedule across k", "type", "action x", {}};
            for (std::size_t i = 0; i < sols.size(); ++i)
                p.series.push_back({"k = " + io::fmt(cfg.sweep_k[i]), sols[i].grid.theta, sols[i].grid.x,
                                    palette[i % 6]});
            put("k_sweep.svg", p);
        }
        res.summary["naive"] = {{"k", k},
                                {"naive_x_bar", naive.solution.x_bar},
                                {"optimal_x_bar", opt.x_bar},
                                {"naive_spend", naive.solution.expected_spend},
                                {"optimal_spend", opt.expected_spend}};
    }
    res.summary["files"] = res.files;
    io::write_json(io::join(dir, "figures.json"), res.summary);
    res.files.push_back("figures.json");
    return res;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"solve",  "audit",  "sweep-k",           "sweep-T", "concavify",
                                                "oracle", "table1", "subsidy-benchmark", "figures"};
    return names;
}

MechanismSolution solve_configured(const RunConfig& cfg) {
    const auto& s = cfg.spec;
    switch (s.variant) {
        case Variant::kBaseline:
            return cfg.method == Method::kSeparable ? solve_separable(s, cfg.solver) : solve_baseline(s, cfg.solver);
        case Variant::kLinearValue:
            return solve_linear_value(s, cfg.solver);
        case Variant::kExAnte:
            return solve_exante(s, cfg.solver);
        case Variant::kMultiAgent:
            return solve_multi_agent(s, cfg.solver);
    }
    fail(ErrorCode::kInternal, "unhandled variant");
}

SolutionAudit audit_solution(const MechanismSolution& sol, const RunConfig& cfg) {
    SolutionAudit out;
    const double T = cfg.spec.budget;
    const double tol = feasibility_tolerance(T);
    if (sol.variant == Variant::kExAnte) {
        out.report = audit_ic_ir(sol.grid, cfg.spec.cost);
        out.report.budget_slack = T - sol.expected_spend;
        const bool spend_ok = sol.expected_spend <= T + std::max(tol, cfg.solver.tol * T);
        out.passed = out.report.max_ic_gain <= tol && out.report.min_ir_slack >= -tol && spend_ok;
        if (!spend_ok) out.failure = "expected spend " + io::fmt(sol.expected_spend) + " exceeds budget";
    } else {
        out.report = audit_ic_ir(sol.grid, cfg.spec.cost, T);
        out.passed = out.report.feasible;
        if (out.report.budget_slack < -tol) out.failure = "largest transfer exceeds budget";
    }
    out.report.feasible = out.passed;
    if (!out.passed && out.failure.empty()) {
        if (out.report.max_ic_gain > tol) out.failure = "worst IC pair: " + pair_text(out.report, sol.grid);
        else out.failure = "IR violated at type " + std::to_string(out.report.ir_type);
    }
    return out;
}

json solution_summary(const MechanismSolution& sol, const SolutionAudit& audit) {
    return {{"variant", variant_label(sol.variant)},
            {"method", sol.method},
            {"grid", sol.grid.size()},
            {"lambda", sol.lambda},
            {"resource_value", sol.resource_value},
            {"theta_hat", sol.theta_hat},
            {"x_bar", sol.x_bar},
            {"exclusion_threshold", optional_number(sol.exclusion_threshold)},
            {"complete_pooling", sol.complete_pooling},
            {"budget_binds", sol.budget_binds},
            {"budget_residual", sol.budget_residual},
            {"foc_residual_max", sol.foc_residual_max},
            {"threshold_residual", sol.threshold_residual},
            {"objective", sol.objective},
            {"expected_spend", sol.expected_spend},
            {"iterations", sol.iterations},
            {"audit", audit_json(audit.report)}};
}

std::vector<std::string> write_solution(const MechanismSolution& sol, const SolutionAudit& audit,
                                        const std::string& dir) {
    io::ensure_dir(dir);
    const auto& g = sol.grid;
    io::write_csv(io::join(dir, "solution.csv"), {{"theta", g.theta}, {"x", g.x}, {"t", g.t}, {"rho", sol.rho}});
    json header = solution_summary(sol, audit);
    std::vector<std::string> files{"solution.csv", "solution.json"};
    try {
        const auto sub = subsidy_schedule(g);
        io::write_csv(io::join(dir, "subsidy.csv"), {{"x_level", sub.x_level}, {"t_level", sub.t_level}});
        files.push_back("subsidy.csv");
        header["subsidy_levels"] = sub.x_level.size();
    } catch (const Error& e) {
        header["subsidy_levels"] = nullptr;
        header["subsidy_error"] = e.what();
    }
    io::write_json(io::join(dir, "solution.json"), header);
    return files;
}

CommandResult run_command(const std::string& name, const RunConfig& cfg, const std::string& out_dir,
                          const CommandOptions& opts) {
    io::ensure_dir(out_dir);
    if (name == "solve") return cmd_solve(cfg, out_dir);
    if (name == "audit") return cmd_audit(cfg, out_dir, opts);
    if (name == "sweep-k") return cmd_sweep_k(cfg, out_dir);
    if (name == "sweep-T") return cmd_sweep_T(cfg, out_dir);
    if (name == "concavify") return cmd_concavify(cfg, out_dir);
    if (name == "oracle") return cmd_oracle(cfg, out_dir);
    if (name == "table1") return cmd_table1(cfg, out_dir);
    if (name == "subsidy-benchmark") return cmd_subsidy(cfg, out_dir);
    if (name == "figures") return cmd_figures(cfg, out_dir);
    fail(ErrorCode::kConfig, "unknown command '" + name + "'");
}

}  // namespace bm
