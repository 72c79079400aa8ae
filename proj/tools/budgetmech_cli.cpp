#include <budgetmech/budgetmech.h>

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <optional>
#include <string>

namespace {

struct Flags {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> grid;
    std::optional<double> tol;
    std::string variant_override;
    std::string schedule;
};

int exit_code(bm_status s) {
    // Argument errors surface as configuration errors on the command line.
    if (s == BM_INVALID_ARGUMENT) return 2;
    return static_cast<int>(s);
}

int report(bm_status s) {
    std::fprintf(stderr, "error [%s]: %s\n", bm_status_name(s), bm_last_error());
    return exit_code(s);
}

using ProblemPtr = std::unique_ptr<bm_problem, decltype(&bm_problem_free)>;

int run(const std::string& command, const Flags& f) {
    bm_problem* raw = nullptr;
    bm_status s = bm_problem_from_file(f.config.c_str(), &raw);
    if (s != BM_OK) return report(s);
    ProblemPtr problem(raw, bm_problem_free);

    if (f.seed && (s = bm_problem_set_seed(problem.get(), *f.seed)) != BM_OK) return report(s);
    if (f.grid && (s = bm_problem_set_grid(problem.get(), *f.grid)) != BM_OK) return report(s);
    if (f.tol && (s = bm_problem_set_tolerance(problem.get(), *f.tol)) != BM_OK) return report(s);
    if (!f.variant_override.empty() &&
        (s = bm_problem_override_variant(problem.get(), f.variant_override.c_str())) != BM_OK)
        return report(s);

    std::string options;
    if (!f.schedule.empty()) {
        std::string escaped;
        for (char c : f.schedule) {
            if (c == '"' || c == '\\') escaped += '\\';
            escaped += c;
        }
        options = "{\"schedule\":\"" + escaped + "\"}";
    }
    char* summary = nullptr;
    s = bm_run_command(command.c_str(), problem.get(), f.out.c_str(), options.empty() ? nullptr : options.c_str(),
                       &summary);
    if (s != BM_OK) return report(s);
    std::printf("%s\n", summary);
    bm_string_free(summary);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Budget-constrained mechanism solver"};
    app.set_version_flag("--version", std::string(bm_version()));
    app.require_subcommand(1);

    Flags flags;
    const char* commands[][2] = {
        {"solve", "Solve the configured variant, audit it and write the schedule"},
        {"audit", "Audit a schedule CSV (theta, x[, t]) for IC, IR and the budget"},
        {"sweep-k", "Comparative statics across resource values k"},
        {"sweep-T", "Pooling threshold across budgets"},
        {"concavify", "Concave majorant of the type CDF"},
        {"oracle", "Discrete brute-force optimum"},
        {"table1", "Two-agent three-type BIC example"},
        {"subsidy-benchmark", "Linear subsidies and the schedules that dominate them"},
        {"figures", "SVG plots of the schedules"},
    };
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c[0], c[1]);
        sub->add_option("--config", flags.config, "Problem config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "Output directory")->capture_default_str();
        sub->add_option("--seed", flags.seed, "Seed for randomized restarts");
        sub->add_option("--grid", flags.grid, "Type grid size")->check(CLI::Range(8, 1 << 22));
        sub->add_option("--tol", flags.tol, "Solver tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--variant-override", flags.variant_override,
                        "baseline | ex_ante | linear_value:K | multi_agent:N");
        if (std::string(c[0]) == "audit")
            sub->add_option("--schedule", flags.schedule, "Schedule CSV to audit")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    for (auto* sub : app.get_subcommands()) return run(sub->get_name(), flags);
    return 2;
}
