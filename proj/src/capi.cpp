#include "budgetmech/budgetmech.h"

#include "commands.hpp"
#include "config.hpp"
#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <string>

struct bm_problem {
    bm::RunConfig cfg;
};

struct bm_solution {
    bm::MechanismSolution sol;
    bm::SolutionAudit audit;
};

namespace {

thread_local std::string last_error;

bm_status record(bm::ErrorCode code, const char* what) {
    last_error = what;
    return static_cast<bm_status>(static_cast<int>(code));
}

template <class Fn>
bm_status guarded(Fn&& fn) {
    try {
        last_error.clear();
        return fn();
    } catch (const bm::Error& e) {
        return record(e.code(), e.what());
    } catch (const nlohmann::json::exception& e) {
        return record(bm::ErrorCode::kConfig, e.what());
    } catch (const std::bad_alloc&) {
        return record(bm::ErrorCode::kInternal, "out of memory");
    } catch (const std::exception& e) {
        return record(bm::ErrorCode::kInternal, e.what());
    } catch (...) {
        return record(bm::ErrorCode::kInternal, "unknown exception");
    }
}

bm_status null_arg(const char* what) {
    last_error = std::string(what) + " is null";
    return BM_INVALID_ARGUMENT;
}

bm_status copy_out(const std::vector<double>& v, double* out, size_t capacity) {
    if (!out && capacity) return null_arg("output buffer");
    std::copy_n(v.begin(), std::min(capacity, v.size()), out);
    return BM_OK;
}

}  // namespace

extern "C" {

const char* bm_version(void) { return "1.0.0"; }

const char* bm_status_name(bm_status status) {
    if (status == BM_OK) return "Ok";
    if (status < BM_INVALID_ARGUMENT || status > BM_INTERNAL_ERROR) return "Unknown";
    return bm::error_code_name(static_cast<bm::ErrorCode>(status));
}

const char* bm_last_error(void) { return last_error.c_str(); }

bm_status bm_problem_from_json(const char* json_text, bm_problem** out) {
    if (!json_text) return null_arg("json_text");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        auto p = std::make_unique<bm_problem>();
        p->cfg = bm::parse_config_text(json_text);
        *out = p.release();
        return BM_OK;
    });
}

bm_status bm_problem_from_file(const char* path, bm_problem** out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        auto p = std::make_unique<bm_problem>();
        p->cfg = bm::load_config(path);
        *out = p.release();
        return BM_OK;
    });
}

void bm_problem_free(bm_problem* problem) { delete problem; }

bm_status bm_problem_set_variant(bm_problem* problem, const char* name, double param) {
    if (!problem) return null_arg("problem");
    if (!name) return null_arg("name");
    return guarded([&] {
        bm::set_variant(problem->cfg, name, param);
        return BM_OK;
    });
}

bm_status bm_problem_override_variant(bm_problem* problem, const char* spec) {
    if (!problem) return null_arg("problem");
    if (!spec) return null_arg("spec");
    return guarded([&] {
        bm::apply_variant_override(problem->cfg, spec);
        return BM_OK;
    });
}

bm_status bm_problem_set_grid(bm_problem* problem, size_t grid) {
    if (!problem) return null_arg("problem");
    if (grid < 8) return record(bm::ErrorCode::kConfig, "grid must be >= 8");
    problem->cfg.solver.grid = grid;
    last_error.clear();
    return BM_OK;
}

bm_status bm_problem_set_tolerance(bm_problem* problem, double tol) {
    if (!problem) return null_arg("problem");
    if (!(tol > 0.0) || !std::isfinite(tol)) return record(bm::ErrorCode::kConfig, "tolerance must be positive");
    problem->cfg.solver.tol = tol;
    last_error.clear();
    return BM_OK;
}

bm_status bm_problem_set_seed(bm_problem* problem, uint64_t seed) {
    if (!problem) return null_arg("problem");
    problem->cfg.seed = seed;
    problem->cfg.table1.bic.seed = seed;
    last_error.clear();
    return BM_OK;
}

bm_status bm_problem_set_method(bm_problem* problem, const char* method) {
    if (!problem) return null_arg("problem");
    if (!method) return null_arg("method");
    const std::string m = method;
    if (m == "shooting") problem->cfg.method = bm::Method::kShooting;
    else if (m == "separable") problem->cfg.method = bm::Method::kSeparable;
    else return record(bm::ErrorCode::kConfig, "method must be 'shooting' or 'separable'");
    last_error.clear();
    return BM_OK;
}

bm_status bm_solve(const bm_problem* problem, bm_solution** out) {
    if (!problem) return null_arg("problem");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        auto s = std::make_unique<bm_solution>();
        s->sol = bm::solve_configured(problem->cfg);
        s->audit = bm::audit_solution(s->sol, problem->cfg);
        const bool passed = s->audit.passed;
        if (!passed) last_error = "audit failed: " + s->audit.failure;
        *out = s.release();
        return passed ? BM_OK : BM_AUDIT_FAILED;
    });
}

void bm_solution_free(bm_solution* solution) { delete solution; }

size_t bm_solution_size(const bm_solution* solution) { return solution ? solution->sol.grid.size() : 0; }

bm_status bm_solution_info_get(const bm_solution* solution, bm_solution_info* info) {
    if (!solution) return null_arg("solution");
    if (!info) return null_arg("info");
    const auto& s = solution->sol;
    info->grid = s.grid.size();
    info->lambda = s.lambda;
    info->resource_value = s.resource_value;
    info->theta_hat = s.theta_hat;
    info->x_bar = s.x_bar;
    info->exclusion_threshold = s.exclusion_threshold.value_or(std::numeric_limits<double>::quiet_NaN());
    info->complete_pooling = s.complete_pooling;
    info->budget_binds = s.budget_binds;
    info->budget_residual = s.budget_residual;
    info->objective = s.objective;
    info->expected_spend = s.expected_spend;
    info->max_ic_gain = solution->audit.report.max_ic_gain;
    info->min_ir_slack = solution->audit.report.min_ir_slack;
    info->audit_passed = solution->audit.passed;
    return BM_OK;
}

bm_status bm_solution_theta(const bm_solution* solution, double* out, size_t capacity) {
    if (!solution) return null_arg("solution");
    return copy_out(solution->sol.grid.theta, out, capacity);
}

bm_status bm_solution_action(const bm_solution* solution, double* out, size_t capacity) {
    if (!solution) return null_arg("solution");
    return copy_out(solution->sol.grid.x, out, capacity);
}

bm_status bm_solution_transfer(const bm_solution* solution, double* out, size_t capacity) {
    if (!solution) return null_arg("solution");
    return copy_out(solution->sol.grid.t, out, capacity);
}

bm_status bm_solution_costate(const bm_solution* solution, double* out, size_t capacity) {
    if (!solution) return null_arg("solution");
    return copy_out(solution->sol.rho, out, capacity);
}

bm_status bm_solution_write(const bm_solution* solution, const char* out_dir) {
    if (!solution) return null_arg("solution");
    if (!out_dir) return null_arg("out_dir");
    return guarded([&] {
        bm::write_solution(solution->sol, solution->audit, out_dir);
        return BM_OK;
    });
}

bm_status bm_run_command(const char* command, const bm_problem* problem, const char* out_dir,
                         const char* options_json, char** summary_out) {
    if (!command) return null_arg("command");
    if (!problem) return null_arg("problem");
    if (!out_dir) return null_arg("out_dir");
    if (summary_out) *summary_out = nullptr;
    return guarded([&] {
        bm::CommandOptions opts;
        if (options_json && *options_json) {
            const auto j = nlohmann::json::parse(options_json);
            if (!j.is_object()) bm::fail(bm::ErrorCode::kConfig, "options must be a JSON object");
            for (const auto& [key, value] : j.items()) {
                if (key == "schedule") opts.schedule_path = value.get<std::string>();
                else bm::fail(bm::ErrorCode::kConfig, "unknown option '" + key + "'");
            }
        }
        const auto res = bm::run_command(command, problem->cfg, out_dir, opts);
        if (summary_out) {
            const std::string text = nlohmann::json{{"files", res.files}, {"summary", res.summary}}.dump();
            char* buf = static_cast<char*>(std::malloc(text.size() + 1));
            if (!buf) bm::fail(bm::ErrorCode::kInternal, "out of memory");
            std::memcpy(buf, text.c_str(), text.size() + 1);
            *summary_out = buf;
        }
        return BM_OK;
    });
}

void bm_string_free(char* text) { std::free(text); }

}  // extern "C"
