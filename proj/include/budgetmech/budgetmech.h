#ifndef BUDGETMECH_H
#define BUDGETMECH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BUDGETMECH_BUILDING)
#    define BM_API __declspec(dllexport)
#  else
#    define BM_API __declspec(dllimport)
#  endif
#else
#  define BM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bm_status {
    BM_OK = 0,
    BM_INVALID_ARGUMENT = 1,
    BM_CONFIG_ERROR = 2,
    BM_NO_CONVERGENCE = 3,
    BM_AUDIT_FAILED = 4,
    BM_REGULARITY_VIOLATED = 5,
    BM_DEGENERATE = 6,
    BM_IO_ERROR = 7,
    BM_INTERNAL_ERROR = 8
} bm_status;

typedef struct bm_problem bm_problem;
typedef struct bm_solution bm_solution;

typedef struct bm_solution_info {
    size_t grid;
    double lambda;
    double resource_value;
    double theta_hat;
    double x_bar;
    double exclusion_threshold; /* NaN when there is no exclusion */
    int complete_pooling;
    int budget_binds;
    double budget_residual;
    double objective;
    double expected_spend;
    double max_ic_gain;
    double min_ir_slack;
    int audit_passed;
} bm_solution_info;

BM_API const char* bm_version(void);
BM_API const char* bm_status_name(bm_status status);

/* Message for the last failure on the calling thread; empty after success. */
BM_API const char* bm_last_error(void);

BM_API bm_status bm_problem_from_json(const char* json_text, bm_problem** out);
BM_API bm_status bm_problem_from_file(const char* path, bm_problem** out);
BM_API void bm_problem_free(bm_problem* problem);

/* name: "baseline", "linear_value", "ex_ante" or "multi_agent";
   param is k for linear_value and the number of agents for multi_agent. */
BM_API bm_status bm_problem_set_variant(bm_problem* problem, const char* name, double param);
BM_API bm_status bm_problem_override_variant(bm_problem* problem, const char* spec);
BM_API bm_status bm_problem_set_grid(bm_problem* problem, size_t grid);
BM_API bm_status bm_problem_set_tolerance(bm_problem* problem, double tol);
BM_API bm_status bm_problem_set_seed(bm_problem* problem, uint64_t seed);
BM_API bm_status bm_problem_set_method(bm_problem* problem, const char* method);

/* Solves and audits. A solution that fails the audit is still returned
   with BM_AUDIT_FAILED so callers can inspect it. */
BM_API bm_status bm_solve(const bm_problem* problem, bm_solution** out);
BM_API void bm_solution_free(bm_solution* solution);

BM_API size_t bm_solution_size(const bm_solution* solution);
BM_API bm_status bm_solution_info_get(const bm_solution* solution, bm_solution_info* info);

/* Copies min(capacity, size) values; returns BM_INVALID_ARGUMENT on null pointers. */
BM_API bm_status bm_solution_theta(const bm_solution* solution, double* out, size_t capacity);
BM_API bm_status bm_solution_action(const bm_solution* solution, double* out, size_t capacity);
BM_API bm_status bm_solution_transfer(const bm_solution* solution, double* out, size_t capacity);
BM_API bm_status bm_solution_costate(const bm_solution* solution, double* out, size_t capacity);

BM_API bm_status bm_solution_write(const bm_solution* solution, const char* out_dir);

/* Runs a named command ("solve", "audit", "sweep-k", "sweep-T", "concavify",
   "oracle", "table1", "subsidy-benchmark", "figures"). options_json may be
   NULL or an object such as {"schedule": "path.csv"}. When summary_out is
   not NULL it receives a malloc'd JSON summary to release with bm_string_free. */
BM_API bm_status bm_run_command(const char* command, const bm_problem* problem, const char* out_dir,
                                const char* options_json, char** summary_out);
BM_API void bm_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif
