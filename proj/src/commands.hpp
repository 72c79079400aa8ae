#pragma once

#include "config.hpp"
#include "feasibility.hpp"
#include "mechanism.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace bm {

struct CommandOptions {
    std::string schedule_path;  // audit only
};

struct CommandResult {
    std::vector<std::string> files;  // relative to the output directory
    nlohmann::json summary;
};

const std::vector<std::string>& command_names();

/// Dispatches on the configured variant and method.
MechanismSolution solve_configured(const RunConfig& cfg);

/// Pairwise IC/IR audit plus the variant's budget test. `passed` is false
/// when the schedule must not be written.
struct SolutionAudit {
    AuditReport report;
    bool passed = false;
    std::string failure;
};

SolutionAudit audit_solution(const MechanismSolution& sol, const RunConfig& cfg);

nlohmann::json solution_summary(const MechanismSolution& sol, const SolutionAudit& audit);

/// Writes solution.csv, solution.json and subsidy.csv into `dir`.
std::vector<std::string> write_solution(const MechanismSolution& sol, const SolutionAudit& audit,
                                        const std::string& dir);

/// Throws Error on failure; a failed audit raises kAuditFailed after the
/// report has been written.
CommandResult run_command(const std::string& name, const RunConfig& cfg, const std::string& out_dir,
                          const CommandOptions& opts = {});

}  // namespace bm
