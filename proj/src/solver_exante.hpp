#pragma once

#include "mechanism.hpp"

namespace bm {

/// Only the expected transfer is capped. `lambda` in the result is the
/// multiplier on expected spend.
MechanismSolution solve_exante(const ProblemSpec& spec, const SolverConfig& cfg = {});

}  // namespace bm
