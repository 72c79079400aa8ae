#pragma once

#include "discrete.hpp"
#include "mechanism.hpp"

#include <cstdint>

namespace bm {

/// Baseline solve under the law of the most efficient of N agents.
MechanismSolution solve_multi_agent(const ProblemSpec& spec, const SolverConfig& cfg = {});

enum class TieBreak { kUniform, kLowIndex };

struct BicConfig {
    int restarts = 64;
    std::uint64_t seed = 20240601;
    TieBreak tie_break = TieBreak::kUniform;
    int max_outer = 40;
    int max_inner = 400;
};

/// Two agents, each paid only when their report wins (lowest type wins,
/// ties split per `tie_break`). Maximizes the winner's expected action
/// subject to Bayesian IC, IR and t <= budget.
DiscreteMechanism solve_discrete_bic(const std::vector<double>& types, const std::vector<double>& probs,
                                     const CostModel& cost, double budget, const BicConfig& cfg = {});

/// Probability that the winning (lowest) type is types[i].
std::vector<double> winner_weights(const std::vector<double>& probs);

/// Chance of winning when reporting types[j] against one truthful rival.
std::vector<double> win_probabilities(const std::vector<double>& probs, TieBreak tie);

/// Type probabilities of the three-type example: the top type has
/// probability p_top and the middle type carries share `delta` of the rest.
std::vector<double> example_probs(double delta, double p_top);

}  // namespace bm
