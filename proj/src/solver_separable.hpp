#pragma once

#include "mechanism.hpp"

#include <vector>

namespace bm {

/// Least concave majorant of the CDF on [0, hi], with F = 0 below the support.
struct ConcaveEnvelope {
    struct Chord {
        double a = 0.0;
        double b = 0.0;
        double slope = 0.0;
    };

    std::vector<double> theta;
    std::vector<double> F;
    std::vector<double> cav;
    std::vector<double> f_tilde;  // left slope of the hull on each grid cell
    std::vector<Chord> chords;    // hull segments spanning more than one cell, endpoints refined

    /// Left derivative of the majorant: chord slope inside a chord, else the density.
    double f_tilde_at(double theta, const TypeDistribution& dist) const;

    /// Right end of the chord leaving the origin.
    double pooling_end() const;
};

ConcaveEnvelope concave_majorant(const TypeDistribution& dist, std::size_t grid_size = 2048);

MechanismSolution solve_separable(const ProblemSpec& spec, const SolverConfig& cfg = {});

struct ThresholdInvariance {
    std::vector<double> budgets;
    std::vector<double> theta_hat;
    double spread = 0.0;
};

ThresholdInvariance threshold_invariance_report(const ProblemSpec& spec, const std::vector<double>& budgets,
                                                const SolverConfig& cfg = {});

}  // namespace bm
