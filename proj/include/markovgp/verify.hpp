#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "markovgp/posterior.hpp"

namespace markovgp {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

using PointEvaluator = std::function<PosteriorPoint(
    const ProcessModel&, const NodePosterior&, const Dataset&, double)>;

struct VerifyOptions {
    int trials = 20000;          // Monte Carlo trials for the MSE check (>= 1000)
    std::uint64_t seed = 7251;   // drives instance generation and simulation
    int instances = 60;          // randomized instances for the oracle check
    PointEvaluator evaluator;    // defaults to evaluate_posterior
};

/// Runs the oracle-equivalence, Brownian fast-path, Monte Carlo MSE, bridge,
/// noise-free MSE, and quantile checks; one result per check.
std::vector<CheckResult> run_verification(const VerifyOptions& options = {});

bool all_passed(const std::vector<CheckResult>& results);

} // namespace markovgp
