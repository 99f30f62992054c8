#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "markovgp/posterior.hpp"
#include "markovgp/process.hpp"

namespace markovgp {

struct PointMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Ground-truth posterior moments by one dense partitioned conditioning of
/// (f(q_1), ..., f(q_m), y_1, ..., y_n) on y. Makes no use of the Markov
/// shortcuts, so it independently checks evaluate_posterior.
std::vector<PointMoments> dense_oracle(const ProcessModel& model, const Dataset& data,
                                       std::span<const double> queries);

struct McMseResult {
    double mse = 0.0;
    double std_error = 0.0;
    int trials = 0;
};

/// Empirical mean squared error of the posterior-mean estimate at x for a
/// fixed design (locations + error covariance): each trial draws a path value
/// vector and errors, fits, evaluates, and accumulates (f(x) - fhat(x))^2.
/// Since the Gaussian posterior variance does not depend on the y values,
/// the unconditional expectation of this squared error equals Var(f(x) | D).
/// Trials are independently seeded from (seed, trial) and run concurrently;
/// the reduction is a deterministic pairwise sum. Requires trials >= 1000.
McMseResult mc_mse(const ProcessModel& model, const Eigen::VectorXd& xs,
                   const Eigen::MatrixXd& error_cov, double x, int trials, std::uint64_t seed);

/// Closed-form noise-free MSE for Brownian motion with known origin
/// (sigma0 = 0) sampled without noise at distinct positive locations:
///   sigma^2 * { x(x1 - x)/x1            for x < x1
///               (x_{k+1} - x)(x - x_k)/(x_{k+1} - x_k)  inside a piece
///               x - x_n                 beyond the last sample }
double noise_free_mse(double sigma, std::span<const double> xs, double x);

} // namespace markovgp
