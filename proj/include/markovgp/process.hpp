#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>

#include "markovgp/errors.hpp"

namespace markovgp {

/// Prior Gauss-Markov process described by its first two moment functions:
/// mean m(x), covariance C(x, x') and variance V(x) = C(x, x'), all on
/// [0, inf). Custom kernels can be supplied directly; validate_markov gates
/// them at configuration time. Evaluation at x < 0 raises DomainError.
class ProcessModel {
public:
    using MeanFn = std::function<double(double)>;
    using CovFn = std::function<double(double, double)>;
    using VarFn = std::function<double(double)>;

    /// Variance defaults to cov(x, x), keeping V(x) = C(x, x) identically.
    ProcessModel(MeanFn mean, CovFn cov);
    ProcessModel(MeanFn mean, CovFn cov, VarFn var);

    double mean(double x) const;
    double cov(double x, double xp) const;
    double var(double x) const;

    /// Gram matrix [C(xs_i, xs_j)].
    Eigen::MatrixXd gram(const Eigen::VectorXd& xs) const;

private:
    MeanFn mean_;
    CovFn cov_;
    VarFn var_;
};

/// Brownian motion with drift mu, scale sigma and uncertain initial value
/// N(mu0, sigma0^2):
///   m(x) = mu0 + mu*x,   C(x, x') = sigma0^2 + sigma^2 * min(x, x').
struct BrownianMotionModel {
    double mu0 = 0.0;
    double mu = 0.0;
    double sigma0 = 0.0;
    double sigma = 1.0;

    BrownianMotionModel() = default;
    BrownianMotionModel(double mu0, double mu, double sigma0, double sigma);

    double mean(double x) const { return mu0 + mu * x; }
    double cov(double x, double xp) const {
        return sigma0 * sigma0 + sigma * sigma * (x < xp ? x : xp);
    }
    double var(double x) const { return sigma0 * sigma0 + sigma * sigma * x; }

    /// The same model behind the generic interface.
    ProcessModel process() const;
};

/// Brownian ProcessModel factory. Throws InvalidParameter on negative scales.
/// sigma0 = sigma = 0 yields the deterministic line m(x) = mu0 + mu*x.
ProcessModel brownian(double mu0, double mu, double sigma0, double sigma);

/// Checks the Gauss-Markov covariance factorization C(x, x'')V(x') =
/// C(x, x')C(x', x'') on every triple, to 1e-9 relative. Triples must be
/// strictly increasing. Diagnostic: returns false rather than throwing when
/// the identity fails.
bool validate_markov(const ProcessModel& model, std::span<const std::array<double, 3>> triples);

/// One joint draw of the process at each grid point per row; count rows.
/// Exact Gaussian sampling through the Gram matrix, deterministic per seed.
Eigen::MatrixXd sample_paths(const ProcessModel& model, const Eigen::VectorXd& grid, int count,
                             std::uint64_t seed);

} // namespace markovgp
