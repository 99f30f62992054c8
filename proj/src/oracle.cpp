#include "markovgp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "markovgp/gaussian.hpp"
#include "markovgp/parallel.hpp"
#include "markovgp/rng.hpp"

namespace markovgp {

std::vector<PointMoments> dense_oracle(const ProcessModel& model, const Dataset& data,
                                       std::span<const double> queries) {
    const Eigen::Index nq = static_cast<Eigen::Index>(queries.size());
    const Eigen::Index n = data.size();
    if (nq == 0) return {};

    const Eigen::Index dim = nq + n;
    Eigen::VectorXd all_x(dim);
    for (Eigen::Index i = 0; i < nq; ++i) all_x(i) = queries[i];
    all_x.tail(n) = data.xs();

    Eigen::VectorXd mu(dim);
    for (Eigen::Index i = 0; i < dim; ++i) mu(i) = model.mean(all_x(i));

    Eigen::MatrixXd sigma = model.gram(all_x);
    sigma.bottomRightCorner(n, n) += data.error_cov();

    auto part =
        PartitionedGaussian::contiguous(GaussianVector(std::move(mu), std::move(sigma)), nq);
    const Conditioned c = condition(part, data.ys());

    std::vector<PointMoments> out(static_cast<std::size_t>(nq));
    for (Eigen::Index i = 0; i < nq; ++i)
        out[static_cast<std::size_t>(i)] = {c.dist.mean()(i), c.dist.cov()(i, i)};
    return out;
}

McMseResult mc_mse(const ProcessModel& model, const Eigen::VectorXd& xs,
                   const Eigen::MatrixXd& error_cov, double x, int trials, std::uint64_t seed) {
    if (trials < 1000)
        throw InvalidParameter("mc_mse: needs at least 1000 trials, got " +
                               std::to_string(trials));
    const Eigen::Index n = xs.size();
    if (n < 1) throw InvalidParameter("mc_mse: design must contain at least one location");

    // Joint prior over (f(x_1..n), f(x)); PSD-tolerant factor handles x
    // coinciding with a design point.
    Eigen::VectorXd joint_x(n + 1);
    joint_x.head(n) = xs;
    joint_x(n) = x;
    Eigen::VectorXd joint_mean(n + 1);
    for (Eigen::Index i = 0; i <= n; ++i) joint_mean(i) = model.mean(joint_x(i));
    const CholeskyFactor path_factor = cholesky_psd(model.gram(joint_x));
    const CholeskyFactor noise_factor = cholesky_psd(error_cov);

    std::vector<double> squared_errors(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t trial) {
        NormalSampler rng(seed, static_cast<std::uint64_t>(trial));
        Eigen::VectorXd z(n + 1);
        for (Eigen::Index i = 0; i <= n; ++i) z(i) = rng.normal();
        const Eigen::VectorXd f = joint_mean + path_factor.factor * z;

        Eigen::VectorXd eps(n);
        for (Eigen::Index i = 0; i < n; ++i) eps(i) = rng.normal();
        const Eigen::VectorXd ys = f.head(n) + noise_factor.factor * eps;

        const Dataset data(xs, ys, error_cov);
        const NodePosterior nodes = node_posterior(model, data);
        const PosteriorPoint pt = evaluate_posterior(model, nodes, data, x);

        const double diff = f(n) - pt.mean;
        squared_errors[trial] = diff * diff;
    });

    McMseResult out;
    out.trials = trials;
    out.mse = pairwise_sum(squared_errors) / trials;

    std::vector<double> centered(squared_errors.size());
    for (std::size_t i = 0; i < squared_errors.size(); ++i) {
        const double d = squared_errors[i] - out.mse;
        centered[i] = d * d;
    }
    const double variance = pairwise_sum(centered) / (trials - 1);
    out.std_error = std::sqrt(variance / trials);
    return out;
}

double noise_free_mse(double sigma, std::span<const double> xs, double x) {
    if (!(sigma >= 0.0)) throw InvalidParameter("noise_free_mse: sigma must be >= 0");
    if (!(x >= 0.0))
        throw InvalidParameter("noise_free_mse: x = " + std::to_string(x) +
                               " outside [0, inf)");
    if (xs.empty()) throw InvalidParameter("noise_free_mse: needs at least one location");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0))
            throw InvalidParameter("noise_free_mse: locations must be positive");
        if (i > 0 && !(xs[i] > xs[i - 1]))
            throw InvalidParameter("noise_free_mse: locations must be strictly increasing");
    }

    const double s2 = sigma * sigma;
    if (x < xs.front()) return s2 * x * (xs.front() - x) / xs.front();
    if (x >= xs.back()) return s2 * (x - xs.back());
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const double hi = *it;
    const double lo = *(it - 1);
    return s2 * (hi - x) * (x - lo) / (hi - lo);
}

} // namespace markovgp
