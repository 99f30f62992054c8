#include "markovgp/process.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "markovgp/gaussian.hpp"

namespace markovgp {

namespace {

void check_domain(double x, const char* what) {
    if (!(x >= 0.0))
        throw DomainError(std::string(what) + ": location " + std::to_string(x) +
                          " outside the process domain [0, inf)");
}

} // namespace

ProcessModel::ProcessModel(MeanFn mean, CovFn cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
    auto c = cov_;
    var_ = [c](double x) { return c(x, x); };
}

ProcessModel::ProcessModel(MeanFn mean, CovFn cov, VarFn var)
    : mean_(std::move(mean)), cov_(std::move(cov)), var_(std::move(var)) {}

double ProcessModel::mean(double x) const {
    check_domain(x, "mean");
    return mean_(x);
}

double ProcessModel::cov(double x, double xp) const {
    check_domain(x, "cov");
    check_domain(xp, "cov");
    return cov_(x, xp);
}

double ProcessModel::var(double x) const {
    check_domain(x, "var");
    return var_(x);
}

Eigen::MatrixXd ProcessModel::gram(const Eigen::VectorXd& xs) const {
    const Eigen::Index n = xs.size();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = var(xs(i));
        for (Eigen::Index j = 0; j < i; ++j) {
            const double c = cov(xs(i), xs(j));
            k(i, j) = c;
            k(j, i) = c;
        }
    }
    return k;
}

BrownianMotionModel::BrownianMotionModel(double mu0, double mu, double sigma0, double sigma)
    : mu0(mu0), mu(mu), sigma0(sigma0), sigma(sigma) {
    if (!(sigma0 >= 0.0) || !(sigma >= 0.0))
        throw InvalidParameter("BrownianMotionModel: sigma0 and sigma must be non-negative (got " +
                               std::to_string(sigma0) + ", " + std::to_string(sigma) + ")");
}

ProcessModel BrownianMotionModel::process() const {
    const BrownianMotionModel bm = *this;
    return ProcessModel([bm](double x) { return bm.mean(x); },
                        [bm](double x, double xp) { return bm.cov(x, xp); },
                        [bm](double x) { return bm.var(x); });
}

ProcessModel brownian(double mu0, double mu, double sigma0, double sigma) {
    return BrownianMotionModel(mu0, mu, sigma0, sigma).process();
}

bool validate_markov(const ProcessModel& model, std::span<const std::array<double, 3>> triples) {
    constexpr double rel_tol = 1e-9;
    for (const auto& t : triples) {
        const auto [x, xp, xpp] = t;
        if (!(x < xp && xp < xpp))
            throw InvalidParameter("validate_markov: triple (" + std::to_string(x) + ", " +
                                   std::to_string(xp) + ", " + std::to_string(xpp) +
                                   ") is not strictly increasing");
        const double lhs = model.cov(x, xpp) * model.var(xp);
        const double rhs = model.cov(x, xp) * model.cov(xp, xpp);
        const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
        if (std::abs(lhs - rhs) > rel_tol * scale) return false;
    }
    return true;
}

Eigen::MatrixXd sample_paths(const ProcessModel& model, const Eigen::VectorXd& grid, int count,
                             std::uint64_t seed) {
    const Eigen::Index n = grid.size();
    Eigen::VectorXd mean(n);
    for (Eigen::Index i = 0; i < n; ++i) mean(i) = model.mean(grid(i));
    GaussianVector joint(std::move(mean), model.gram(grid));
    return sample(joint, count, seed);
}

} // namespace markovgp
