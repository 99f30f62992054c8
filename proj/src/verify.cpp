#include "markovgp/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "markovgp/io.hpp"
#include "markovgp/oracle.hpp"
#include "markovgp/rng.hpp"

namespace markovgp {

namespace {

// Uniform helper on top of the deterministic sampler.
double uniform_in(NormalSampler& rng, double lo, double hi) {
    return lo + (hi - lo) * rng.uniform();
}

struct Instance {
    BrownianMotionModel bm;
    Dataset data;
};

Instance random_instance(std::uint64_t seed, std::uint64_t index) {
    NormalSampler rng(seed, index);
    const double mu0 = uniform_in(rng, -2.0, 2.0);
    const double mu = uniform_in(rng, -1.0, 1.0);
    const double sigma0 = uniform_in(rng, 0.0, 1.0);
    const double sigma = uniform_in(rng, 0.1, 2.0);
    BrownianMotionModel bm(mu0, mu, sigma0, sigma);

    const int n = 1 + static_cast<int>(uniform_in(rng, 0.0, 8.0) * 0.999999);
    Eigen::VectorXd xs(n);
    double x = uniform_in(rng, 0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        xs(i) = x;
        x += uniform_in(rng, 0.05, 2.0);
    }

    // Rotate through iid, diagonal, and dense PSD error covariances.
    Eigen::MatrixXd ecov = Eigen::MatrixXd::Zero(n, n);
    switch (index % 3) {
        case 0:
            ecov.diagonal().setConstant(uniform_in(rng, 0.05, 1.5));
            break;
        case 1:
            for (int i = 0; i < n; ++i) ecov(i, i) = uniform_in(rng, 0.05, 1.5);
            break;
        default: {
            Eigen::MatrixXd a(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
            ecov = a * a.transpose() / n;
            ecov.diagonal().array() += 0.05;
            break;
        }
    }

    Eigen::VectorXd ys(n);
    for (int i = 0; i < n; ++i) ys(i) = bm.mean(xs(i)) + rng.normal();
    return Instance{bm, Dataset(xs, ys, ecov)};
}

CheckResult check_oracle_equivalence(const VerifyOptions& opt, const PointEvaluator& eval) {
    double worst = 0.0;
    for (int inst = 0; inst < opt.instances; ++inst) {
        const Instance in = random_instance(opt.seed, 1000 + static_cast<std::uint64_t>(inst));
        const ProcessModel model = in.bm.process();
        const NodePosterior nodes = node_posterior(model, in.data);

        NormalSampler qrng(opt.seed, 5000 + static_cast<std::uint64_t>(inst));
        const double xmax = in.data.xs()(in.data.size() - 1);
        std::vector<double> queries(40);
        for (auto& q : queries) q = uniform_in(qrng, 0.0, 1.25 * xmax + 0.5);

        const auto truth = dense_oracle(model, in.data, queries);
        for (std::size_t i = 0; i < queries.size(); ++i) {
            const PosteriorPoint pt = eval(model, nodes, in.data, queries[i]);
            worst = std::max(worst, std::abs(pt.mean - truth[i].mean));
            worst = std::max(worst, std::abs(pt.variance - truth[i].variance));
        }
    }
    CheckResult res;
    res.name = "oracle-equivalence";
    res.passed = worst <= 1e-9;
    res.detail = "max |theorem - dense| = " + format_double(worst) + " over " +
                 std::to_string(opt.instances) + " instances (tol 1e-9)";
    return res;
}

CheckResult check_brownian_fast(const VerifyOptions& opt, const PointEvaluator& eval) {
    double worst = 0.0;
    for (int inst = 0; inst < opt.instances; ++inst) {
        const Instance in = random_instance(opt.seed, 20000 + static_cast<std::uint64_t>(inst));
        const ProcessModel model = in.bm.process();
        const NodePosterior nodes = node_posterior(model, in.data);

        NormalSampler qrng(opt.seed, 25000 + static_cast<std::uint64_t>(inst));
        const double xmax = in.data.xs()(in.data.size() - 1);
        for (int q = 0; q < 40; ++q) {
            const double x = uniform_in(qrng, 0.0, 1.25 * xmax + 0.5);
            const PosteriorPoint general = eval(model, nodes, in.data, x);
            const PosteriorPoint fast = evaluate_brownian_fast(in.bm, nodes, in.data, x);
            worst = std::max(worst, std::abs(general.mean - fast.mean));
            worst = std::max(worst, std::abs(general.variance - fast.variance));
        }
    }
    CheckResult res;
    res.name = "brownian-fast-equivalence";
    res.passed = worst <= 1e-10;
    res.detail = "max |general - fast| = " + format_double(worst) + " (tol 1e-10)";
    return res;
}

CheckResult check_mc_mse(const VerifyOptions& opt, const PointEvaluator& eval) {
    // Four samples at x_i = 2^(i-1) with iid unit noise, standard Brownian
    // motion started at 0.
    const BrownianMotionModel bm(0.0, 0.0, 0.0, 1.0);
    const ProcessModel model = bm.process();
    Eigen::VectorXd xs(4);
    xs << 1.0, 2.0, 4.0, 8.0;
    Eigen::MatrixXd ecov = Eigen::MatrixXd::Identity(4, 4);

    std::ostringstream detail;
    bool ok = true;
    for (const double x : {0.5, 3.0, 10.0}) {
        const McMseResult mc = mc_mse(model, xs, ecov, x, opt.trials, opt.seed);
        const Dataset probe(xs, Eigen::VectorXd::Zero(4), ecov);
        const std::array<double, 1> query{x};
        const double analytic = dense_oracle(model, probe, query).front().variance;
        const double gap = std::abs(mc.mse - analytic);
        const bool pass = gap <= 3.0 * mc.std_error;
        ok = ok && pass;
        detail << "x=" << format_double(x) << ": |" << format_double(mc.mse) << " - "
               << format_double(analytic) << "| vs 3SE=" << format_double(3.0 * mc.std_error)
               << (pass ? " ok; " : " FAIL; ");
    }
    (void)eval;
    CheckResult res;
    res.name = "monte-carlo-mse";
    res.passed = ok;
    res.detail = detail.str();
    return res;
}

CheckResult check_bridge(const VerifyOptions& opt) {
    double worst = 0.0;
    for (int inst = 0; inst < 25; ++inst) {
        NormalSampler rng(opt.seed, 40000 + static_cast<std::uint64_t>(inst));
        const BrownianMotionModel bm(uniform_in(rng, -2.0, 2.0), uniform_in(rng, -1.0, 1.0),
                                     uniform_in(rng, 0.0, 1.0), uniform_in(rng, 0.1, 2.0));
        const ProcessModel model = bm.process();
        const double x1 = uniform_in(rng, 0.1, 3.0);
        const double x2 = x1 + uniform_in(rng, 0.3, 3.0);
        Eigen::VectorXd xs(2), ys(2);
        xs << x1, x2;
        ys << bm.mean(x1) + rng.normal(), bm.mean(x2) + rng.normal();
        Eigen::MatrixXd ecov = Eigen::MatrixXd::Zero(2, 2);
        ecov(0, 0) = uniform_in(rng, 0.05, 1.0);
        ecov(1, 1) = uniform_in(rng, 0.05, 1.0);
        const Dataset data(xs, ys, ecov);
        const NodePosterior nodes = node_posterior(model, data);

        const double s1 = std::sqrt(std::max(nodes.cov(0, 0), 0.0));
        const double s2 = std::sqrt(std::max(nodes.cov(1, 1), 0.0));
        double rho = nodes.cov(0, 1) / (s1 * s2);
        rho = std::clamp(rho, -1.0, 1.0);

        for (int q = 0; q < 10; ++q) {
            const double x = uniform_in(rng, x1, x2);
            const auto [bmean, bvar] =
                bridge_moments(nodes.mean(0), nodes.mean(1), s1, s2, rho, x1, x2, bm.sigma, x);
            const std::array<double, 1> query{x};
            const auto truth = dense_oracle(model, data, query).front();
            worst = std::max(worst, std::abs(bmean - truth.mean));
            worst = std::max(worst, std::abs(bvar - truth.variance));
        }
    }
    CheckResult res;
    res.name = "bridge-oracle";
    res.passed = worst <= 1e-9;
    res.detail = "max |bridge - dense| = " + format_double(worst) + " (tol 1e-9)";
    return res;
}

CheckResult check_noise_free_mse(const VerifyOptions& opt, const PointEvaluator& eval) {
    double worst = 0.0;
    for (int inst = 0; inst < 10; ++inst) {
        NormalSampler rng(opt.seed, 60000 + static_cast<std::uint64_t>(inst));
        const double sigma = uniform_in(rng, 0.1, 2.0);
        const BrownianMotionModel bm(uniform_in(rng, -1.0, 1.0), uniform_in(rng, -1.0, 1.0), 0.0,
                                     sigma);
        const ProcessModel model = bm.process();
        const int n = 1 + static_cast<int>(uniform_in(rng, 0.0, 6.0) * 0.999999);
        Eigen::VectorXd xs(n), ys(n);
        double x = uniform_in(rng, 0.2, 1.0);
        for (int i = 0; i < n; ++i) {
            xs(i) = x;
            ys(i) = bm.mean(x) + rng.normal();
            x += uniform_in(rng, 0.2, 1.5);
        }
        const Dataset data = Dataset::noise_free(xs, ys);
        const NodePosterior nodes = node_posterior(model, data);
        std::vector<double> grid(xs.data(), xs.data() + n);
        for (int q = 0; q < 50; ++q) {
            const double xq = uniform_in(rng, 0.0, xs(n - 1) * 1.3);
            const double predicted = eval(model, nodes, data, xq).variance;
            const double closed = noise_free_mse(sigma, grid, xq);
            worst = std::max(worst, std::abs(predicted - closed));
        }
    }
    CheckResult res;
    res.name = "noise-free-mse";
    res.passed = worst <= 1e-10;
    res.detail = "max |variance - closed form| = " + format_double(worst) + " (tol 1e-10)";
    return res;
}

CheckResult check_quantiles() {
    // Reference values computed with 30-digit arithmetic (sqrt(2)*erfinv(p)).
    static const double levels[] = {0.1, 0.3, 0.5, 0.8, 0.9, 0.95, 0.99, 0.999};
    static const double zs[] = {0.12566134685507403, 0.38532046640756762, 0.67448975019608174,
                                1.2815515655446005,  1.6448536269514727,  1.9599639845400542,
                                2.5758293035489008,  3.2905267314918948};
    double worst = 0.0;
    for (std::size_t i = 0; i < std::size(levels); ++i) {
        const double z = normal_quantile(0.5 * (1.0 + levels[i]));
        worst = std::max(worst, std::abs(z - zs[i]));
    }
    CheckResult res;
    res.name = "normal-quantile";
    res.passed = worst <= 1e-8;
    res.detail = "max |quantile - table| = " + format_double(worst) + " (tol 1e-8)";
    return res;
}

} // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
    PointEvaluator eval = options.evaluator;
    if (!eval)
        eval = [](const ProcessModel& m, const NodePosterior& n, const Dataset& d, double x) {
            return evaluate_posterior(m, n, d, x);
        };

    std::vector<CheckResult> results;
    results.push_back(check_oracle_equivalence(options, eval));
    results.push_back(check_brownian_fast(options, eval));
    results.push_back(check_noise_free_mse(options, eval));
    results.push_back(check_bridge(options));
    results.push_back(check_mc_mse(options, eval));
    results.push_back(check_quantiles());
    return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.passed; });
}

} // namespace markovgp
