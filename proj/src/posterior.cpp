#include "markovgp/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "markovgp/gaussian.hpp"

namespace markovgp {

namespace {

constexpr double kVarClampTol = 1e-10; // round-off below this magnitude clamps to zero

double clamp_variance(double v, const char* what) {
    if (v >= 0.0) return v;
    if (v >= -kVarClampTol) return 0.0;
    throw NotPSD(std::string(what) + ": variance " + std::to_string(v) +
                 " is negative beyond round-off");
}

// Covariance against a zero-variance point must vanish (Cauchy-Schwarz); more
// than numerical dust means the kernel is inconsistent.
bool covariance_negligible(double c, double vx) {
    return std::abs(c) <= 1e-12 * (1.0 + std::abs(vx));
}

} // namespace

Dataset::Dataset(Eigen::VectorXd xs, Eigen::VectorXd ys, Eigen::MatrixXd error_cov)
    : xs_(std::move(xs)), ys_(std::move(ys)), error_cov_(std::move(error_cov)) {
    const Eigen::Index n = xs_.size();
    if (n < 1) throw InvalidParameter("Dataset: needs at least one observation");
    if (ys_.size() != n)
        throw DimensionMismatch("Dataset: " + std::to_string(n) + " locations vs " +
                                std::to_string(ys_.size()) + " observations");
    if (error_cov_.rows() != n || error_cov_.cols() != n)
        throw DimensionMismatch("Dataset: error covariance is " +
                                std::to_string(error_cov_.rows()) + "x" +
                                std::to_string(error_cov_.cols()) + " for n = " +
                                std::to_string(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(xs_(i) >= 0.0))
            throw DomainError("Dataset: location " + std::to_string(xs_(i)) + " at index " +
                              std::to_string(i) + " is outside [0, inf)");
        if (i > 0 && xs_(i) < xs_(i - 1))
            throw InvalidParameter("Dataset: locations must be non-decreasing (index " +
                                   std::to_string(i) + ")");
    }
    // Symmetry + PSD gate for the error covariance.
    (void)GaussianVector(Eigen::VectorXd::Zero(n), error_cov_);
}

Dataset Dataset::noise_free(Eigen::VectorXd xs, Eigen::VectorXd ys) {
    const Eigen::Index n = xs.size();
    return Dataset(std::move(xs), std::move(ys), Eigen::MatrixXd::Zero(n, n));
}

Dataset Dataset::iid_noise(Eigen::VectorXd xs, Eigen::VectorXd ys, double noise_var) {
    if (!(noise_var >= 0.0)) throw InvalidParameter("Dataset: noise variance must be >= 0");
    const Eigen::Index n = xs.size();
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
    e.diagonal().setConstant(noise_var);
    return Dataset(std::move(xs), std::move(ys), std::move(e));
}

Dataset Dataset::per_point_noise(Eigen::VectorXd xs, Eigen::VectorXd ys,
                                 const Eigen::VectorXd& noise_sd) {
    const Eigen::Index n = xs.size();
    if (noise_sd.size() != n)
        throw DimensionMismatch("Dataset: " + std::to_string(noise_sd.size()) +
                                " noise entries for n = " + std::to_string(n));
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(noise_sd(i) >= 0.0))
            throw InvalidParameter("Dataset: noise standard deviation must be >= 0 at index " +
                                   std::to_string(i));
        e(i, i) = noise_sd(i) * noise_sd(i);
    }
    return Dataset(std::move(xs), std::move(ys), std::move(e));
}

namespace {

// Conditioning of the stacked vector (f(x_1..n), y_1..n) on y. Joint blocks:
// Cov(f, f) = K, Cov(f, y) = K, Cov(y, y) = K + error_cov.
NodePosterior node_posterior_unique(const ProcessModel& model, const Eigen::VectorXd& xs,
                                    const Eigen::VectorXd& ys, const Eigen::MatrixXd& ecov) {
    const Eigen::Index n = xs.size();
    const Eigen::MatrixXd k = model.gram(xs);
    Eigen::VectorXd prior_mean(n);
    for (Eigen::Index i = 0; i < n; ++i) prior_mean(i) = model.mean(xs(i));

    Eigen::VectorXd mu(2 * n);
    mu << prior_mean, prior_mean;
    Eigen::MatrixXd sigma(2 * n, 2 * n);
    sigma.topLeftCorner(n, n) = k;
    sigma.topRightCorner(n, n) = k;
    sigma.bottomLeftCorner(n, n) = k;
    sigma.bottomRightCorner(n, n) = k + ecov;

    auto part = PartitionedGaussian::contiguous(GaussianVector(std::move(mu), std::move(sigma)), n);
    Conditioned c = condition(part, ys);

    NodePosterior out{c.dist.mean(), c.dist.cov(), c.jitter};
    if (ecov.isZero(0.0)) out.mean = ys; // noise-free observations pin the nodes
    return out;
}

} // namespace

NodePosterior node_posterior(const ProcessModel& model, const Dataset& data) {
    const Eigen::VectorXd& xs = data.xs();
    const Eigen::VectorXd& ys = data.ys();
    const Eigen::MatrixXd& ecov = data.error_cov();
    const Eigen::Index n = data.size();

    bool has_duplicates = false;
    for (Eigen::Index i = 1; i < n; ++i)
        if (xs(i) == xs(i - 1)) {
            has_duplicates = true;
            break;
        }
    if (!has_duplicates) return node_posterior_unique(model, xs, ys, ecov);

    // Duplicates are legitimate when the noise makes y's covariance invertible
    // outright (no jitter).
    {
        CholeskyFactor f;
        const Eigen::MatrixXd s22 = model.gram(xs) + ecov;
        if (detail::cholesky_spd(s22, f, /*use_ladder=*/false))
            return node_posterior_unique(model, xs, ys, ecov);
    }

    // Otherwise merge duplicate groups; their y values must agree.
    std::vector<Eigen::Index> rep;     // representative index per group
    std::vector<Eigen::Index> group(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i > 0 && xs(i) == xs(i - 1)) {
            group[i] = group[i - 1];
            if (ys(i) != ys(rep[group[i]]))
                throw SingularConditioning(
                    "node_posterior: duplicated location x = " + std::to_string(xs(i)) +
                    " carries conflicting observations with no regularizing noise");
        } else {
            group[i] = static_cast<Eigen::Index>(rep.size());
            rep.push_back(i);
        }
    }

    const Eigen::Index m = static_cast<Eigen::Index>(rep.size());
    Eigen::VectorXd xs_m(m), ys_m(m);
    Eigen::MatrixXd ecov_m(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        xs_m(a) = xs(rep[a]);
        ys_m(a) = ys(rep[a]);
        for (Eigen::Index b = 0; b < m; ++b) ecov_m(a, b) = ecov(rep[a], rep[b]);
    }

    NodePosterior merged = node_posterior_unique(model, xs_m, ys_m, ecov_m);

    NodePosterior out;
    out.jitter_used = merged.jitter_used;
    out.mean.resize(n);
    out.cov.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.mean(i) = merged.mean(group[i]);
        for (Eigen::Index j = 0; j < n; ++j) out.cov(i, j) = merged.cov(group[i], group[j]);
    }
    return out;
}

TwoPointWeight weight_two_point(const ProcessModel& model, double x, double xp, double xpp) {
    if (!(xp < xpp))
        throw InvalidParameter("weight_two_point: requires xp < xpp, got " + std::to_string(xp) +
                               " and " + std::to_string(xpp));
    const double vp = model.var(xp);
    const double vpp = model.var(xpp);
    const double cpp = model.cov(xp, xpp);
    const double cxp = model.cov(x, xp);
    const double cxpp = model.cov(x, xpp);

    const double denom = vp * vpp - cpp * cpp;
    if (!(denom > 1e-12 * vp * vpp))
        throw DegenerateBracket("weight_two_point: bracket (" + std::to_string(xp) + ", " +
                                std::to_string(xpp) + ") is degenerate (denominator " +
                                std::to_string(denom) + ")");

    TwoPointWeight out;
    out.denom = denom;
    out.w(0) = (cxp * vpp - cxpp * cpp) / denom;
    out.w(1) = (cxpp * vp - cxp * cpp) / denom;
    return out;
}

double cond_var_one(const ProcessModel& model, double x, double xp) {
    const double vp = model.var(xp);
    if (!(vp > 0.0))
        throw DegenerateBracket("cond_var_one: V(" + std::to_string(xp) + ") = " +
                                std::to_string(vp) + " is not positive");
    const double c = model.cov(x, xp);
    return clamp_variance(model.var(x) - c * c / vp, "cond_var_one");
}

double cond_var_two(const ProcessModel& model, double x, double xp, double xpp) {
    const TwoPointWeight tw = weight_two_point(model, x, xp, xpp);
    const double v = model.var(x) - tw.w(0) * model.cov(x, xp) - tw.w(1) * model.cov(x, xpp);
    return clamp_variance(v, "cond_var_two");
}

namespace {

enum class Bracket { Below, Interior, Above, Node };

struct BracketInfo {
    Bracket kind;
    Eigen::Index index; // node for Node, left bracket for Interior, boundary otherwise
};

BracketInfo locate(const Eigen::VectorXd& xs, double x) {
    const double* begin = xs.data();
    const double* end = begin + xs.size();
    const double* it = std::lower_bound(begin, end, x);
    if (it != end && *it == x) return {Bracket::Node, it - begin};
    if (it == begin) return {Bracket::Below, 0};
    if (it == end) return {Bracket::Above, xs.size() - 1};
    return {Bracket::Interior, (it - begin) - 1};
}

// Theorem cases (i)/(iii): extrapolate through a single boundary node, and the
// degenerate fallback shared with interior brackets whose nodes carry no
// randomness.
PosteriorPoint one_point(const ProcessModel& model, const NodePosterior& nodes,
                         const Eigen::VectorXd& xs, double x, Eigen::Index b, PointCase kind,
                         Eigen::Index index) {
    PosteriorPoint pt;
    pt.x = x;
    pt.kind = kind;
    pt.index = index;

    const double xb = xs(b);
    const double vb = model.var(xb);
    if (vb <= 0.0) {
        const double c = model.cov(x, xb);
        if (!covariance_negligible(c, model.var(x)))
            throw DegenerateBracket("evaluate_posterior: node x = " + std::to_string(xb) +
                                    " has zero variance but covariance " + std::to_string(c) +
                                    " with the query");
        // The node value is deterministic, so it carries no information.
        pt.mean = model.mean(x);
        pt.variance = clamp_variance(model.var(x), "evaluate_posterior");
        return pt;
    }

    const double r = model.cov(xb, x) / vb;
    pt.mean = model.mean(x) + r * (nodes.mean(b) - model.mean(xb));
    const double node_var = std::max(nodes.cov(b, b), 0.0);
    pt.variance = clamp_variance(r * r * node_var + cond_var_one(model, x, xb),
                                 "evaluate_posterior");
    return pt;
}

} // namespace

PosteriorPoint evaluate_posterior(const ProcessModel& model, const NodePosterior& nodes,
                                  const Dataset& data, double x) {
    if (!(x >= 0.0))
        throw DomainError("evaluate_posterior: query " + std::to_string(x) +
                          " is outside [0, inf)");
    const Eigen::VectorXd& xs = data.xs();
    const Eigen::Index n = data.size();
    if (nodes.mean.size() != n || nodes.cov.rows() != n || nodes.cov.cols() != n)
        throw DimensionMismatch("evaluate_posterior: node posterior has dimension " +
                                std::to_string(nodes.mean.size()) + " for n = " +
                                std::to_string(n));

    const BracketInfo where = locate(xs, x);
    switch (where.kind) {
        case Bracket::Node: {
            PosteriorPoint pt;
            pt.x = x;
            pt.kind = PointCase::AtNode;
            pt.index = where.index;
            pt.mean = nodes.mean(where.index);
            pt.variance = clamp_variance(nodes.cov(where.index, where.index),
                                         "evaluate_posterior");
            return pt;
        }
        case Bracket::Below:
            return one_point(model, nodes, xs, x, 0, PointCase::BelowFirst, 0);
        case Bracket::Above:
            return one_point(model, nodes, xs, x, n - 1, PointCase::AboveLast, n - 1);
        case Bracket::Interior:
            break;
    }

    const Eigen::Index k = where.index;
    const double xk = xs(k);
    const double xk1 = xs(k + 1);
    const double vk = model.var(xk);
    const double vk1 = model.var(xk1);
    const double ckk1 = model.cov(xk, xk1);
    const double denom = vk * vk1 - ckk1 * ckk1;

    if (!(denom > 1e-12 * vk * vk1)) {
        // Degenerate bracket. A zero-variance node is deterministic and drops
        // out; perfectly correlated nodes are informationally one node.
        if (vk <= 0.0 && vk1 <= 0.0) {
            const double cq = model.cov(x, xk);
            const double cq1 = model.cov(x, xk1);
            if (!covariance_negligible(cq, model.var(x)) ||
                !covariance_negligible(cq1, model.var(x)))
                throw DegenerateBracket(
                    "evaluate_posterior: bracket nodes have zero variance but nonzero "
                    "covariance with the query");
            PosteriorPoint pt;
            pt.x = x;
            pt.kind = PointCase::Interior;
            pt.index = k;
            pt.mean = model.mean(x);
            pt.variance = clamp_variance(model.var(x), "evaluate_posterior");
            return pt;
        }
        if (vk <= 0.0) return one_point(model, nodes, xs, x, k + 1, PointCase::Interior, k);
        return one_point(model, nodes, xs, x, k, PointCase::Interior, k);
    }

    const TwoPointWeight tw = weight_two_point(model, x, xk, xk1);
    const Eigen::Vector2d dev(nodes.mean(k) - model.mean(xk),
                              nodes.mean(k + 1) - model.mean(xk1));
    const Eigen::Matrix2d block = nodes.cov.block<2, 2>(k, k);

    PosteriorPoint pt;
    pt.x = x;
    pt.kind = PointCase::Interior;
    pt.index = k;
    pt.mean = model.mean(x) + tw.w.dot(dev);
    pt.variance = clamp_variance(tw.w.dot(block * tw.w) + cond_var_two(model, x, xk, xk1),
                                 "evaluate_posterior");
    return pt;
}

PosteriorPoint evaluate_brownian_fast(const BrownianMotionModel& bm, const NodePosterior& nodes,
                                      const Dataset& data, double x) {
    if (!(x >= 0.0))
        throw DomainError("evaluate_brownian_fast: query " + std::to_string(x) +
                          " is outside [0, inf)");
    const Eigen::VectorXd& xs = data.xs();
    const Eigen::Index n = data.size();
    if (nodes.mean.size() != n || nodes.cov.rows() != n || nodes.cov.cols() != n)
        throw DimensionMismatch("evaluate_brownian_fast: node posterior has dimension " +
                                std::to_string(nodes.mean.size()) + " for n = " +
                                std::to_string(n));

    const double s2 = bm.sigma * bm.sigma;
    const BracketInfo where = locate(xs, x);
    PosteriorPoint pt;
    pt.x = x;

    switch (where.kind) {
        case Bracket::Node: {
            pt.kind = PointCase::AtNode;
            pt.index = where.index;
            pt.mean = nodes.mean(where.index);
            pt.variance = clamp_variance(nodes.cov(where.index, where.index),
                                         "evaluate_brownian_fast");
            return pt;
        }
        case Bracket::Below: {
            pt.kind = PointCase::BelowFirst;
            pt.index = 0;
            const double x1 = xs(0);
            const double v1 = bm.var(x1);
            if (v1 <= 0.0) {
                // sigma0 = 0 with x1 = 0, or a deterministic line.
                pt.mean = bm.mean(x);
                pt.variance = clamp_variance(bm.var(x), "evaluate_brownian_fast");
                return pt;
            }
            const double r = bm.var(x) / v1; // C(x1, x) = V(x) for x <= x1
            pt.mean = bm.mean(x) + r * (nodes.mean(0) - bm.mean(x1));
            pt.variance = clamp_variance(
                r * r * std::max(nodes.cov(0, 0), 0.0) + r * s2 * (x1 - x),
                "evaluate_brownian_fast");
            return pt;
        }
        case Bracket::Above: {
            pt.kind = PointCase::AboveLast;
            pt.index = n - 1;
            const double xn = xs(n - 1);
            pt.mean = nodes.mean(n - 1) + bm.mu * (x - xn);
            pt.variance = clamp_variance(std::max(nodes.cov(n - 1, n - 1), 0.0) + s2 * (x - xn),
                                         "evaluate_brownian_fast");
            return pt;
        }
        case Bracket::Interior:
            break;
    }

    const Eigen::Index k = where.index;
    const double xk = xs(k);
    const double xk1 = xs(k + 1);
    const double len = xk1 - xk;
    const double a = (xk1 - x) / len;
    const double b = (x - xk) / len;

    pt.kind = PointCase::Interior;
    pt.index = k;
    pt.mean = a * nodes.mean(k) + b * nodes.mean(k + 1);
    const double node_term = a * a * nodes.cov(k, k) + 2.0 * a * b * nodes.cov(k, k + 1) +
                             b * b * nodes.cov(k + 1, k + 1);
    const double bridge_term = s2 * (xk1 - x) * (x - xk) / len;
    pt.variance = clamp_variance(node_term + bridge_term, "evaluate_brownian_fast");
    return pt;
}

std::pair<double, double> bridge_moments(double mu1, double mu2, double s1, double s2, double rho,
                                         double x1, double x2, double sigma, double x) {
    if (!(x1 < x2))
        throw InvalidParameter("bridge_moments: requires x1 < x2, got " + std::to_string(x1) +
                               " and " + std::to_string(x2));
    if (!(x1 <= x && x <= x2))
        throw InvalidParameter("bridge_moments: x = " + std::to_string(x) + " outside [" +
                               std::to_string(x1) + ", " + std::to_string(x2) + "]");
    if (!(s1 >= 0.0) || !(s2 >= 0.0))
        throw InvalidParameter("bridge_moments: endpoint deviations must be >= 0");
    if (!(rho >= -1.0 && rho <= 1.0))
        throw InvalidParameter("bridge_moments: correlation " + std::to_string(rho) +
                               " outside [-1, 1]");
    if (!(sigma >= 0.0)) throw InvalidParameter("bridge_moments: sigma must be >= 0");

    const double len = x2 - x1;
    const double a = (x2 - x) / len;
    const double b = (x - x1) / len;

    const double mean = mu1 + b * (mu2 - mu1);
    const double endpoint_term =
        a * a * s1 * s1 + 2.0 * a * b * rho * s1 * s2 + b * b * s2 * s2;
    const double bridge_term = sigma * sigma * (x2 - x) * (x - x1) / len;
    return {mean, clamp_variance(endpoint_term + bridge_term, "bridge_moments")};
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw InvalidParameter("normal_quantile: p = " + std::to_string(p) +
                               " outside (0, 1)");

    // Acklam's rational approximation.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00, 2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley step against erfc.
    const double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = err * std::sqrt(2.0 * 3.141592653589793238462643383279502884) *
                     std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

std::pair<double, double> confidence_band(const PosteriorPoint& pt, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw InvalidParameter("confidence_band: level " + std::to_string(level) +
                               " outside (0, 1)");
    const double z = normal_quantile(0.5 * (1.0 + level));
    const double half = z * std::sqrt(std::max(pt.variance, 0.0));
    return {pt.mean - half, pt.mean + half};
}

} // namespace markovgp
