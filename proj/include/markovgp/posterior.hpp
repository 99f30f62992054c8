#pragma once

#include <Eigen/Dense>
#include <utility>

#include "markovgp/errors.hpp"
#include "markovgp/process.hpp"

namespace markovgp {

/// Noisy observations y_i = f(x_i) + e_i at non-decreasing locations x_i >= 0,
/// with joint error covariance error_cov (zero matrix = noise-free). The
/// constructor validates shapes, ordering, the domain, and that error_cov is
/// symmetric PSD.
class Dataset {
public:
    Dataset(Eigen::VectorXd xs, Eigen::VectorXd ys, Eigen::MatrixXd error_cov);

    static Dataset noise_free(Eigen::VectorXd xs, Eigen::VectorXd ys);
    static Dataset iid_noise(Eigen::VectorXd xs, Eigen::VectorXd ys, double noise_var);
    /// Independent per-point noise given as standard deviations.
    static Dataset per_point_noise(Eigen::VectorXd xs, Eigen::VectorXd ys,
                                   const Eigen::VectorXd& noise_sd);

    Eigen::Index size() const { return xs_.size(); }
    const Eigen::VectorXd& xs() const { return xs_; }
    const Eigen::VectorXd& ys() const { return ys_; }
    const Eigen::MatrixXd& error_cov() const { return error_cov_; }
    bool noise_free_data() const { return error_cov_.isZero(0.0); }

private:
    Eigen::VectorXd xs_, ys_;
    Eigen::MatrixXd error_cov_;
};

/// Joint posterior of (f(x_1), ..., f(x_n)) given the data: mean vector, full
/// covariance, and the jitter the conditioning solve needed (0 when well
/// posed). Entries are index-aligned with the Dataset.
struct NodePosterior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    double jitter_used = 0.0;
};

/// Which branch produced a pointwise posterior.
enum class PointCase { BelowFirst, Interior, AboveLast, AtNode };

/// Posterior mean and variance of f(x) at one query location. For Interior,
/// index is the left bracket node k; for AtNode it is the matching node.
struct PosteriorPoint {
    double x = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    PointCase kind = PointCase::AtNode;
    Eigen::Index index = 0;
};

/// Two-point conditioning weights w(x, x', x'') and the denominator
/// V(x')V(x'') - C(x', x'')^2 retained for diagnostics.
struct TwoPointWeight {
    Eigen::Vector2d w;
    double denom = 0.0;
};

/// Exact Gaussian posterior of the node values via partitioned conditioning
/// of (f(x_1..n), y_1..n). Duplicated locations are kept when the observation
/// covariance stays invertible without jitter, merged when their y values
/// agree exactly, and rejected (SingularConditioning) otherwise.
NodePosterior node_posterior(const ProcessModel& model, const Dataset& data);

/// w(x, x', x'') with components
///   [ C(x,x')V(x'') - C(x,x'')C(x',x'') , C(x,x'')V(x') - C(x,x')C(x',x'') ]
/// over V(x')V(x'') - C(x',x'')^2. Requires xp < xpp; throws DegenerateBracket
/// when the denominator is within 1e-12 * V(xp)V(xpp) of zero.
TwoPointWeight weight_two_point(const ProcessModel& model, double x, double xp, double xpp);

/// Var(f(x) | f(xp)) = V(x) - C(x,xp)^2 / V(xp), clamped to [0, inf);
/// round-off below -1e-10 raises NotPSD, V(xp) <= 0 raises DegenerateBracket.
double cond_var_one(const ProcessModel& model, double x, double xp);

/// Var(f(x) | f(xp), f(xpp)) = V(x) - w^T [C(x,xp); C(x,xpp)], same clamping.
double cond_var_two(const ProcessModel& model, double x, double xp, double xpp);

/// Pointwise posterior of f(x) given the node posterior: one-point
/// extrapolation beyond the sampled range, two-point interpolation inside it,
/// and the stored node moments when x hits a node exactly. Degenerate
/// brackets (zero prior variance, perfectly correlated nodes) fall back to
/// the information-equivalent smaller conditioning set; a bracket that is
/// degenerate with inconsistent covariances raises DegenerateBracket.
PosteriorPoint evaluate_posterior(const ProcessModel& model, const NodePosterior& nodes,
                                  const Dataset& data, double x);

/// Brownian specialization: linear interpolation weights, bridge variance,
/// and drift extrapolation in closed form. Agrees with evaluate_posterior on
/// the generic path to within round-off.
PosteriorPoint evaluate_brownian_fast(const BrownianMotionModel& bm, const NodePosterior& nodes,
                                      const Dataset& data, double x);

/// Moments of a Brownian bridge on [x1, x2] with scale sigma and jointly
/// Gaussian endpoints N((mu1, mu2), [[s1^2, rho s1 s2], [rho s1 s2, s2^2]]):
///   mean      mu1 + (x - x1)/(x2 - x1) * (mu2 - mu1)
///   variance  a^2 s1^2 + 2ab rho s1 s2 + b^2 s2^2 + sigma^2 (x2-x)(x-x1)/(x2-x1)
/// with a = (x2-x)/(x2-x1), b = (x-x1)/(x2-x1). s1 = s2 = 0 reduces to the
/// classical bridge with known endpoints.
std::pair<double, double> bridge_moments(double mu1, double mu2, double s1, double s2, double rho,
                                         double x1, double x2, double sigma, double x);

/// Two-sided central interval mean +- z * sqrt(variance) at the given
/// coverage level in (0, 1).
std::pair<double, double> confidence_band(const PosteriorPoint& pt, double level);

/// Standard normal quantile (Acklam rational approximation plus one Halley
/// refinement; absolute error well under 1e-8). p in (0, 1).
double normal_quantile(double p);

} // namespace markovgp
