#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "markovgp/errors.hpp"

namespace markovgp {

/// Finite-dimensional Gaussian N(mean, cov). The constructor enforces that
/// cov is symmetric (1e-12 per entry), square, matched to the mean length,
/// and positive semidefinite up to a -1e-10 pivot tolerance.
class GaussianVector {
public:
    GaussianVector(Eigen::VectorXd mean, Eigen::MatrixXd cov);

    Eigen::Index dim() const { return mean_.size(); }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov() const { return cov_; }

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
};

/// A GaussianVector split into two blocks by index sets. The sets must be
/// disjoint, non-empty, and jointly cover every dimension.
class PartitionedGaussian {
public:
    PartitionedGaussian(std::vector<Eigen::Index> block1, std::vector<Eigen::Index> block2,
                        GaussianVector joint);

    /// Convenience split of a joint Gaussian into [0, n1) and [n1, dim).
    static PartitionedGaussian contiguous(GaussianVector joint, Eigen::Index n1);

    const std::vector<Eigen::Index>& block1() const { return block1_; }
    const std::vector<Eigen::Index>& block2() const { return block2_; }
    const GaussianVector& joint() const { return joint_; }

private:
    std::vector<Eigen::Index> block1_, block2_;
    GaussianVector joint_;
};

/// Lower-triangular factor L with L*L^T = input + jitter*I.
struct CholeskyFactor {
    Eigen::MatrixXd factor;
    double jitter = 0.0;
};

/// Cholesky factorization tolerant of semidefinite input: zero pivots yield a
/// zero column. Tries jitter = {0, 1e-12, 1e-10, 1e-8} * max(diagonal) in
/// order and returns the first factor that succeeds, together with the jitter
/// used. Throws NotPSD when the final ladder step still fails.
CholeskyFactor cholesky_psd(const Eigen::MatrixXd& matrix);

/// Result of conditioning block1 on an observed value of block2.
struct Conditioned {
    GaussianVector dist;
    double jitter = 0.0; // diagonal inflation applied to Sigma22, 0 on well-posed input
};

/// Conditional distribution z1 | z2 = observed:
///   mean  mu1 + Sigma12 Sigma22^-1 (observed - mu2)
///   cov   Sigma11 - Sigma12 Sigma22^-1 Sigma21
/// Solves run against the Cholesky factor of Sigma22 with the jitter ladder;
/// the returned covariance is symmetrized and its diagonal clamped to [0, inf)
/// (entries below -1e-10 raise NotPSD). Throws SingularConditioning when
/// Sigma22 cannot be factorized at any ladder step, and DimensionMismatch when
/// observed does not match block2.
Conditioned condition(const PartitionedGaussian& g, const Eigen::VectorXd& observed);

/// count iid draws, one per row: mean + L * z with z standard normal and L
/// from cholesky_psd. Deterministic given seed.
Eigen::MatrixXd sample(const GaussianVector& g, int count, std::uint64_t seed);

namespace detail {

/// Strictly positive-definite Cholesky with the same jitter ladder; used for
/// Sigma22 in conditioning where invertibility is required. Returns false on
/// failure instead of throwing. use_ladder=false tries jitter 0 only.
bool cholesky_spd(const Eigen::MatrixXd& matrix, CholeskyFactor& out, bool use_ladder = true);

} // namespace detail

} // namespace markovgp
