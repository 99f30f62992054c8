#include "markovgp/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "markovgp/rng.hpp"

namespace markovgp {

namespace {

constexpr double kSymTol = 1e-12;       // per-entry symmetry tolerance
constexpr double kPivotTol = 1e-10;     // most-negative acceptable pivot
const double kJitterLadder[] = {0.0, 1e-12, 1e-10, 1e-8};

void check_square_symmetric(const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() != m.cols())
        throw DimensionMismatch(std::string(what) + ": matrix is " + std::to_string(m.rows()) +
                                "x" + std::to_string(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = j + 1; i < m.rows(); ++i)
            if (!(std::abs(m(i, j) - m(j, i)) <= kSymTol))
                throw NotPSD(std::string(what) + ": matrix not symmetric at (" +
                             std::to_string(i) + "," + std::to_string(j) + "), delta " +
                             std::to_string(m(i, j) - m(j, i)));
}

// One factorization attempt at a fixed jitter. In semidefinite mode a pivot
// within +-pivot_floor of zero produces a zero column, provided the remaining
// column entries are negligible (a true PSD matrix with a zero diagonal entry
// has a zero row). Strict mode requires every pivot above the floor.
bool try_factor(const Eigen::MatrixXd& a, double jitter, bool allow_semidefinite,
                Eigen::MatrixXd& l_out) {
    const Eigen::Index n = a.rows();
    const double max_diag = n > 0 ? a.diagonal().maxCoeff() : 0.0;
    const double scale = std::max(max_diag, 0.0);
    const double pivot_floor = std::max(1e-13 * scale, std::numeric_limits<double>::min());
    const double neg_floor = kPivotTol * std::max(scale, 1.0);
    const double col_tol = 1e-6 * std::max(scale, 1.0);

    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = a(j, j) + jitter - l.row(j).head(j).squaredNorm();
        if (d > pivot_floor) {
            const double root = std::sqrt(d);
            l(j, j) = root;
            for (Eigen::Index i = j + 1; i < n; ++i)
                l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / root;
        } else if (allow_semidefinite && d >= -neg_floor) {
            l(j, j) = 0.0;
            for (Eigen::Index i = j + 1; i < n; ++i) {
                const double rem = a(i, j) - l.row(i).head(j).dot(l.row(j).head(j));
                if (std::abs(rem) > col_tol) return false;
                l(i, j) = 0.0;
            }
        } else {
            return false;
        }
    }
    l_out = std::move(l);
    return true;
}

bool factor_with_ladder(const Eigen::MatrixXd& a, bool allow_semidefinite, CholeskyFactor& out) {
    const double max_diag = a.rows() > 0 ? std::max(a.diagonal().maxCoeff(), 0.0) : 0.0;
    for (double step : kJitterLadder) {
        const double jitter = step * max_diag;
        if (try_factor(a, jitter, allow_semidefinite, out.factor)) {
            out.jitter = jitter;
            return true;
        }
    }
    return false;
}

} // namespace

GaussianVector::GaussianVector(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
    check_square_symmetric(cov_, "GaussianVector");
    if (mean_.size() != cov_.rows())
        throw DimensionMismatch("GaussianVector: mean length " + std::to_string(mean_.size()) +
                                " vs covariance dimension " + std::to_string(cov_.rows()));
    // PSD check: LDLT pivots may not dip below -1e-10.
    if (cov_.rows() > 0) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(cov_);
        if (ldlt.info() == Eigen::NumericalIssue || ldlt.vectorD().minCoeff() < -kPivotTol)
            throw NotPSD("GaussianVector: covariance is not positive semidefinite (min pivot " +
                         std::to_string(ldlt.vectorD().minCoeff()) + ")");
    }
}

PartitionedGaussian::PartitionedGaussian(std::vector<Eigen::Index> block1,
                                         std::vector<Eigen::Index> block2, GaussianVector joint)
    : block1_(std::move(block1)), block2_(std::move(block2)), joint_(std::move(joint)) {
    const Eigen::Index d = joint_.dim();
    if (block1_.empty() || block2_.empty())
        throw InvalidParameter("PartitionedGaussian: both blocks must be non-empty");
    if (static_cast<Eigen::Index>(block1_.size() + block2_.size()) != d)
        throw DimensionMismatch("PartitionedGaussian: blocks cover " +
                                std::to_string(block1_.size() + block2_.size()) + " of " +
                                std::to_string(d) + " dimensions");
    std::vector<char> seen(static_cast<std::size_t>(d), 0);
    for (const auto* blk : {&block1_, &block2_})
        for (Eigen::Index idx : *blk) {
            if (idx < 0 || idx >= d)
                throw DimensionMismatch("PartitionedGaussian: index " + std::to_string(idx) +
                                        " out of range");
            if (seen[static_cast<std::size_t>(idx)]++)
                throw InvalidParameter("PartitionedGaussian: index " + std::to_string(idx) +
                                       " appears twice");
        }
}

PartitionedGaussian PartitionedGaussian::contiguous(GaussianVector joint, Eigen::Index n1) {
    const Eigen::Index d = joint.dim();
    if (n1 < 1 || n1 >= d)
        throw InvalidParameter("PartitionedGaussian: block1 size " + std::to_string(n1) +
                               " must lie in [1, " + std::to_string(d - 1) + "]");
    std::vector<Eigen::Index> b1, b2;
    for (Eigen::Index i = 0; i < n1; ++i) b1.push_back(i);
    for (Eigen::Index i = n1; i < d; ++i) b2.push_back(i);
    return PartitionedGaussian(std::move(b1), std::move(b2), std::move(joint));
}

CholeskyFactor cholesky_psd(const Eigen::MatrixXd& matrix) {
    check_square_symmetric(matrix, "cholesky_psd");
    CholeskyFactor out;
    if (!factor_with_ladder(matrix, /*allow_semidefinite=*/true, out))
        throw NotPSD("cholesky_psd: factorization failed at every jitter ladder step");
    return out;
}

namespace detail {

bool cholesky_spd(const Eigen::MatrixXd& matrix, CholeskyFactor& out, bool use_ladder) {
    if (use_ladder) return factor_with_ladder(matrix, /*allow_semidefinite=*/false, out);
    out.jitter = 0.0;
    return try_factor(matrix, 0.0, /*allow_semidefinite=*/false, out.factor);
}

} // namespace detail

Conditioned condition(const PartitionedGaussian& g, const Eigen::VectorXd& observed) {
    const auto& b1 = g.block1();
    const auto& b2 = g.block2();
    const Eigen::Index n1 = static_cast<Eigen::Index>(b1.size());
    const Eigen::Index n2 = static_cast<Eigen::Index>(b2.size());
    if (observed.size() != n2)
        throw DimensionMismatch("condition: observed has length " +
                                std::to_string(observed.size()) + ", block2 has " +
                                std::to_string(n2));

    const Eigen::VectorXd& mu = g.joint().mean();
    const Eigen::MatrixXd& sigma = g.joint().cov();

    Eigen::VectorXd mu1(n1), mu2(n2);
    Eigen::MatrixXd s11(n1, n1), s12(n1, n2), s22(n2, n2);
    for (Eigen::Index i = 0; i < n1; ++i) {
        mu1(i) = mu(b1[i]);
        for (Eigen::Index j = 0; j < n1; ++j) s11(i, j) = sigma(b1[i], b1[j]);
        for (Eigen::Index j = 0; j < n2; ++j) s12(i, j) = sigma(b1[i], b2[j]);
    }
    for (Eigen::Index i = 0; i < n2; ++i) {
        mu2(i) = mu(b2[i]);
        for (Eigen::Index j = 0; j < n2; ++j) s22(i, j) = sigma(b2[i], b2[j]);
    }

    CholeskyFactor chol;
    if (!detail::cholesky_spd(s22, chol))
        throw SingularConditioning(
            "condition: Sigma22 is singular after jitter escalation; "
            "check for duplicated or degenerate observations");

    // Solve L L^T X = Sigma21 and L L^T v = (observed - mu2); never form an inverse.
    const auto lower = chol.factor.triangularView<Eigen::Lower>();
    Eigen::MatrixXd half = lower.solve(s12.transpose()); // L^-1 Sigma21
    Eigen::VectorXd dev = lower.solve(observed - mu2);   // L^-1 (z2 - mu2)

    Eigen::VectorXd mean = mu1 + half.transpose() * dev;
    Eigen::MatrixXd cov = s11 - half.transpose() * half;

    cov = ((cov + cov.transpose()) / 2.0).eval();
    for (Eigen::Index i = 0; i < n1; ++i) {
        if (cov(i, i) < -kPivotTol)
            throw NotPSD("condition: conditional variance " + std::to_string(cov(i, i)) +
                         " at index " + std::to_string(i) + " is below -1e-10");
        if (cov(i, i) < 0.0) cov(i, i) = 0.0;
    }

    return Conditioned{GaussianVector(std::move(mean), std::move(cov)), chol.jitter};
}

Eigen::MatrixXd sample(const GaussianVector& g, int count, std::uint64_t seed) {
    if (count <= 0) throw InvalidParameter("sample: count must be positive");
    const Eigen::Index d = g.dim();
    const CholeskyFactor chol = cholesky_psd(g.cov());

    NormalSampler rng(seed);
    Eigen::MatrixXd draws(count, d);
    Eigen::VectorXd z(d);
    for (int r = 0; r < count; ++r) {
        for (Eigen::Index i = 0; i < d; ++i) z(i) = rng.normal();
        draws.row(r) = (g.mean() + chol.factor * z).transpose();
    }
    return draws;
}

} // namespace markovgp
