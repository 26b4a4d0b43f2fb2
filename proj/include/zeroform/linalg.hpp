#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "zeroform/errors.hpp"

namespace zeroform {

using Index = Eigen::Index;
using Complex = std::complex<double>;

/**
 * Relative threshold deciding which singular values count as nonzero.
 *
 * By default the threshold adapts to the matrix at hand:
 * max(rows, cols) * machine-epsilon * 64. A fixed value can be supplied
 * instead and is then used verbatim for every matrix.
 */
class RankTolerance {
   public:
    RankTolerance() = default;
    explicit RankTolerance(double relative_threshold);

    /// Effective relative threshold for a matrix of the given shape.
    double relative_threshold(Index rows, Index cols) const;

    bool is_default() const { return !override_.has_value(); }
    std::string description() const;

    /// A copy whose effective threshold is never below `floor`.
    RankTolerance floored(double floor) const;

   private:
    std::optional<double> override_;
};

/// Singular values of M above tol * sigma_max count toward the rank.
Index numerical_rank(const Eigen::MatrixXd& m, const RankTolerance& tol = {});
Index numerical_rank(const Eigen::MatrixXcd& m, const RankTolerance& tol = {});

/**
 * Rank with the cutoff anchored at an external scale: counts singular values
 * above tol * anchor. For matrices formed by products or differences of
 * larger ones, whose own sigma_max may be pure rounding noise (a cancelled
 * matrix would otherwise read as full rank).
 */
Index numerical_rank_anchored(const Eigen::MatrixXd& m, double anchor,
                              const RankTolerance& tol = {});
Index numerical_rank_anchored(const Eigen::MatrixXcd& m, double anchor,
                              const RankTolerance& tol = {});

/**
 * Full-row-rank N with orthonormal rows and N * M ~= 0.
 * Row count is rows(M) - rank(M); an invertible square M yields 0 rows.
 */
Eigen::MatrixXd nullspace_rows(const Eigen::MatrixXd& m, const RankTolerance& tol = {});

/// Orthonormal column basis of the kernel {x : M x = 0}.
Eigen::MatrixXd nullspace_cols(const Eigen::MatrixXd& m, const RankTolerance& tol = {});

/// Kernel basis with the rank cutoff anchored at an external scale.
Eigen::MatrixXd nullspace_cols_anchored(const Eigen::MatrixXd& m, double anchor,
                                        const RankTolerance& tol = {});

/// Orthonormal column basis of the range of M.
Eigen::MatrixXd range_cols(const Eigen::MatrixXd& m, const RankTolerance& tol = {});

/// Moore-Penrose pseudoinverse via singular value truncation.
Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& m, const RankTolerance& tol = {});
Eigen::MatrixXcd pseudoinverse(const Eigen::MatrixXcd& m, const RankTolerance& tol = {});

/// All eigenvalues with multiplicity. Conjugate pairs for real input.
std::vector<Complex> eigenvalues(const Eigen::MatrixXd& m);
std::vector<Complex> eigenvalues(const Eigen::MatrixXcd& m);

struct InverseResult {
    Eigen::MatrixXd inverse;
    double condition;  // sigma_max / sigma_min
};

/// Inverse of a square matrix; throws SingularMatrixError when the smallest
/// singular value falls below the rank threshold.
InverseResult solve_or_invert(const Eigen::MatrixXd& m, const RankTolerance& tol = {});

/// Largest |eigenvalue| of a square matrix.
double spectral_radius(const Eigen::MatrixXd& m);

namespace detail {
void require_finite(const Eigen::MatrixXd& m, const char* name);
void require_finite(const Eigen::MatrixXcd& m, const char* name);
}  // namespace detail

}  // namespace zeroform
