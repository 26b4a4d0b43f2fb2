#include "zeroform/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace zeroform {

namespace {

template <typename Matrix>
bool all_finite(const Matrix& m) {
    return m.allFinite();
}

template <typename Matrix>
Index rank_above_cutoff(const Eigen::JacobiSVD<Matrix>& svd, double cutoff) {
    const auto& sv = svd.singularValues();
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++rank;
    }
    return rank;
}

template <typename Matrix>
Index rank_from_singular_values(const Eigen::JacobiSVD<Matrix>& svd, double rel_threshold) {
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    return rank_above_cutoff(svd, rel_threshold * sv(0));
}

template <typename Matrix>
Matrix pinv_impl(const Matrix& m, const RankTolerance& tol) {
    detail::require_finite(m, "pseudoinverse input");
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double rel = tol.relative_threshold(m.rows(), m.cols());
    const double cutoff = sv.size() > 0 ? rel * sv(0) : 0.0;
    Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) inv_sv(i) = 1.0 / sv(i);
    }
    return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().adjoint();
}

}  // namespace

RankTolerance::RankTolerance(double relative_threshold) : override_(relative_threshold) {
    if (!(relative_threshold > 0.0)) {
        throw InvalidInputError("rank tolerance must be positive");
    }
}

double RankTolerance::relative_threshold(Index rows, Index cols) const {
    if (override_) return *override_;
    const double n = static_cast<double>(std::max<Index>({rows, cols, 1}));
    return 64.0 * std::numeric_limits<double>::epsilon() * n;
}

std::string RankTolerance::description() const {
    if (override_) {
        std::ostringstream os;
        os << "fixed relative threshold " << *override_;
        return os.str();
    }
    return "max(rows, cols) * eps * 64";
}

RankTolerance RankTolerance::floored(double floor) const {
    if (override_ && *override_ >= floor) return *this;
    // The adaptive default is ~1e-13 at desk scale, below any useful floor.
    RankTolerance out = *this;
    out.override_ = floor;
    return out;
}

Index numerical_rank(const Eigen::MatrixXd& m, const RankTolerance& tol) {
    detail::require_finite(m, "numerical_rank input");
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return rank_from_singular_values(svd, tol.relative_threshold(m.rows(), m.cols()));
}

Index numerical_rank(const Eigen::MatrixXcd& m, const RankTolerance& tol) {
    detail::require_finite(m, "numerical_rank input");
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return rank_from_singular_values(svd, tol.relative_threshold(m.rows(), m.cols()));
}

Index numerical_rank_anchored(const Eigen::MatrixXd& m, double anchor, const RankTolerance& tol) {
    detail::require_finite(m, "numerical_rank input");
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return rank_above_cutoff(svd, tol.relative_threshold(m.rows(), m.cols()) * anchor);
}

Index numerical_rank_anchored(const Eigen::MatrixXcd& m, double anchor,
                              const RankTolerance& tol) {
    detail::require_finite(m, "numerical_rank input");
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return rank_above_cutoff(svd, tol.relative_threshold(m.rows(), m.cols()) * anchor);
}

Eigen::MatrixXd nullspace_rows(const Eigen::MatrixXd& m, const RankTolerance& tol) {
    detail::require_finite(m, "nullspace_rows input");
    if (m.cols() == 0) {
        throw InvalidInputError("nullspace_rows: matrix must have at least one column");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU);
    const Index rank = rank_from_singular_values(svd, tol.relative_threshold(m.rows(), m.cols()));
    // Left singular vectors beyond the rank span the left nullspace.
    return svd.matrixU().rightCols(m.rows() - rank).transpose();
}

Eigen::MatrixXd nullspace_cols(const Eigen::MatrixXd& m, const RankTolerance& tol) {
    detail::require_finite(m, "nullspace_cols input");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const Index rank = rank_from_singular_values(svd, tol.relative_threshold(m.rows(), m.cols()));
    return svd.matrixV().rightCols(m.cols() - rank);
}

Eigen::MatrixXd nullspace_cols_anchored(const Eigen::MatrixXd& m, double anchor,
                                        const RankTolerance& tol) {
    detail::require_finite(m, "nullspace_cols input");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const Index rank =
        rank_above_cutoff(svd, tol.relative_threshold(m.rows(), m.cols()) * anchor);
    return svd.matrixV().rightCols(m.cols() - rank);
}

Eigen::MatrixXd range_cols(const Eigen::MatrixXd& m, const RankTolerance& tol) {
    detail::require_finite(m, "range_cols input");
    if (m.size() == 0) return Eigen::MatrixXd(m.rows(), 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU);
    const Index rank = rank_from_singular_values(svd, tol.relative_threshold(m.rows(), m.cols()));
    return svd.matrixU().leftCols(rank);
}

Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& m, const RankTolerance& tol) {
    return pinv_impl(m, tol);
}

Eigen::MatrixXcd pseudoinverse(const Eigen::MatrixXcd& m, const RankTolerance& tol) {
    return pinv_impl(m, tol);
}

std::vector<Complex> eigenvalues(const Eigen::MatrixXd& m) {
    detail::require_finite(m, "eigenvalues input");
    if (m.rows() != m.cols()) throw InvalidInputError("eigenvalues: matrix must be square");
    if (m.rows() == 0) return {};
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailureError("real eigensolver did not converge");
    }
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

std::vector<Complex> eigenvalues(const Eigen::MatrixXcd& m) {
    detail::require_finite(m, "eigenvalues input");
    if (m.rows() != m.cols()) throw InvalidInputError("eigenvalues: matrix must be square");
    if (m.rows() == 0) return {};
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailureError("complex eigensolver did not converge");
    }
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

InverseResult solve_or_invert(const Eigen::MatrixXd& m, const RankTolerance& tol) {
    detail::require_finite(m, "solve_or_invert input");
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw InvalidInputError("solve_or_invert: matrix must be square and nonempty");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    const double cutoff = tol.relative_threshold(m.rows(), m.cols()) * smax;
    const double condition =
        smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(smin > cutoff)) {
        std::ostringstream os;
        os << "matrix is singular to working precision (condition estimate " << condition << ")";
        throw SingularMatrixError(os.str(), condition);
    }
    InverseResult result;
    result.inverse = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
    result.condition = condition;
    return result;
}

double spectral_radius(const Eigen::MatrixXd& m) {
    double radius = 0.0;
    for (const Complex& ev : eigenvalues(m)) radius = std::max(radius, std::abs(ev));
    return radius;
}

namespace detail {

void require_finite(const Eigen::MatrixXd& m, const char* name) {
    if (!all_finite(m)) {
        throw InvalidInputError(std::string(name) + ": entries must be finite");
    }
}

void require_finite(const Eigen::MatrixXcd& m, const char* name) {
    if (!all_finite(m)) {
        throw InvalidInputError(std::string(name) + ": entries must be finite");
    }
}

}  // namespace detail

}  // namespace zeroform
