#include "zeroform/gazero.hpp"

#include <algorithm>

namespace zeroform {

namespace {

// Orthonormalization with column order preserved (no pivoting), so the block
// indexing downstream matches the [Rstar | completion of Vstar] layout.
Eigen::MatrixXd gram_schmidt_ordered(const Eigen::MatrixXd& columns, const RankTolerance& tol) {
    const Index n = columns.rows();
    Eigen::MatrixXd basis(n, columns.cols());
    Index accepted = 0;
    const double threshold = tol.relative_threshold(n, n);
    for (Index j = 0; j < columns.cols(); ++j) {
        Eigen::VectorXd v = columns.col(j);
        const double original = v.norm();
        for (int pass = 0; pass < 2; ++pass) {  // twice for numerical orthogonality
            v -= basis.leftCols(accepted) * (basis.leftCols(accepted).transpose() * v);
        }
        if (v.norm() > threshold * std::max(original, 1.0)) {
            basis.col(accepted++) = v / v.norm();
        }
    }
    return basis.leftCols(accepted);
}

}  // namespace

Eigen::MatrixXd subspace_intersection(const Eigen::MatrixXd& u, const Eigen::MatrixXd& w,
                                      const RankTolerance& tol) {
    if (u.rows() != w.rows()) {
        throw InvalidInputError("subspace_intersection: ambient dimensions differ");
    }
    const Index n = u.rows();
    if (u.cols() == 0 || w.cols() == 0) return Eigen::MatrixXd(n, 0);
    // x = U a = W b  <=>  [U  -W] [a; b] = 0.
    Eigen::MatrixXd stacked(n, u.cols() + w.cols());
    stacked << u, -w;
    const Eigen::MatrixXd kernel = nullspace_cols(stacked, tol);
    if (kernel.cols() == 0) return Eigen::MatrixXd(n, 0);
    return range_cols(u * kernel.topRows(u.cols()), tol);
}

Eigen::MatrixXd mainco(const Eigen::MatrixXd& a, const Eigen::MatrixXd& im_b,
                       const Eigen::MatrixXd& ker_c, const RankTolerance& tol) {
    const Index n = a.rows();
    if (a.cols() != n || im_b.rows() != n || ker_c.rows() != n) {
        throw InvalidInputError("mainco: inconsistent dimensions");
    }
    Eigen::MatrixXd v = ker_c;
    for (Index iter = 0; iter <= n; ++iter) {
        if (v.cols() == 0) return v;
        Eigen::MatrixXd reach(n, v.cols() + im_b.cols());
        reach << v, im_b;
        const Eigen::MatrixXd q = range_cols(reach, tol);
        // Preimage A^-1(V + im B): kernel of the component of A outside the
        // span. The kernel decision is anchored at the scale of A itself; the
        // projected matrix can be pure rounding noise when A maps everything
        // into the span.
        const Eigen::MatrixXd outside =
            (Eigen::MatrixXd::Identity(n, n) - q * q.transpose()) * a;
        const Eigen::MatrixXd preimage =
            nullspace_cols_anchored(outside, std::max(1.0, a.norm()), tol);
        const Eigen::MatrixXd next = subspace_intersection(ker_c, preimage, tol);
        if (next.cols() == v.cols()) return next;
        v = next;
    }
    return v;
}

Eigen::MatrixXd miinco(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ker_c,
                       const Eigen::MatrixXd& im_b, const RankTolerance& tol) {
    const Index n = a.rows();
    if (a.cols() != n || im_b.rows() != n || ker_c.rows() != n) {
        throw InvalidInputError("miinco: inconsistent dimensions");
    }
    Eigen::MatrixXd s = subspace_intersection(im_b, ker_c, tol);
    for (Index iter = 0; iter <= n; ++iter) {
        const Eigen::MatrixXd hidden = subspace_intersection(s, ker_c, tol);
        Eigen::MatrixXd grown(n, hidden.cols() + im_b.cols());
        grown << a * hidden, im_b;
        const Eigen::MatrixXd next = range_cols(grown, tol);
        if (next.cols() == s.cols()) return next;
        s = next;
    }
    return s;
}

GeometricSubspaces geometric_subspaces(const StateSpace& sys, const RankTolerance& tol) {
    validate(sys);
    GeometricSubspaces g;
    g.kerC = nullspace_cols(sys.C, tol);
    g.imB = range_cols(sys.B, tol);
    g.Vstar = mainco(sys.A, g.imB, g.kerC, tol);
    const Index n = sys.lx();
    if (g.Vstar.cols() == 0) {
        g.Sstar = Eigen::MatrixXd(n, 0);
        g.Rstar = Eigen::MatrixXd(n, 0);
        g.V1 = Eigen::MatrixXd(n, 0);
        g.X22 = Eigen::MatrixXd(0, 0);
        return g;
    }
    g.Sstar = miinco(sys.A, g.kerC, g.imB, tol);
    g.Rstar = subspace_intersection(g.Vstar, g.Sstar, tol);

    if (g.Rstar.cols() == 0) {
        g.V1 = g.Vstar;
    } else {
        Eigen::MatrixXd joined(n, g.Rstar.cols() + g.Vstar.cols());
        joined << g.Rstar, g.Vstar;
        g.V1 = gram_schmidt_ordered(joined, tol);
    }

    const Index n_v = g.V1.cols();
    const Index n_r = g.Rstar.cols();
    Eigen::MatrixXd v1b(n, n_v + sys.lu());
    v1b << g.V1, sys.B;
    const Eigen::MatrixXd x = pseudoinverse(v1b, tol) * sys.A * g.V1;
    g.X22 = x.block(n_r, n_r, n_v - n_r, n_v - n_r);
    return g;
}

ZeroMultiset gazero_zeros(const StateSpace& sys, const RankTolerance& tol) {
    const ValidationReport report = validate(sys);
    if (!report.d_is_zero) {
        throw DecompositionNotApplicableError(
            "geometric route requires D = 0; apply a dynamic extension first");
    }
    if (sys.lu() != sys.ly()) {
        throw DecompositionNotApplicableError(
            "geometric route is cross-validated only for square systems; use the squaring "
            "dispatch");
    }
    const GeometricSubspaces g = geometric_subspaces(sys, tol);
    ZeroMultiset zeros;
    zeros.method = "gazero";
    if (g.X22.rows() == 0) return zeros;
    for (const Complex& ev : eigenvalues(g.X22)) zeros.zeros.push_back({ev, 1, false});
    return zeros;
}

}  // namespace zeroform
