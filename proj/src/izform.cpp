#include "zeroform/izform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "zeroform/rosenbrock.hpp"

namespace zeroform {

namespace {

Eigen::MatrixXd stacked_cbar(const StateSpace& sys, const RelativeDegreeProfile& rho) {
    const Index lx = sys.lx();
    Eigen::MatrixXd cbar(rho.total, lx);
    Index row = 0;
    for (Index i = 0; i < sys.ly(); ++i) {
        Eigen::RowVectorXd r = sys.C.row(i);
        for (int k = 0; k < rho.per_output[static_cast<std::size_t>(i)]; ++k) {
            cbar.row(row++) = r;
            r = r * sys.A;
        }
    }
    return cbar;
}

// Last stacked row per output: C_i A^(rho_i - 1).
Eigen::MatrixXd stacked_chat(const StateSpace& sys, const RelativeDegreeProfile& rho) {
    Eigen::MatrixXd chat(sys.ly(), sys.lx());
    for (Index i = 0; i < sys.ly(); ++i) {
        Eigen::RowVectorXd r = sys.C.row(i);
        for (int k = 1; k < rho.per_output[static_cast<std::size_t>(i)]; ++k) r = r * sys.A;
        chat.row(i) = r;
    }
    return chat;
}

double condition_of(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return sv(0) / sv(sv.size() - 1);
}

bool invertible(const Eigen::MatrixXd& m, const RankTolerance& tol) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return false;
    return sv(sv.size() - 1) > tol.relative_threshold(m.rows(), m.cols()) * sv(0);
}

// l_eta rows combining the orthonormal Bbar basis, oriented away from the row
// space of Cbar. Stays inside the row space of Bbar by construction.
std::optional<Eigen::MatrixXd> select_bz_svd(const Eigen::MatrixXd& bbar,
                                             const Eigen::MatrixXd& cbar, Index l_eta,
                                             const RankTolerance& tol) {
    const Index lx = bbar.cols();
    Eigen::JacobiSVD<Eigen::MatrixXd> cbar_svd(cbar, Eigen::ComputeFullV);
    const Index cbar_rank = numerical_rank(cbar, tol);
    const Eigen::MatrixXd row_basis = cbar_svd.matrixV().leftCols(cbar_rank);
    const Eigen::MatrixXd projector =
        Eigen::MatrixXd::Identity(lx, lx) - row_basis * row_basis.transpose();

    const Eigen::MatrixXd projected = bbar * projector;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(projected, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    if (sv.size() < l_eta) return std::nullopt;
    if (l_eta > 0 && !(sv(l_eta - 1) > tol.relative_threshold(projected.rows(), lx) * sv(0))) {
        return std::nullopt;  // projected rank deficient; caller falls back
    }
    return Eigen::MatrixXd(svd.matrixU().leftCols(l_eta).transpose() * bbar);
}

// Pivoted greedy fallback: pick the Bbar basis rows with the largest residual
// against the span of Cbar and the rows already chosen.
std::optional<Eigen::MatrixXd> select_bz_greedy(const Eigen::MatrixXd& bbar,
                                                const Eigen::MatrixXd& cbar, Index l_eta,
                                                const RankTolerance& tol) {
    const Index lx = bbar.cols();
    Eigen::JacobiSVD<Eigen::MatrixXd> cbar_svd(cbar, Eigen::ComputeFullV);
    const Index cbar_rank = numerical_rank(cbar, tol);
    Eigen::MatrixXd basis(lx, cbar_rank + l_eta);
    basis.leftCols(cbar_rank) = cbar_svd.matrixV().leftCols(cbar_rank);
    Index basis_size = cbar_rank;

    Eigen::MatrixXd bz(l_eta, lx);
    std::vector<bool> taken(static_cast<std::size_t>(bbar.rows()), false);
    for (Index pick = 0; pick < l_eta; ++pick) {
        double best_norm = 0.0;
        Index best_row = -1;
        Eigen::VectorXd best_residual;
        for (Index r = 0; r < bbar.rows(); ++r) {
            if (taken[static_cast<std::size_t>(r)]) continue;
            Eigen::VectorXd v = bbar.row(r).transpose();
            v -= basis.leftCols(basis_size) * (basis.leftCols(basis_size).transpose() * v);
            if (v.norm() > best_norm) {
                best_norm = v.norm();
                best_row = r;
                best_residual = v;
            }
        }
        if (best_row < 0 || best_norm <= tol.relative_threshold(lx, lx)) return std::nullopt;
        bz.row(pick) = bbar.row(best_row);
        taken[static_cast<std::size_t>(best_row)] = true;
        basis.col(basis_size++) = best_residual / best_norm;
    }
    return bz;
}

std::string rank_diagnostics(const StateSpace& sys, const RelativeDegreeProfile& rho,
                             const Eigen::MatrixXd& bbar, const RankTolerance& tol) {
    const Eigen::MatrixXd chat = stacked_chat(sys, rho);
    const Index rank_b = numerical_rank(sys.B, tol);
    const Index rank_chat = numerical_rank(chat, tol);
    Eigen::MatrixXd stacked(bbar.rows() + chat.rows(), sys.lx());
    stacked << bbar, chat;
    const Index rank_stack = numerical_rank(stacked, tol);
    const Index overlap = bbar.rows() + rank_chat - rank_stack;
    const Index rank_tbar = sys.lx() - rank_b + rank_chat - overlap;
    std::ostringstream os;
    os << "rank [Bbar; Cbar] = l_x - rank B + rank Chat - overlap = " << sys.lx() << " - "
       << rank_b << " + " << rank_chat << " - " << overlap << " = " << rank_tbar << " < "
       << sys.lx();
    return os.str();
}

}  // namespace

double StructureResiduals::max() const {
    return std::max({b_top, c_left, c_xi_pattern, a_xieta_rows, a_xi_rows});
}

TransformationBundle build_transformation(const StateSpace& sys, const RelativeDegreeProfile& rho,
                                          const RankTolerance& tol,
                                          const std::optional<Eigen::MatrixXd>& forced_bz) {
    const ValidationReport report = validate(sys);
    if (!report.d_is_zero) {
        throw DecompositionNotApplicableError(
            "decomposition requires D = 0; apply a dynamic extension first");
    }
    if (!rho.all_positive() || static_cast<Index>(rho.per_output.size()) != sys.ly()) {
        throw DecompositionNotApplicableError("every output needs relative degree >= 1");
    }
    if (rho.total > sys.lx()) {
        throw DecompositionNotApplicableError("total relative degree exceeds the state count");
    }

    const Index lx = sys.lx();
    const Index l_eta = lx - rho.total;

    TransformationBundle bundle;
    bundle.Bbar = nullspace_rows(sys.B, tol);
    bundle.Cbar = stacked_cbar(sys, rho);
    if (numerical_rank(bundle.Cbar, tol) < rho.total) {
        throw DecompositionNotApplicableError("stacked output matrix Cbar is row rank deficient");
    }

    auto assemble = [&](const Eigen::MatrixXd& bz) {
        Eigen::MatrixXd t(lx, lx);
        if (l_eta > 0) {
            t << bz, bundle.Cbar;
        } else {
            t = bundle.Cbar;
        }
        return t;
    };

    if (forced_bz) {
        if (forced_bz->rows() != l_eta || forced_bz->cols() != lx) {
            throw InvalidInputError("forced Bz must be (l_x - rho) x l_x");
        }
        const double annihilation = (*forced_bz * sys.B).cwiseAbs().maxCoeff();
        if (annihilation > 1e-9 * (1.0 + forced_bz->norm() * sys.B.norm())) {
            throw InvalidInputError("forced Bz does not annihilate B");
        }
        bundle.Bz = *forced_bz;
    } else if (l_eta == 0) {
        bundle.Bz = Eigen::MatrixXd(0, lx);
    } else {
        std::vector<Eigen::MatrixXd> candidates;
        if (auto bz = select_bz_svd(bundle.Bbar, bundle.Cbar, l_eta, tol)) {
            candidates.push_back(std::move(*bz));
        }
        if (auto bz = select_bz_greedy(bundle.Bbar, bundle.Cbar, l_eta, tol)) {
            candidates.push_back(std::move(*bz));
        }
        double best_cond = std::numeric_limits<double>::infinity();
        for (const Eigen::MatrixXd& bz : candidates) {
            const Eigen::MatrixXd t = assemble(bz);
            if (!invertible(t, tol)) continue;
            const double cond = condition_of(t);
            if (cond < best_cond) {
                best_cond = cond;
                bundle.Bz = bz;
            }
        }
        if (!std::isfinite(best_cond)) {
            throw DecompositionNotApplicableError(
                "no invertible transformation exists: " +
                rank_diagnostics(sys, rho, bundle.Bbar, tol));
        }
    }

    bundle.T = assemble(bundle.Bz);
    InverseResult inv;
    try {
        inv = solve_or_invert(bundle.T, tol);
    } catch (const SingularMatrixError&) {
        throw DecompositionNotApplicableError("transformation T is singular: " +
                                              rank_diagnostics(sys, rho, bundle.Bbar, tol));
    }
    bundle.S = std::move(inv.inverse);
    bundle.condition_T = inv.condition;
    return bundle;
}

InvariantZeroForm decompose(const StateSpace& sys, const TransformationBundle& bundle,
                            const RelativeDegreeProfile& rho, const RankTolerance& tol) {
    const Index lx = sys.lx();
    const Index l_eta = lx - rho.total;
    const Index n_rho = rho.total;

    const Eigen::MatrixXd a_full = bundle.T * sys.A * bundle.S;
    const Eigen::MatrixXd b_full = bundle.T * sys.B;
    const Eigen::MatrixXd c_full = sys.C * bundle.S;

    InvariantZeroForm form;
    form.A_eta = a_full.topLeftCorner(l_eta, l_eta);
    form.A_etaxi = a_full.topRightCorner(l_eta, n_rho);
    form.A_xieta = a_full.bottomLeftCorner(n_rho, l_eta);
    form.A_xi = a_full.bottomRightCorner(n_rho, n_rho);
    form.B_xi = b_full.bottomRows(n_rho);
    form.C_xi = c_full.rightCols(n_rho);
    form.bundle = bundle;
    form.rho = rho;

    StructureResiduals res;
    if (l_eta > 0) {
        res.b_top = b_full.topRows(l_eta).cwiseAbs().maxCoeff();
        res.c_left = c_full.leftCols(l_eta).cwiseAbs().maxCoeff();
    }

    Eigen::MatrixXd c_xi_pattern = Eigen::MatrixXd::Zero(sys.ly(), n_rho);
    Eigen::MatrixXd a_xi_pattern = Eigen::MatrixXd::Zero(n_rho, n_rho);
    Index offset = 0;
    for (Index i = 0; i < sys.ly(); ++i) {
        const Index ri = rho.per_output[static_cast<std::size_t>(i)];
        c_xi_pattern(i, offset) = 1.0;
        for (Index k = 0; k + 1 < ri; ++k) {
            a_xi_pattern(offset + k, offset + k + 1) = 1.0;
            res.a_xi_rows = std::max(
                res.a_xi_rows,
                (form.A_xi.row(offset + k) - a_xi_pattern.row(offset + k)).cwiseAbs().maxCoeff());
            if (l_eta > 0) {
                res.a_xieta_rows = std::max(res.a_xieta_rows,
                                            form.A_xieta.row(offset + k).cwiseAbs().maxCoeff());
            }
        }
        offset += ri;
    }
    res.c_xi_pattern = (form.C_xi - c_xi_pattern).cwiseAbs().maxCoeff();
    form.residuals = res;

    form.structure_tolerance = 1e-8 * (1.0 + sys.A.norm() * bundle.condition_T);
    if (res.max() > form.structure_tolerance) {
        std::ostringstream os;
        os << "transformed realization violates the sparse structure (residual " << res.max()
           << " > " << form.structure_tolerance << "); relative degree or tolerance is wrong";
        throw StructureViolationError(os.str(), res.max());
    }

    form.b_xi_full_column_rank = numerical_rank(form.B_xi, tol) == sys.lu();
    return form;
}

InvariantZeroForm decompose(const StateSpace& sys, const RankTolerance& tol,
                            const std::optional<Eigen::MatrixXd>& forced_bz) {
    const RelativeDegreeProfile rho = relative_degree(sys, tol);
    const TransformationBundle bundle = build_transformation(sys, rho, tol, forced_bz);
    return decompose(sys, bundle, rho, tol);
}

ZeroMultiset invariant_zeros_izform(const StateSpace& sys, const RankTolerance& tol) {
    const ValidationReport report = validate(sys);
    if (sys.lu() != sys.ly()) {
        throw DecompositionNotApplicableError(
            "eigenvalue route is only proved for square systems; use the squaring dispatch");
    }
    if (!report.d_is_zero) {
        throw DecompositionNotApplicableError(
            "system has direct feedthrough; apply a dynamic extension first");
    }

    const InvariantZeroForm form = decompose(sys, tol);
    ZeroMultiset zeros;
    zeros.method = "izform";
    for (const Complex& ev : eigenvalues(form.A_eta)) zeros.zeros.push_back({ev, 1, false});
    return verify_zeros(sys, zeros, tol);
}

}  // namespace zeroform
