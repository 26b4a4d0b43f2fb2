#include "zeroform/rosenbrock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace zeroform {

namespace {

std::vector<Complex> circle_points(double radius, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::vector<Complex> points(static_cast<std::size_t>(count));
    for (Complex& p : points) p = std::polar(radius, angle(rng));
    return points;
}

}  // namespace

Eigen::MatrixXcd rosenbrock_matrix(const StateSpace& sys, Complex s) {
    const Index lx = sys.lx();
    Eigen::MatrixXcd chi(lx + sys.ly(), lx + sys.lu());
    chi.topLeftCorner(lx, lx) =
        s * Eigen::MatrixXcd::Identity(lx, lx) - sys.A.cast<Complex>();
    chi.topRightCorner(lx, sys.lu()) = sys.B.cast<Complex>();
    chi.bottomLeftCorner(sys.ly(), lx) = sys.C.cast<Complex>();
    chi.bottomRightCorner(sys.ly(), sys.lu()) = -sys.D.cast<Complex>();
    return chi;
}

PencilEvaluation evaluate_pencil(const StateSpace& sys, Complex s, Index normal_rank,
                                 const RankTolerance& tol) {
    validate(sys);
    PencilEvaluation eval;
    eval.point = s;
    eval.chi_rank = numerical_rank(rosenbrock_matrix(sys, s), tol);
    eval.normal_rank = std::max(normal_rank, eval.chi_rank);
    eval.drops = eval.chi_rank < eval.normal_rank;
    return eval;
}

Index estimate_normal_rank(const StateSpace& sys, const RankTolerance& tol, int samples,
                           std::uint64_t seed) {
    validate(sys);
    if (samples < 3) throw InvalidInputError("normal rank estimation needs >= 3 samples");
    const double radius = 2.0 * (1.0 + spectral_radius(sys.A));
    Index best = 0;
    for (const Complex& s : circle_points(radius, samples, seed)) {
        best = std::max(best, numerical_rank(rosenbrock_matrix(sys, s), tol));
    }
    return best;
}

ZeroMultiset verify_zeros(const StateSpace& sys, ZeroMultiset candidates,
                          const RankTolerance& tol, double drop_threshold) {
    validate(sys);
    const RankTolerance drop_tol = tol.floored(drop_threshold);
    const Index normal_rank = estimate_normal_rank(sys, drop_tol);
    for (Zero& z : candidates.zeros) {
        z.verified = evaluate_pencil(sys, z.value, normal_rank, drop_tol).drops;
    }
    return candidates;
}

DetInterpolationResult zeros_by_det_interpolation(const StateSpace& sys,
                                                  const RankTolerance& tol) {
    validate(sys);
    if (sys.lu() != sys.ly()) {
        throw OracleNotApplicableError("determinant interpolation needs a square pencil");
    }
    // Regularity check by sampling: a square pencil has identically vanishing
    // determinant exactly when its normal rank is deficient.
    const Index full = sys.lx() + sys.lu();
    if (estimate_normal_rank(sys, tol) < full) {
        throw OracleNotApplicableError(
            "pencil is degenerate: det chi(s) vanishes identically at the sampled points");
    }

    const Index lx = sys.lx();
    const int node_count = static_cast<int>(lx) + 1;
    const double radius = 1.0 + spectral_radius(sys.A);
    const Complex root_of_unity =
        std::polar(1.0, 2.0 * std::numbers::pi / static_cast<double>(node_count));

    Eigen::VectorXcd dets(node_count);
    for (int k = 0; k < node_count; ++k) {
        const Complex node = radius * std::pow(root_of_unity, k);
        dets(k) = Eigen::FullPivLU<Eigen::MatrixXcd>(rosenbrock_matrix(sys, node)).determinant();
    }

    // p(r w^k) = sum_j a_j r^j w^(jk): the scaled coefficients are the inverse
    // DFT of the node values.
    std::vector<Complex> coeffs(static_cast<std::size_t>(node_count));
    for (int j = 0; j < node_count; ++j) {
        Complex acc = 0.0;
        for (int k = 0; k < node_count; ++k) {
            acc += dets(k) * std::pow(root_of_unity, -j * k);
        }
        coeffs[static_cast<std::size_t>(j)] =
            acc / (static_cast<double>(node_count) * std::pow(radius, j));
    }

    double max_coeff = 0.0;
    for (const Complex& c : coeffs) max_coeff = std::max(max_coeff, std::abs(c));
    if (max_coeff == 0.0) {
        throw OracleNotApplicableError("interpolated determinant is identically zero");
    }

    int degree = node_count - 1;
    while (degree > 0 && std::abs(coeffs[static_cast<std::size_t>(degree)]) < 1e-8 * max_coeff) {
        --degree;
    }
    coeffs.resize(static_cast<std::size_t>(degree) + 1);

    DetInterpolationResult result;
    result.degree = degree;
    result.coefficients = coeffs;
    result.zeros.method = "detinterp";
    if (degree == 0) return result;

    // For a real system the determinant has real coefficients; drop the
    // interpolation noise in the imaginary parts so conjugate pairs are exact.
    double max_imag = 0.0;
    for (const Complex& c : coeffs) max_imag = std::max(max_imag, std::abs(c.imag()));
    if (max_imag <= 1e-8 * max_coeff) {
        Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
        for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
        for (int i = 0; i < degree; ++i) {
            companion(i, degree - 1) = -(coeffs[static_cast<std::size_t>(i)].real() /
                                         coeffs[static_cast<std::size_t>(degree)].real());
        }
        for (const Complex& root : eigenvalues(companion)) {
            result.zeros.zeros.push_back({root, 1, false});
        }
    } else {
        Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
        for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
        for (int i = 0; i < degree; ++i) {
            companion(i, degree - 1) =
                -(coeffs[static_cast<std::size_t>(i)] / coeffs[static_cast<std::size_t>(degree)]);
        }
        for (const Complex& root : eigenvalues(companion)) {
            result.zeros.zeros.push_back({root, 1, false});
        }
    }
    return result;
}

ProofDiagnostics proof_diagnostics(const InvariantZeroForm& form, Complex s,
                                   const RankTolerance& tol) {
    const Index l_eta = form.l_eta();
    const Index n_rho = form.A_xi.rows();
    const Index lx = l_eta + n_rho;
    const Index lu = form.B_xi.cols();

    Eigen::MatrixXcd m(lx, l_eta + lu);
    m.topLeftCorner(l_eta, l_eta) =
        s * Eigen::MatrixXcd::Identity(l_eta, l_eta) - form.A_eta.cast<Complex>();
    m.topRightCorner(l_eta, lu).setZero();
    m.bottomLeftCorner(n_rho, l_eta) = -form.A_xieta.cast<Complex>();
    m.bottomRightCorner(n_rho, lu) = form.B_xi.cast<Complex>();

    ProofDiagnostics diag;
    diag.Phi = Eigen::MatrixXcd::Identity(lx, lx) - m * pseudoinverse(m, tol);
    diag.Psi.resize(lx, n_rho);
    diag.Psi.topRows(l_eta) = -form.A_etaxi.cast<Complex>();
    diag.Psi.bottomRows(n_rho) =
        s * Eigen::MatrixXcd::Identity(n_rho, n_rho) - form.A_xi.cast<Complex>();
    const Eigen::MatrixXd c_xi_pinv = pseudoinverse(form.C_xi, tol);
    diag.Xi = Eigen::MatrixXd::Identity(n_rho, n_rho) - c_xi_pinv * form.C_xi;
    // Phi and Xi are projectors; the product scale is set by Psi. Anchoring
    // there keeps the rank at zero when the product cancels exactly.
    diag.product_rank = numerical_rank_anchored(
        Eigen::MatrixXcd(diag.Phi * diag.Psi * diag.Xi.cast<Complex>()),
        std::max(1.0, diag.Psi.norm()), tol);
    return diag;
}

}  // namespace zeroform
