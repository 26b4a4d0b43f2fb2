#include <doctest.h>

#include <algorithm>
#include <random>

#include "paper_systems.hpp"
#include "test_util.hpp"
#include "zeroform/izform.hpp"
#include "zeroform/rosenbrock.hpp"

using namespace zeroform;
using testutil::max_abs_diff;

namespace {

// Independent rank count for oracle checks: raw SVD of a hand-assembled
// block matrix, counting singular values above a fixed relative cutoff.
Index reference_rank(const Eigen::MatrixXcd& m, double rel_cutoff = 1e-10) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > rel_cutoff * sv(0)) ++rank;
    }
    return rank;
}

Eigen::MatrixXcd reference_pencil(const StateSpace& sys, Complex s) {
    const Index lx = sys.lx();
    Eigen::MatrixXcd chi(lx + sys.ly(), lx + sys.lu());
    chi.setZero();
    for (Index i = 0; i < lx; ++i) chi(i, i) = s;
    chi.topLeftCorner(lx, lx) -= sys.A.cast<Complex>();
    chi.topRightCorner(lx, sys.lu()) = sys.B.cast<Complex>();
    chi.bottomLeftCorner(sys.ly(), lx) = sys.C.cast<Complex>();
    chi.bottomRightCorner(sys.ly(), sys.lu()) = -sys.D.cast<Complex>();
    return chi;
}

double complex_vs_real_diff(const Eigen::MatrixXcd& got, const Eigen::MatrixXd& expected) {
    return (got - expected.cast<Complex>()).cwiseAbs().maxCoeff();
}

bool contains_value(const ZeroMultiset& zs, Complex value, double tol) {
    return std::any_of(zs.zeros.begin(), zs.zeros.end(),
                       [&](const Zero& z) { return std::abs(z.value - value) <= tol; });
}

}  // namespace

TEST_CASE("pencil assembly matches the block definition") {
    const StateSpace sys = refsys::feedthrough_square();
    const Complex s(0.3, -1.7);
    CHECK((rosenbrock_matrix(sys, s) - reference_pencil(sys, s)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pencil rank drops exactly at the known zeros") {
    const StateSpace sys = refsys::mimo_square();
    const Index normal = estimate_normal_rank(sys);
    CHECK(normal == 8);

    CHECK(evaluate_pencil(sys, Complex(-1, 0), normal).drops);
    CHECK(evaluate_pencil(sys, Complex(0, 0), normal).drops);

    const PencilEvaluation at5 = evaluate_pencil(sys, Complex(5, 0), normal);
    CHECK_FALSE(at5.drops);
    CHECK(at5.chi_rank == reference_rank(reference_pencil(sys, Complex(5, 0))));

    const StateSpace wide = refsys::wide_system();
    const Index wide_normal = estimate_normal_rank(wide);
    CHECK(wide_normal == 8);
    CHECK(evaluate_pencil(wide, Complex(1, 0), wide_normal).drops);
}

TEST_CASE("normal rank estimation") {
    SUBCASE("deterministic per seed") {
        const StateSpace sys = refsys::mimo_square();
        CHECK(estimate_normal_rank(sys, {}, 7, 42) == estimate_normal_rank(sys, {}, 7, 42));
    }

    SUBCASE("only sI - A contributes when C and D vanish") {
        StateSpace sys = refsys::mimo_square();
        sys.C.setZero();
        const Index expected = sys.lx();
        // B is rank 2 here and [sI - A, B] is l_x x (l_x + l_u) with full row
        // rank l_x; the zero C block adds nothing.
        CHECK(estimate_normal_rank(sys) == expected);
    }

    SUBCASE("sample count below three is rejected") {
        CHECK_THROWS_AS(estimate_normal_rank(refsys::siso(), {}, 2), InvalidInputError);
    }
}

TEST_CASE("verify_zeros flags rank-dropping candidates") {
    const StateSpace sys = refsys::siso();

    SUBCASE("true zero verifies, pole does not") {
        // Poles of the SISO transfer function are -2, -3, -4; only -1 is a zero.
        ZeroMultiset candidates = refsys::multiset({{-1, 0}, {-2, 0}});
        candidates = verify_zeros(sys, candidates);
        REQUIRE(candidates.zeros.size() == 2);
        CHECK(candidates.zeros[0].verified);
        CHECK_FALSE(candidates.zeros[1].verified);
    }

    SUBCASE("empty candidate set passes through") {
        const ZeroMultiset empty = verify_zeros(sys, ZeroMultiset{});
        CHECK(empty.zeros.empty());
    }
}

TEST_CASE("determinant interpolation oracle") {
    SUBCASE("siso zero at -1") {
        const DetInterpolationResult res = zeros_by_det_interpolation(refsys::siso());
        CHECK(res.degree == 1);
        REQUIRE(res.zeros.count() == 1);
        CHECK(std::abs(res.zeros.zeros[0].value - Complex(-1, 0)) <= 1e-9);
    }

    SUBCASE("square reference zeros {-1, 0}") {
        const DetInterpolationResult res = zeros_by_det_interpolation(refsys::mimo_square());
        CHECK(res.degree == 2);
        REQUIRE(res.zeros.count() == 2);
        CHECK(contains_value(res.zeros, Complex(-1, 0), 1e-9));
        CHECK(contains_value(res.zeros, Complex(0, 0), 1e-9));
    }

    SUBCASE("feedthrough system matches the two-decimal reference values") {
        const DetInterpolationResult res =
            zeros_by_det_interpolation(refsys::feedthrough_square());
        CHECK(res.degree == 4);
        REQUIRE(res.zeros.count() == 4);
        ZeroMultiset expected;
        for (const Complex& z : refsys::feedthrough_zeros_2dp()) {
            expected.zeros.push_back({z, 1, false});
        }
        CHECK(multisets_match(res.zeros, expected, MatchTolerance{5e-3, 0.0}));
        CHECK(conjugate_closed(res.zeros));
    }

    SUBCASE("nonsquare input is rejected") {
        CHECK_THROWS_AS(zeros_by_det_interpolation(refsys::wide_system()),
                        OracleNotApplicableError);
    }

    SUBCASE("degenerate pencil is detected by sampling") {
        StateSpace sys = refsys::mimo_square();
        sys.C.row(0).setZero();  // zero output row: det chi(s) vanishes identically
        CHECK_THROWS_AS(zeros_by_det_interpolation(sys), OracleNotApplicableError);
    }
}

TEST_CASE("proof diagnostics reproduce the reference certificate") {
    const StateSpace sys = refsys::mimo_square();
    const InvariantZeroForm form = decompose(sys, {}, refsys::mimo_square_bz());

    SUBCASE("away from the spectrum of A_eta (s = 8)") {
        const ProofDiagnostics diag = proof_diagnostics(form, Complex(8, 0));
        CHECK(diag.product_rank == 2);  // rho - l_y

        Eigen::MatrixXd phi_expected = Eigen::MatrixXd::Zero(6, 6);
        phi_expected(2, 2) = 1.0;
        phi_expected(4, 4) = 1.0;
        CHECK(complex_vs_real_diff(diag.Phi, phi_expected) <= 1e-8);

        Eigen::MatrixXd product_expected = Eigen::MatrixXd::Zero(6, 4);
        product_expected(2, 1) = -1.0;
        product_expected(4, 3) = -1.0;
        const Eigen::MatrixXcd product = diag.Phi * diag.Psi * diag.Xi.cast<Complex>();
        CHECK(complex_vs_real_diff(product, product_expected) <= 1e-8);
    }

    SUBCASE("at an eigenvalue of A_eta (s = -1)") {
        const ProofDiagnostics diag = proof_diagnostics(form, Complex(-1, 0));
        CHECK(diag.product_rank == 2);

        Eigen::MatrixXd phi_expected = Eigen::MatrixXd::Zero(6, 6);
        phi_expected(1, 1) = 1.0;
        phi_expected(2, 2) = 1.0;
        phi_expected(4, 4) = 1.0;
        CHECK(complex_vs_real_diff(diag.Phi, phi_expected) <= 1e-8);

        Eigen::MatrixXd product_expected = Eigen::MatrixXd::Zero(6, 4);
        product_expected(1, 1) = 0.25;
        product_expected(1, 3) = -0.25;
        product_expected(2, 1) = -1.0;
        product_expected(4, 3) = -1.0;
        const Eigen::MatrixXcd product = diag.Phi * diag.Psi * diag.Xi.cast<Complex>();
        CHECK(complex_vs_real_diff(product, product_expected) <= 1e-8);
    }

    SUBCASE("siso certificate rank is rho - l_y = 1 at any point") {
        const InvariantZeroForm siso_form = decompose(refsys::siso());
        for (const Complex s : {Complex(0, 0), Complex(-1, 0), Complex(3, 2), Complex(8, 0)}) {
            CHECK(proof_diagnostics(siso_form, s).product_rank == 1);
        }
    }
}

TEST_CASE("certificate rank equals rho - l_y across random decompositions") {
    std::mt19937_64 rng(211);
    std::uniform_int_distribution<int> pick_ly(1, 3);
    std::uniform_int_distribution<int> pick_rho(1, 2);
    std::uniform_real_distribution<double> coord(-4.0, 4.0);

    for (int trial = 0; trial < 50; ++trial) {
        SystemDims dims;
        dims.ly = pick_ly(rng);
        dims.lu = dims.ly;
        int total = 0;
        for (Index i = 0; i < dims.ly; ++i) {
            dims.rho.push_back(pick_rho(rng));
            total += dims.rho.back();
        }
        dims.lx = total + static_cast<Index>(trial % 3);  // l_eta in {0, 1, 2}
        const PlantedSystem planted = random_system(dims, 3000 + trial);
        const InvariantZeroForm form = decompose(planted.sys);

        const int expected = static_cast<int>(total - dims.ly);
        for (int k = 0; k < 5; ++k) {
            const Complex s(coord(rng), coord(rng));
            CHECK(proof_diagnostics(form, s).product_rank == expected);
        }
        for (const Complex& ev : eigenvalues(form.A_eta)) {
            CHECK(proof_diagnostics(form, ev).product_rank == expected);
        }
    }
}

TEST_CASE("stacked pencil block rank splits as in the main proof") {
    // rank [[sI - A_eta, 0], [-A_xieta, B_xi]] = rank(sI - A_eta) + rank(B_xi)
    std::mt19937_64 rng(223);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    for (int trial = 0; trial < 25; ++trial) {
        SystemDims dims;
        dims.ly = 2;
        dims.lu = 2;
        dims.rho = {1 + trial % 2, 2};
        dims.lx = dims.rho[0] + dims.rho[1] + 1 + trial % 2;
        const PlantedSystem planted = random_system(dims, 4000 + trial);
        const InvariantZeroForm form = decompose(planted.sys);
        const Index l_eta = form.l_eta();
        const Index n_rho = form.A_xi.rows();

        std::vector<Complex> points;
        for (int k = 0; k < 3; ++k) points.emplace_back(coord(rng), coord(rng));
        for (const Complex& ev : eigenvalues(form.A_eta)) points.push_back(ev);

        for (const Complex& s : points) {
            Eigen::MatrixXcd block(l_eta + n_rho, l_eta + form.B_xi.cols());
            block.topLeftCorner(l_eta, l_eta) =
                s * Eigen::MatrixXcd::Identity(l_eta, l_eta) - form.A_eta.cast<Complex>();
            block.topRightCorner(l_eta, form.B_xi.cols()).setZero();
            block.bottomLeftCorner(n_rho, l_eta) = -form.A_xieta.cast<Complex>();
            block.bottomRightCorner(n_rho, form.B_xi.cols()) = form.B_xi.cast<Complex>();

            const double anchor = std::max(1.0, block.norm());
            const Eigen::MatrixXcd si_minus_a =
                s * Eigen::MatrixXcd::Identity(l_eta, l_eta) - form.A_eta.cast<Complex>();
            CHECK(numerical_rank_anchored(block, anchor) ==
                  numerical_rank_anchored(si_minus_a, anchor) + numerical_rank(form.B_xi));
        }
    }
}

TEST_CASE("rank drop soundness on planted systems") {
    std::mt19937_64 rng(227);
    std::uniform_real_distribution<double> coord(-4.0, 4.0);
    for (int trial = 0; trial < 10; ++trial) {
        SystemDims dims;
        dims.ly = 2;
        dims.lu = 2;
        dims.rho = {1, 1};
        dims.lx = 4;
        std::vector<Complex> planted = {Complex(-1.5, 0), Complex(0.5 + trial * 0.25, 0)};
        const PlantedSystem p = random_system(dims, 5000 + trial, planted);
        const Index normal = estimate_normal_rank(p.sys);

        for (const Complex& z : planted) {
            CHECK(evaluate_pencil(p.sys, z, normal).drops);
        }
        int non_drop_checked = 0;
        for (int k = 0; k < 20; ++k) {
            const Complex s(coord(rng), coord(rng));
            const bool near_zero = std::any_of(planted.begin(), planted.end(), [&](Complex z) {
                return std::abs(z - s) < 0.2;
            });
            if (near_zero) continue;
            CHECK_FALSE(evaluate_pencil(p.sys, s, normal).drops);
            ++non_drop_checked;
        }
        CHECK(non_drop_checked >= 15);
    }
}
