#include <doctest.h>

#include <random>

#include "paper_systems.hpp"
#include "test_util.hpp"
#include "zeroform/state_space.hpp"

using namespace zeroform;
using testutil::max_abs_diff;

TEST_CASE("validation classifies the reference systems") {
    SUBCASE("square strictly proper") {
        const ValidationReport r = validate(refsys::mimo_square());
        CHECK(r.shape == SystemShape::Square);
        CHECK(r.d_is_zero);
    }

    SUBCASE("square with feedthrough") {
        const ValidationReport r = validate(refsys::feedthrough_square());
        CHECK(r.shape == SystemShape::Square);
        CHECK_FALSE(r.d_is_zero);
    }

    SUBCASE("wide") {
        const ValidationReport r = validate(refsys::wide_system());
        CHECK(r.shape == SystemShape::Wide);
        CHECK(r.d_is_zero);
    }

    SUBCASE("dimension mismatch names the offending matrix") {
        StateSpace sys = refsys::mimo_square();
        sys.B = Eigen::MatrixXd::Zero(5, 2);  // wrong row count
        CHECK_THROWS_WITH_AS(validate(sys), doctest::Contains("matrix B"), InvalidInputError);
    }

    SUBCASE("non-finite entries rejected") {
        StateSpace sys = refsys::siso();
        sys.A(0, 0) = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(validate(sys), InvalidInputError);
    }
}

TEST_CASE("relative degree of the reference systems") {
    SUBCASE("square strictly proper: (2, 2)") {
        const RelativeDegreeProfile rho = relative_degree(refsys::mimo_square());
        CHECK(rho.per_output == std::vector<int>{2, 2});
        CHECK(rho.total == 4);
    }

    SUBCASE("feedthrough rows give degree zero") {
        const RelativeDegreeProfile rho = relative_degree(refsys::feedthrough_square());
        CHECK(rho.per_output == std::vector<int>{0, 0});
        CHECK(rho.total == 0);
    }

    SUBCASE("filtered realization: (1, 1)") {
        const RelativeDegreeProfile rho = relative_degree(refsys::feedthrough_filtered());
        CHECK(rho.per_output == std::vector<int>{1, 1});
        CHECK(rho.total == 2);
    }

    SUBCASE("siso: 2") {
        const RelativeDegreeProfile rho = relative_degree(refsys::siso());
        CHECK(rho.per_output == std::vector<int>{2});
        CHECK(rho.total == 2);
    }

    SUBCASE("decoupled output has no relative degree") {
        StateSpace sys = refsys::siso();
        sys.C.setZero();
        CHECK_THROWS_AS(relative_degree(sys), UndefinedRelativeDegreeError);
    }
}

TEST_CASE("relative degree is invariant under state transformations") {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> pick_lx(2, 8);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Index lx = pick_lx(rng);
        const Index lu = 1 + static_cast<Index>(trial % 2);
        const StateSpace sys = random_dense_system(lx, lu, lu, rng());
        RelativeDegreeProfile before;
        try {
            before = relative_degree(sys);
        } catch (const UndefinedRelativeDegreeError&) {
            continue;  // decoupled random draw
        }
        const Eigen::MatrixXd p = random_similarity(lx, rng());
        const RelativeDegreeProfile after = relative_degree(similarity_transform(sys, p));
        CHECK(after.per_output == before.per_output);
        ++checked;
    }
    CHECK(checked >= 95);  // random decoupling is measure zero
}

TEST_CASE("similarity transform basics") {
    const StateSpace sys = refsys::mimo_square();

    SUBCASE("identity leaves the system unchanged") {
        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(6, 6);
        const StateSpace same = similarity_transform(sys, eye);
        CHECK(max_abs_diff(same.A, sys.A) <= 1e-14);
        CHECK(max_abs_diff(same.B, sys.B) <= 1e-14);
        CHECK(max_abs_diff(same.C, sys.C) <= 1e-14);
    }

    SUBCASE("singular transformation is rejected") {
        Eigen::MatrixXd p = Eigen::MatrixXd::Zero(6, 6);
        CHECK_THROWS_AS(similarity_transform(sys, p), SingularMatrixError);
    }
}

TEST_CASE("zero multiset matching") {
    using refsys::multiset;

    SUBCASE("order does not matter") {
        CHECK(multisets_match(multiset({{-1, 0}, {0, 0}}), multiset({{0, 0}, {-1, 0}})));
    }

    SUBCASE("multiplicity matters") {
        CHECK_FALSE(multisets_match(multiset({{1, 0}, {1, 0}}), multiset({{1, 0}})));
        CHECK(multisets_match(multiset({{1, 0}, {1, 0}}), multiset({{1, 0}, {1, 0}})));
    }

    SUBCASE("threshold scales with magnitude") {
        const MatchTolerance tol;
        CHECK(multisets_match(multiset({{1000.0, 0}}), multiset({{1000.0 + 5e-4, 0}}), tol));
        CHECK_FALSE(multisets_match(multiset({{1.0, 0}}), multiset({{1.0 + 5e-4, 0}}), tol));
    }

    SUBCASE("near-coincident values pair correctly") {
        // Greedy matching must not strand a partner.
        const ZeroMultiset a = multiset({{1.0, 0}, {1.0 + 1e-8, 0}});
        const ZeroMultiset b = multiset({{1.0 + 1e-8, 0}, {1.0, 0}});
        CHECK(multisets_match(a, b));
    }

    SUBCASE("intersection keeps only common values") {
        const ZeroMultiset common = intersect_multisets(
            multiset({{0.5, 0}, {1.0, 0}, {1.0, 0}}), multiset({{0.14, 0}, {1.0, 0}, {1.0, 0}}),
            MatchTolerance{1e-4, 0.0});
        REQUIRE(common.count() == 2);
        for (const Complex& z : common.flat()) CHECK(std::abs(z - Complex(1.0, 0)) <= 1e-9);
    }

    SUBCASE("conjugate closure") {
        CHECK(conjugate_closed(multiset({{-0.77, 1.38}, {-0.77, -1.38}})));
        CHECK_FALSE(conjugate_closed(multiset({{-0.77, 1.38}, {-2.23, -2.16}})));
        CHECK(conjugate_closed(multiset({{3.0, 0}})));
    }

    SUBCASE("clustered groups duplicates") {
        const ZeroMultiset grouped = multiset({{1.0, 0}, {1.0 + 1e-9, 0}, {2.0, 0}}).clustered();
        REQUIRE(grouped.zeros.size() == 2);
        CHECK(grouped.zeros[0].multiplicity == 2);
        CHECK(grouped.zeros[1].multiplicity == 1);
    }
}

TEST_CASE("random system generation") {
    SystemDims dims;
    dims.lx = 4;
    dims.lu = 2;
    dims.ly = 2;
    dims.rho = {1, 1};

    SUBCASE("same seed reproduces the same matrices") {
        const PlantedSystem a = random_system(dims, 7, {Complex(-1, 0), Complex(-2, 0)});
        const PlantedSystem b = random_system(dims, 7, {Complex(-1, 0), Complex(-2, 0)});
        CHECK(max_abs_diff(a.sys.A, b.sys.A) == 0.0);
        CHECK(max_abs_diff(a.sys.B, b.sys.B) == 0.0);
        CHECK(max_abs_diff(a.sys.C, b.sys.C) == 0.0);
    }

    SUBCASE("different seeds differ") {
        const PlantedSystem a = random_system(dims, 7);
        const PlantedSystem b = random_system(dims, 8);
        CHECK(max_abs_diff(a.sys.A, b.sys.A) > 1e-6);
    }

    SUBCASE("ground truth size equals l_x - rho") {
        const PlantedSystem p = random_system(dims, 3, {Complex(-1, 0)});
        CHECK(p.zeros.count() == 2);  // one planted + one filler
        const ZeroMultiset requested = refsys::multiset({{-1, 0}});
        CHECK(intersect_multisets(p.zeros, requested).count() == 1);
    }

    SUBCASE("full relative degree leaves no zeros") {
        SystemDims full;
        full.lx = 4;
        full.lu = 2;
        full.ly = 2;
        full.rho = {2, 2};
        const PlantedSystem p = random_system(full, 5);
        CHECK(p.zeros.count() == 0);
        const RelativeDegreeProfile rho = relative_degree(p.sys);
        CHECK(rho.total == 4);
    }

    SUBCASE("requested relative degrees are realized") {
        SystemDims req;
        req.lx = 7;
        req.lu = 2;
        req.ly = 2;
        req.rho = {2, 3};
        const PlantedSystem p = random_system(req, 11, {Complex(0, 1), Complex(0, -1)});
        const RelativeDegreeProfile rho = relative_degree(p.sys);
        CHECK(rho.per_output == std::vector<int>{2, 3});
    }

    SUBCASE("infeasible requests are rejected") {
        CHECK_THROWS_AS(random_system(dims, 1, {Complex(-1, 0), Complex(-2, 0), Complex(-3, 0)}),
                        InvalidInputError);
        CHECK_THROWS_AS(random_system(dims, 1, {Complex(0, 1)}), InvalidInputError);

        SystemDims wide = dims;
        wide.lu = 3;
        CHECK_THROWS_AS(random_system(wide, 1), InvalidInputError);
    }
}
