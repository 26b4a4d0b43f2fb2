#pragma once

#include <cstdint>

#include "zeroform/izform.hpp"
#include "zeroform/state_space.hpp"

namespace zeroform {

/// Rank of the Rosenbrock matrix at one point, against the normal rank.
struct PencilEvaluation {
    Complex point;
    Index chi_rank = 0;
    Index normal_rank = 0;
    bool drops = false;
};

/// Default sample count for normal-rank estimation.
inline constexpr int kNormalRankSamples = 7;
/// Default seed for all randomized procedures.
inline constexpr std::uint64_t kDefaultSeed = 0x5eedf0a1u;

/// [[sI - A, B], [C, -D]], size (l_x + l_y) x (l_x + l_u).
Eigen::MatrixXcd rosenbrock_matrix(const StateSpace& sys, Complex s);

PencilEvaluation evaluate_pencil(const StateSpace& sys, Complex s, Index normal_rank,
                                 const RankTolerance& tol = {});

/**
 * Maximum rank of chi(s) over pseudo-random sample points on a circle of
 * radius 2 * (1 + spectral radius of A). Deterministic per seed.
 */
Index estimate_normal_rank(const StateSpace& sys, const RankTolerance& tol = {},
                           int samples = kNormalRankSamples,
                           std::uint64_t seed = kDefaultSeed);

/**
 * Sets the verified flag of each candidate according to whether the pencil
 * rank drops there. Candidate locations carry O(sqrt(eps)) error from the
 * eigensolvers, so the rank threshold used here is floored at
 * `drop_threshold`; the multiset itself is passed through unchanged.
 */
ZeroMultiset verify_zeros(const StateSpace& sys, ZeroMultiset candidates,
                          const RankTolerance& tol = {}, double drop_threshold = 1e-8);

struct DetInterpolationResult {
    ZeroMultiset zeros;
    int degree = 0;                     // after trailing-coefficient truncation
    std::vector<Complex> coefficients;  // ascending powers, length degree + 1
};

/**
 * Independent oracle for square systems: interpolates det chi(s) from
 * l_x + 1 samples on a circle (inverse DFT), then returns the roots of the
 * truncated polynomial via companion-matrix eigenvalues.
 *
 * Throws OracleNotApplicableError for nonsquare systems and for degenerate
 * pencils whose determinant vanishes identically.
 */
DetInterpolationResult zeros_by_det_interpolation(const StateSpace& sys,
                                                  const RankTolerance& tol = {});

/// The rank certificate of the main proof, evaluated at one point.
struct ProofDiagnostics {
    Eigen::MatrixXcd Phi;  // l_x x l_x
    Eigen::MatrixXcd Psi;  // l_x x rho
    Eigen::MatrixXd Xi;    // rho x rho
    Index product_rank = 0;
};

/// Phi(s), Psi(s), Xi and rank(Phi Psi Xi), which equals rho - l_y for square systems.
ProofDiagnostics proof_diagnostics(const InvariantZeroForm& form, Complex s,
                                   const RankTolerance& tol = {});

}  // namespace zeroform
