#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "zeroform/linalg.hpp"

namespace zeroform {

/// Continuous-time LTI realization x' = Ax + Bu, y = Cx + Du.
struct StateSpace {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;
    Eigen::MatrixXd D;

    Index lx() const { return A.rows(); }
    Index lu() const { return B.cols(); }
    Index ly() const { return C.rows(); }

    static StateSpace strictly_proper(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C);
};

enum class SystemShape { Square, Tall, Wide };

struct ValidationReport {
    SystemShape shape;
    bool d_is_zero;
};

/// Checks dimension consistency and finiteness; names the offending matrix on failure.
ValidationReport validate(const StateSpace& sys);

/**
 * Per-output relative degrees. An entry of 0 marks an output whose
 * feedthrough row is nonzero (the input appears without differentiation).
 */
struct RelativeDegreeProfile {
    std::vector<int> per_output;
    int total = 0;

    bool all_positive() const;
};

/**
 * Smallest k >= 1 with C_i A^(k-1) B nonzero for each output, scale-invariant
 * nonzero test. Throws UndefinedRelativeDegreeError if an output is decoupled
 * from every input.
 */
RelativeDegreeProfile relative_degree(const StateSpace& sys, const RankTolerance& tol = {});

/// (P A P^-1, P B, C P^-1, D). Throws SingularMatrixError for singular P.
StateSpace similarity_transform(const StateSpace& sys, const Eigen::MatrixXd& P,
                                const RankTolerance& tol = {});

struct Zero {
    Complex value;
    int multiplicity = 1;
    bool verified = false;
};

/// Invariant zeros with multiplicity and per-zero verification status.
struct ZeroMultiset {
    std::vector<Zero> zeros;
    std::string method;

    /// Total count including multiplicity.
    Index count() const;
    /// Values expanded by multiplicity.
    std::vector<Complex> flat() const;
    bool all_verified() const;
    /// Adjacent near-equal values merged into multiplicity counts (for reporting).
    ZeroMultiset clustered(double abs_tol = 1e-6, double rel_tol = 1e-6) const;
};

/// Absolute-plus-relative distance threshold for zero matching.
struct MatchTolerance {
    double absolute = 1e-6;
    double relative = 1e-6;

    double threshold_at(const Complex& z) const { return absolute + relative * std::abs(z); }
};

/// Greedy nearest-pair multiset equality; true only if a complete matching exists.
bool multisets_match(const ZeroMultiset& a, const ZeroMultiset& b, const MatchTolerance& tol = {});

/// Elements of `a` that find a partner in `b` under greedy nearest-pair matching.
ZeroMultiset intersect_multisets(const ZeroMultiset& a, const ZeroMultiset& b,
                                 const MatchTolerance& tol = {});

/// Nonreal members must occur in conjugate pairs.
bool conjugate_closed(const ZeroMultiset& zs, const MatchTolerance& tol = {});

/// Shape request for test-system generation.
struct SystemDims {
    Index lx = 0;
    Index lu = 0;
    Index ly = 0;
    std::vector<int> rho;  // requested per-output relative degrees, each >= 1
};

struct PlantedSystem {
    StateSpace sys;
    ZeroMultiset zeros;  // ground truth: all l_x - rho eigenvalues planted
};

/**
 * Deterministic random square system with prescribed invariant zeros.
 *
 * Built directly in invariant zero form (prescribed spectrum in the eta
 * partition, sparse chain structure in the xi partition) and hidden behind a
 * random well-conditioned similarity. If fewer than l_x - rho zeros are
 * requested, the remainder are drawn at random and reported in the result.
 */
PlantedSystem random_system(const SystemDims& dims, std::uint64_t seed,
                            const std::vector<Complex>& planted_zeros = {});

/// Unstructured random realization (D = 0); entries i.i.d. normal.
StateSpace random_dense_system(Index lx, Index lu, Index ly, std::uint64_t seed);

/// Random orthogonal-times-diagonal state transformation with condition <= cond.
Eigen::MatrixXd random_similarity(Index n, std::uint64_t seed, double cond = 10.0);

}  // namespace zeroform
