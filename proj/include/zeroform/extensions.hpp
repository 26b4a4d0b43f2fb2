#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "zeroform/rosenbrock.hpp"
#include "zeroform/state_space.hpp"

namespace zeroform {

/// Strictly proper augmentation of a system with feedthrough (first-order
/// input filter with pole -alpha); invariant zeros are unchanged.
struct ExtendedRealization {
    StateSpace base;
    double alpha = 0.0;
    StateSpace extended;  // l_x + l_u states, D = 0
};

ExtendedRealization dynamic_extension(const StateSpace& sys, double alpha);

/// Default extension pole: 1 + spectral radius of A, keeping -alpha away from
/// the eigenvalues of A and from likely zero locations.
double default_extension_pole(const StateSpace& sys);

/**
 * Randomized squaring of a nonsquare system. Explicit augmentation blocks can
 * be supplied (one per round) instead of seed-driven random ones.
 */
struct SquaringPlan {
    std::uint64_t seed = kDefaultSeed;
    int rounds = 3;
    std::vector<Eigen::MatrixXd> augmentations;  // optional explicit blocks
};

/**
 * For l_u > l_y appends rows to C (zero rows to D); for l_y > l_u appends
 * columns to B (zero columns to D). Random entries are scale-matched to the
 * augmented matrix. Returns `rounds` independently squared systems.
 */
std::vector<StateSpace> square_system(const StateSpace& sys, const SquaringPlan& plan);

struct GeneralOptions {
    RankTolerance tol;
    std::uint64_t seed = kDefaultSeed;
    int rounds = 3;
    std::optional<double> alpha;  // extension pole override
    /// Looser matching used when intersecting zero sets across squaring rounds.
    MatchTolerance squaring_match{1e-4, 0.0};
};

/**
 * Full dispatch: square strictly proper systems go straight to the eigenvalue
 * route; feedthrough is removed by dynamic extension (candidates at -alpha
 * survive only if the original pencil confirms them); nonsquare systems are
 * squared `rounds` times and the common, pencil-verified zeros returned.
 */
ZeroMultiset invariant_zeros_general(const StateSpace& sys, const GeneralOptions& opts = {});

}  // namespace zeroform
