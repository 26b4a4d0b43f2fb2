#include "zeroform/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "zeroform/izform.hpp"

namespace zeroform {

namespace {

Eigen::MatrixXd random_block(Index rows, Index cols, double scale, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::MatrixXd block(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) block(i, j) = normal(rng);
    return block;
}

double rms_entry(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 1.0;
    const double rms = m.norm() / std::sqrt(static_cast<double>(m.size()));
    return rms > 0.0 ? rms : 1.0;
}

// Zeros of one square system, removing feedthrough by dynamic extension when
// needed. Verified flags always refer to the pencil of `sys` itself.
ZeroMultiset square_system_zeros(const StateSpace& sys, const GeneralOptions& opts) {
    const ValidationReport report = validate(sys);
    if (report.d_is_zero) {
        return invariant_zeros_izform(sys, opts.tol);
    }
    const double alpha = opts.alpha ? *opts.alpha : default_extension_pole(sys);
    const ExtendedRealization ext = dynamic_extension(sys, alpha);
    ZeroMultiset zeros = invariant_zeros_izform(ext.extended, opts.tol);
    zeros = verify_zeros(sys, std::move(zeros), opts.tol);
    zeros.method = "extension+izform";

    // A candidate coinciding with the extension pole is kept only when the
    // original pencil confirms it; otherwise it is an artifact of the pole.
    const Complex pole(-alpha, 0.0);
    MatchTolerance pole_match;
    std::erase_if(zeros.zeros, [&](const Zero& z) {
        return std::abs(z.value - pole) <= pole_match.threshold_at(pole) && !z.verified;
    });
    return zeros;
}

}  // namespace

ExtendedRealization dynamic_extension(const StateSpace& sys, double alpha) {
    validate(sys);
    if (!std::isfinite(alpha)) throw InvalidInputError("extension pole must be finite");
    const Index lx = sys.lx();
    const Index lu = sys.lu();

    ExtendedRealization ext;
    ext.base = sys;
    ext.alpha = alpha;

    Eigen::MatrixXd a_bar = Eigen::MatrixXd::Zero(lx + lu, lx + lu);
    a_bar.topLeftCorner(lx, lx) = sys.A;
    a_bar.topRightCorner(lx, lu) = sys.B;
    a_bar.bottomRightCorner(lu, lu) = -alpha * Eigen::MatrixXd::Identity(lu, lu);

    Eigen::MatrixXd b_bar = Eigen::MatrixXd::Zero(lx + lu, lu);
    b_bar.bottomRows(lu) = Eigen::MatrixXd::Identity(lu, lu);

    Eigen::MatrixXd c_bar(sys.ly(), lx + lu);
    c_bar << sys.C, sys.D;

    ext.extended = StateSpace::strictly_proper(std::move(a_bar), std::move(b_bar),
                                               std::move(c_bar));
    return ext;
}

double default_extension_pole(const StateSpace& sys) {
    return 1.0 + spectral_radius(sys.A);
}

std::vector<StateSpace> square_system(const StateSpace& sys, const SquaringPlan& plan) {
    const ValidationReport report = validate(sys);
    if (report.shape == SystemShape::Square) {
        throw InvalidInputError("system is already square; squaring is a no-op");
    }
    const int rounds = plan.augmentations.empty() ? plan.rounds
                                                  : static_cast<int>(plan.augmentations.size());
    if (rounds < 2) throw InvalidInputError("squaring needs at least two rounds");

    std::mt19937_64 rng(plan.seed);
    std::vector<StateSpace> squared;
    squared.reserve(static_cast<std::size_t>(rounds));

    for (int r = 0; r < rounds; ++r) {
        StateSpace sq = sys;
        if (report.shape == SystemShape::Wide) {
            const Index defect = sys.lu() - sys.ly();
            Eigen::MatrixXd extra =
                plan.augmentations.empty()
                    ? random_block(defect, sys.lx(), rms_entry(sys.C), rng)
                    : plan.augmentations[static_cast<std::size_t>(r)];
            if (extra.rows() != defect || extra.cols() != sys.lx()) {
                throw InvalidInputError("output augmentation block has the wrong shape");
            }
            sq.C.conservativeResize(sys.ly() + defect, Eigen::NoChange);
            sq.C.bottomRows(defect) = extra;
            sq.D.conservativeResize(sys.ly() + defect, Eigen::NoChange);
            sq.D.bottomRows(defect).setZero();
        } else {
            const Index defect = sys.ly() - sys.lu();
            Eigen::MatrixXd extra =
                plan.augmentations.empty()
                    ? random_block(sys.lx(), defect, rms_entry(sys.B), rng)
                    : plan.augmentations[static_cast<std::size_t>(r)];
            if (extra.rows() != sys.lx() || extra.cols() != defect) {
                throw InvalidInputError("input augmentation block has the wrong shape");
            }
            sq.B.conservativeResize(Eigen::NoChange, sys.lu() + defect);
            sq.B.rightCols(defect) = extra;
            sq.D.conservativeResize(Eigen::NoChange, sys.lu() + defect);
            sq.D.rightCols(defect).setZero();
        }
        squared.push_back(std::move(sq));
    }
    return squared;
}

ZeroMultiset invariant_zeros_general(const StateSpace& sys, const GeneralOptions& opts) {
    const ValidationReport report = validate(sys);

    if (report.shape == SystemShape::Square) {
        ZeroMultiset zeros;
        try {
            zeros = square_system_zeros(sys, opts);
        } catch (const DecompositionNotApplicableError& e) {
            throw MethodFailureError(std::string(e.what()) +
                                     "; the det-interpolation oracle or the geometric route may "
                                     "still apply");
        }
        if (!zeros.zeros.empty() &&
            std::none_of(zeros.zeros.begin(), zeros.zeros.end(),
                         [](const Zero& z) { return z.verified; })) {
            throw VerificationFailureError(
                "no computed zero drops the pencil rank of the input system");
        }
        return zeros;
    }

    // Nonsquare: square the system several ways and keep the common zeros.
    SquaringPlan plan;
    plan.seed = opts.seed;
    plan.rounds = opts.rounds;
    const std::vector<StateSpace> squared = square_system(sys, plan);

    std::vector<ZeroMultiset> per_round;
    std::string failures;
    for (std::size_t r = 0; r < squared.size(); ++r) {
        try {
            per_round.push_back(square_system_zeros(squared[r], opts));
        } catch (const Error& e) {
            failures += (failures.empty() ? "" : "; ");
            failures += "round " + std::to_string(r) + ": " + e.what();
        }
    }
    if (per_round.size() < 2) {
        throw MethodFailureError(
            "squaring produced fewer than two usable rounds (" + failures +
            "); the pencil verifier or the geometric route may still apply");
    }

    ZeroMultiset common = per_round.front();
    for (std::size_t r = 1; r < per_round.size(); ++r) {
        common = intersect_multisets(common, per_round[r], opts.squaring_match);
    }

    common = verify_zeros(sys, std::move(common), opts.tol);
    const std::size_t candidate_count = common.zeros.size();
    std::erase_if(common.zeros, [](const Zero& z) { return !z.verified; });
    if (candidate_count > 0 && common.zeros.empty()) {
        std::ostringstream os;
        os << "all " << candidate_count
           << " common squaring candidates fail the rank-drop check on the original pencil";
        throw VerificationFailureError(os.str());
    }
    common.method = "squaring+izform";
    return common;
}

}  // namespace zeroform
