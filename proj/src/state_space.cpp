#include "zeroform/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace zeroform {

namespace {

double pair_distance(const Complex& a, const Complex& b) { return std::abs(a - b); }

// Greedy globally-nearest pairing between two equal-length lists. Returns the
// matched index in `b` for each element of `a`, or -1 where no partner within
// the threshold remains.
std::vector<int> greedy_pairing(const std::vector<Complex>& a, const std::vector<Complex>& b,
                                const MatchTolerance& tol) {
    std::vector<int> match(a.size(), -1);
    std::vector<bool> used(b.size(), false);
    const std::size_t rounds = std::min(a.size(), b.size());
    for (std::size_t round = 0; round < rounds; ++round) {
        double best = std::numeric_limits<double>::infinity();
        int best_i = -1;
        int best_j = -1;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (match[i] >= 0) continue;
            for (std::size_t j = 0; j < b.size(); ++j) {
                if (used[j]) continue;
                const double d = pair_distance(a[i], b[j]);
                if (d > tol.threshold_at(a[i])) continue;
                if (d < best) {
                    best = d;
                    best_i = static_cast<int>(i);
                    best_j = static_cast<int>(j);
                }
            }
        }
        if (best_i < 0) break;  // no admissible pair remains
        match[best_i] = best_j;
        used[best_j] = true;
    }
    return match;
}

void check_matrix(const Eigen::MatrixXd& m, const char* name, Index rows, Index cols) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << "matrix " << name << " has shape " << m.rows() << "x" << m.cols() << ", expected "
           << rows << "x" << cols;
        throw InvalidInputError(os.str());
    }
    detail::require_finite(m, name);
}

Eigen::MatrixXd random_orthogonal(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd g(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) g(i, j) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

// Real block-diagonal matrix with the prescribed (conjugate-closed) spectrum.
Eigen::MatrixXd real_matrix_with_spectrum(const std::vector<Complex>& spectrum,
                                          std::mt19937_64& rng) {
    const Index n = static_cast<Index>(spectrum.size());
    constexpr double kImagTol = 1e-12;

    std::vector<double> reals;
    std::vector<Complex> pairs;  // one representative per conjugate pair
    std::vector<bool> used(spectrum.size(), false);
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        if (used[i]) continue;
        if (std::abs(spectrum[i].imag()) <= kImagTol) {
            reals.push_back(spectrum[i].real());
            continue;
        }
        const Complex conj = std::conj(spectrum[i]);
        bool found = false;
        for (std::size_t j = i + 1; j < spectrum.size(); ++j) {
            if (!used[j] && std::abs(spectrum[j] - conj) <= 1e-9 * (1.0 + std::abs(conj))) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) {
            throw InvalidInputError("planted zeros must be closed under conjugation");
        }
        pairs.push_back(spectrum[i]);
    }

    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n, n);
    Index pos = 0;
    for (double r : reals) block(pos, pos) = r, ++pos;
    for (const Complex& z : pairs) {
        block(pos, pos) = z.real();
        block(pos, pos + 1) = z.imag();
        block(pos + 1, pos) = -z.imag();
        block(pos + 1, pos + 1) = z.real();
        pos += 2;
    }

    if (n == 0) return block;
    const Eigen::MatrixXd q = random_orthogonal(n, rng);
    return q * block * q.transpose();
}

}  // namespace

StateSpace StateSpace::strictly_proper(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C) {
    StateSpace sys;
    sys.D = Eigen::MatrixXd::Zero(C.rows(), B.cols());
    sys.A = std::move(A);
    sys.B = std::move(B);
    sys.C = std::move(C);
    return sys;
}

ValidationReport validate(const StateSpace& sys) {
    const Index lx = sys.A.rows();
    const Index lu = sys.B.cols();
    const Index ly = sys.C.rows();
    if (lx < 1 || lu < 1 || ly < 1) {
        throw InvalidInputError("system requires at least one state, input, and output");
    }
    check_matrix(sys.A, "A", lx, lx);
    check_matrix(sys.B, "B", lx, lu);
    check_matrix(sys.C, "C", ly, lx);
    check_matrix(sys.D, "D", ly, lu);

    ValidationReport report;
    report.d_is_zero = sys.D.isZero(0.0);
    report.shape = lu == ly ? SystemShape::Square
                            : (ly > lu ? SystemShape::Tall : SystemShape::Wide);
    return report;
}

bool RelativeDegreeProfile::all_positive() const {
    return std::all_of(per_output.begin(), per_output.end(), [](int r) { return r > 0; });
}

RelativeDegreeProfile relative_degree(const StateSpace& sys, const RankTolerance& tol) {
    validate(sys);
    const Index lx = sys.lx();
    const Index ly = sys.ly();
    const double rel = tol.relative_threshold(lx, lx);
    const double norm_A = sys.A.norm();
    const double norm_B = sys.B.norm();
    const double norm_D = sys.D.norm();

    RelativeDegreeProfile profile;
    profile.per_output.resize(ly, 0);
    for (Index i = 0; i < ly; ++i) {
        if (sys.D.row(i).norm() > rel * norm_D) {
            profile.per_output[i] = 0;
            continue;
        }
        Eigen::RowVectorXd row = sys.C.row(i);  // C_i A^(k-1)
        double scale = sys.C.row(i).norm() * norm_B;
        bool found = false;
        for (Index k = 1; k <= lx; ++k) {
            // Nonzero test against the accumulated product scale, so badly
            // scaled systems do not defeat a raw epsilon comparison.
            if ((row * sys.B).norm() > rel * scale) {
                profile.per_output[i] = static_cast<int>(k);
                found = true;
                break;
            }
            row = row * sys.A;
            scale *= norm_A;
        }
        if (!found) {
            std::ostringstream os;
            os << "output " << i << " never sees any input: relative degree undefined";
            throw UndefinedRelativeDegreeError(os.str(), static_cast<int>(i));
        }
    }
    profile.total = 0;
    for (int r : profile.per_output) profile.total += r;
    return profile;
}

StateSpace similarity_transform(const StateSpace& sys, const Eigen::MatrixXd& P,
                                const RankTolerance& tol) {
    validate(sys);
    if (P.rows() != sys.lx() || P.cols() != sys.lx()) {
        throw InvalidInputError("similarity transform must be l_x x l_x");
    }
    const Eigen::MatrixXd P_inv = solve_or_invert(P, tol).inverse;
    StateSpace out;
    out.A = P * sys.A * P_inv;
    out.B = P * sys.B;
    out.C = sys.C * P_inv;
    out.D = sys.D;
    return out;
}

Index ZeroMultiset::count() const {
    Index n = 0;
    for (const Zero& z : zeros) n += z.multiplicity;
    return n;
}

std::vector<Complex> ZeroMultiset::flat() const {
    std::vector<Complex> values;
    values.reserve(static_cast<std::size_t>(count()));
    for (const Zero& z : zeros) {
        for (int k = 0; k < z.multiplicity; ++k) values.push_back(z.value);
    }
    return values;
}

bool ZeroMultiset::all_verified() const {
    return std::all_of(zeros.begin(), zeros.end(), [](const Zero& z) { return z.verified; });
}

ZeroMultiset ZeroMultiset::clustered(double abs_tol, double rel_tol) const {
    std::vector<Zero> expanded;
    for (const Zero& z : zeros) {
        for (int k = 0; k < z.multiplicity; ++k) expanded.push_back({z.value, 1, z.verified});
    }
    std::sort(expanded.begin(), expanded.end(), [](const Zero& a, const Zero& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    ZeroMultiset out;
    out.method = method;
    for (const Zero& z : expanded) {
        if (!out.zeros.empty()) {
            Zero& last = out.zeros.back();
            const double thr = abs_tol + rel_tol * std::abs(last.value);
            if (std::abs(last.value - z.value) <= thr) {
                last.multiplicity += 1;
                last.verified = last.verified && z.verified;
                continue;
            }
        }
        out.zeros.push_back(z);
    }
    return out;
}

bool multisets_match(const ZeroMultiset& a, const ZeroMultiset& b, const MatchTolerance& tol) {
    const std::vector<Complex> fa = a.flat();
    const std::vector<Complex> fb = b.flat();
    if (fa.size() != fb.size()) return false;
    const std::vector<int> match = greedy_pairing(fa, fb, tol);
    return std::all_of(match.begin(), match.end(), [](int j) { return j >= 0; });
}

ZeroMultiset intersect_multisets(const ZeroMultiset& a, const ZeroMultiset& b,
                                 const MatchTolerance& tol) {
    const std::vector<Complex> fa = a.flat();
    const std::vector<Complex> fb = b.flat();
    const std::vector<int> match = greedy_pairing(fa, fb, tol);
    ZeroMultiset out;
    out.method = a.method;
    for (std::size_t i = 0; i < fa.size(); ++i) {
        if (match[i] >= 0) out.zeros.push_back({fa[i], 1, false});
    }
    return out;
}

bool conjugate_closed(const ZeroMultiset& zs, const MatchTolerance& tol) {
    std::vector<Complex> values = zs.flat();
    std::vector<bool> used(values.size(), false);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (used[i]) continue;
        if (std::abs(values[i].imag()) <= tol.threshold_at(values[i])) continue;
        const Complex conj = std::conj(values[i]);
        bool found = false;
        for (std::size_t j = i + 1; j < values.size(); ++j) {
            if (!used[j] && std::abs(values[j] - conj) <= tol.threshold_at(conj)) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

PlantedSystem random_system(const SystemDims& dims, std::uint64_t seed,
                            const std::vector<Complex>& planted_zeros) {
    if (dims.lx < 1 || dims.lu < 1 || dims.ly < 1) {
        throw InvalidInputError("random_system: dimensions must be positive");
    }
    if (dims.lu != dims.ly) {
        throw InvalidInputError("random_system: planting requires a square system");
    }
    std::vector<int> rho = dims.rho;
    if (rho.empty()) rho.assign(static_cast<std::size_t>(dims.ly), 1);
    if (static_cast<Index>(rho.size()) != dims.ly) {
        throw InvalidInputError("random_system: one relative degree per output required");
    }
    Index total_rho = 0;
    for (int r : rho) {
        if (r < 1) throw InvalidInputError("random_system: relative degrees must be >= 1");
        total_rho += r;
    }
    if (total_rho > dims.lx) {
        throw InvalidInputError("random_system: sum of relative degrees exceeds the state count");
    }
    const Index l_eta = dims.lx - total_rho;
    if (static_cast<Index>(planted_zeros.size()) > l_eta) {
        throw InvalidInputError("random_system: cannot plant more zeros than l_x - rho");
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(-3.0, 3.0);

    std::vector<Complex> spectrum = planted_zeros;
    while (static_cast<Index>(spectrum.size()) < l_eta) spectrum.emplace_back(uniform(rng), 0.0);

    const Index ly = dims.ly;
    const Index lu = dims.lu;
    const Index lx = dims.lx;

    const Eigen::MatrixXd a_eta = real_matrix_with_spectrum(spectrum, rng);

    auto random_row = [&](Index n) {
        Eigen::RowVectorXd row(n);
        for (Index i = 0; i < n; ++i) row(i) = normal(rng);
        return row;
    };

    Eigen::MatrixXd a_etaxi(l_eta, total_rho);
    for (Index i = 0; i < l_eta; ++i) a_etaxi.row(i) = random_row(total_rho);

    Eigen::MatrixXd a_xieta = Eigen::MatrixXd::Zero(total_rho, l_eta);
    Eigen::MatrixXd a_xi = Eigen::MatrixXd::Zero(total_rho, total_rho);
    Eigen::MatrixXd b_xi = Eigen::MatrixXd::Zero(total_rho, lu);
    Eigen::MatrixXd c_xi = Eigen::MatrixXd::Zero(ly, total_rho);

    // High-frequency gain rows C_i A^(rho_i - 1) B; redrawn until well conditioned
    // so the constructed B_xi has full column rank.
    Eigen::MatrixXd gamma(ly, lu);
    for (int attempt = 0; attempt < 64; ++attempt) {
        for (Index i = 0; i < ly; ++i) gamma.row(i) = random_row(lu);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(gamma);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) > 1e-3 * sv(0)) break;
    }

    Index offset = 0;
    for (Index i = 0; i < ly; ++i) {
        const Index ri = rho[static_cast<std::size_t>(i)];
        for (Index k = 0; k + 1 < ri; ++k) {
            a_xi(offset + k, offset + k + 1) = 1.0;  // chain: xi_{i,k}' = xi_{i,k+1}
        }
        if (l_eta > 0) a_xieta.row(offset + ri - 1) = random_row(l_eta);
        a_xi.row(offset + ri - 1) = random_row(total_rho);
        b_xi.row(offset + ri - 1) = gamma.row(i);
        c_xi(i, offset) = 1.0;
        offset += ri;
    }

    Eigen::MatrixXd a_form(lx, lx);
    a_form << a_eta, a_etaxi, a_xieta, a_xi;
    Eigen::MatrixXd b_form = Eigen::MatrixXd::Zero(lx, lu);
    b_form.bottomRows(total_rho) = b_xi;
    Eigen::MatrixXd c_form = Eigen::MatrixXd::Zero(ly, lx);
    c_form.rightCols(total_rho) = c_xi;

    const Eigen::MatrixXd p = random_similarity(lx, rng());
    StateSpace formed = StateSpace::strictly_proper(a_form, b_form, c_form);

    PlantedSystem out;
    out.sys = similarity_transform(formed, p);
    out.zeros.method = "planted";
    for (const Complex& z : spectrum) out.zeros.zeros.push_back({z, 1, false});
    return out;
}

StateSpace random_dense_system(Index lx, Index lu, Index ly, std::uint64_t seed) {
    if (lx < 1 || lu < 1 || ly < 1) {
        throw InvalidInputError("random_dense_system: dimensions must be positive");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double state_scale = 1.0 / std::sqrt(static_cast<double>(lx));
    Eigen::MatrixXd A(lx, lx), B(lx, lu), C(ly, lx);
    for (Index i = 0; i < lx; ++i)
        for (Index j = 0; j < lx; ++j) A(i, j) = normal(rng) * state_scale;
    for (Index i = 0; i < lx; ++i)
        for (Index j = 0; j < lu; ++j) B(i, j) = normal(rng);
    for (Index i = 0; i < ly; ++i)
        for (Index j = 0; j < lx; ++j) C(i, j) = normal(rng);
    return StateSpace::strictly_proper(std::move(A), std::move(B), std::move(C));
}

Eigen::MatrixXd random_similarity(Index n, std::uint64_t seed, double cond) {
    if (cond < 1.0) throw InvalidInputError("random_similarity: condition bound must be >= 1");
    std::mt19937_64 rng(seed);
    const Eigen::MatrixXd q1 = random_orthogonal(n, rng);
    const Eigen::MatrixXd q2 = random_orthogonal(n, rng);
    Eigen::VectorXd scales(n);
    for (Index i = 0; i < n; ++i) {
        const double t = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
        scales(i) = std::pow(cond, t);  // logarithmic sweep from 1 to cond
    }
    return q1 * scales.asDiagonal() * q2;
}

}  // namespace zeroform
