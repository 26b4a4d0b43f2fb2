#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "zeroform/document.hpp"
#include "zeroform/extensions.hpp"
#include "zeroform/gazero.hpp"
#include "zeroform/izform.hpp"
#include "zeroform/rosenbrock.hpp"

namespace {

using namespace zeroform;
using nlohmann::json;

constexpr int kExitParse = 2;
constexpr int kExitMethod = 3;
constexpr int kExitVerification = 4;

// Document-level golden comparison; expected values are often quoted at a few
// decimals, so this is looser than the internal multiset matching.
constexpr double kExpectedAbsTol = 5e-3;

struct GlobalFlags {
    std::optional<double> tol_value;
    std::uint64_t seed = kDefaultSeed;
    int rounds = 3;
    std::string method = "auto";
    bool json_output = false;
    bool extend = false;
    std::optional<double> alpha;

    RankTolerance tol() const {
        return tol_value ? RankTolerance(*tol_value) : RankTolerance();
    }
};

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

void print_matrix(std::ostream& os, const std::string& name, const Eigen::MatrixXd& m) {
    const Eigen::IOFormat fmt(Eigen::StreamPrecision, 0, "  ", "\n", "  [", "]");
    os << name << " (" << m.rows() << "x" << m.cols() << "):\n";
    if (m.size() == 0) {
        os << "  (empty)\n";
    } else {
        os << m.format(fmt) << "\n";
    }
}

ZeroMultiset run_method(const StateSpace& sys, const std::string& method,
                        const GlobalFlags& flags) {
    const RankTolerance tol = flags.tol();
    if (method == "izform") {
        return invariant_zeros_izform(sys, tol);
    }
    if (method == "gazero") {
        return verify_zeros(sys, gazero_zeros(sys, tol), tol);
    }
    if (method == "detinterp") {
        return verify_zeros(sys, zeros_by_det_interpolation(sys, tol).zeros, tol);
    }
    if (method == "auto") {
        GeneralOptions opts;
        opts.tol = tol;
        opts.seed = flags.seed;
        opts.rounds = flags.rounds;
        opts.alpha = flags.alpha;
        return invariant_zeros_general(sys, opts);
    }
    throw MethodFailureError("unknown method '" + method + "'");
}

ZeroReport build_report(const StateSpace& sys, const ZeroMultiset& zeros,
                        const SystemDocument& doc, const GlobalFlags& flags, double elapsed_ms) {
    const RankTolerance tol = flags.tol();
    ZeroReport report;
    report.method = zeros.method;
    report.timing_ms = elapsed_ms;
    report.normal_rank = estimate_normal_rank(sys, tol, kNormalRankSamples, flags.seed);

    const RankTolerance drop_tol = tol.floored(1e-8);
    for (const Zero& z : zeros.clustered().zeros) {
        ReportedZero rz;
        rz.re = z.value.real();
        rz.im = z.value.imag();
        rz.multiplicity = z.multiplicity;
        rz.verified = z.verified;
        rz.pencil_rank = evaluate_pencil(sys, z.value, report.normal_rank, drop_tol).chi_rank;
        report.zeros.push_back(rz);
    }

    try {
        const RelativeDegreeProfile rho = relative_degree(sys, tol);
        report.relative_degree = rho.per_output;
        report.relative_degree_total = rho.total;
        if (sys.lu() == sys.ly() && validate(sys).d_is_zero && rho.total <= sys.lx()) {
            report.l_eta = sys.lx() - rho.total;
            report.condition_T = build_transformation(sys, rho, tol).condition_T;
        }
    } catch (const Error&) {
        // relative degree undefined or transformation unavailable: leave blank
    }

    if (doc.expected_zeros) {
        ZeroMultiset expected;
        for (const Complex& z : *doc.expected_zeros) expected.zeros.push_back({z, 1, false});
        report.expected_match =
            multisets_match(zeros, expected, MatchTolerance{kExpectedAbsTol, 1e-6});
    }
    return report;
}

int cmd_zeros(const std::string& path, const GlobalFlags& flags) {
    const SystemDocument doc = load_system_document(path);
    const auto start = std::chrono::steady_clock::now();
    const ZeroMultiset zeros = run_method(doc.system, flags.method, flags);
    const double elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    const ZeroReport report = build_report(doc.system, zeros, doc, flags, elapsed_ms);
    if (flags.json_output) {
        std::cout << serialize_report(report);
    } else {
        std::cout << render_report(report);
    }
    return 0;
}

int cmd_decompose(const std::string& path, const GlobalFlags& flags) {
    const SystemDocument doc = load_system_document(path);
    StateSpace sys = doc.system;
    if (flags.extend) {
        sys = dynamic_extension(sys, flags.alpha ? *flags.alpha : default_extension_pole(sys))
                  .extended;
    }
    const RankTolerance tol = flags.tol();
    const RelativeDegreeProfile rho = relative_degree(sys, tol);
    const TransformationBundle bundle = build_transformation(sys, rho, tol);
    const InvariantZeroForm form = decompose(sys, bundle, rho, tol);

    if (flags.json_output) {
        json out;
        out["l_eta"] = form.l_eta();
        out["relative_degree"] = rho.per_output;
        out["T"] = matrix_json(bundle.T);
        out["S"] = matrix_json(bundle.S);
        out["A_eta"] = matrix_json(form.A_eta);
        out["A_etaxi"] = matrix_json(form.A_etaxi);
        out["A_xieta"] = matrix_json(form.A_xieta);
        out["A_xi"] = matrix_json(form.A_xi);
        out["B_xi"] = matrix_json(form.B_xi);
        out["C_xi"] = matrix_json(form.C_xi);
        out["condition_T"] = bundle.condition_T;
        out["structural_residual"] = form.residuals.max();
        out["structure_tolerance"] = form.structure_tolerance;
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "l_eta: " << form.l_eta() << ", cond(T): " << bundle.condition_T
                  << ", structural residual: " << form.residuals.max() << " (tolerance "
                  << form.structure_tolerance << ")\n";
        print_matrix(std::cout, "T", bundle.T);
        print_matrix(std::cout, "S = T^-1", bundle.S);
        print_matrix(std::cout, "A_eta", form.A_eta);
        print_matrix(std::cout, "A_etaxi", form.A_etaxi);
        print_matrix(std::cout, "A_xieta", form.A_xieta);
        print_matrix(std::cout, "A_xi", form.A_xi);
        print_matrix(std::cout, "B_xi", form.B_xi);
        print_matrix(std::cout, "C_xi", form.C_xi);
    }
    return 0;
}

int cmd_verify(const std::string& path, const std::vector<std::string>& candidates,
               const GlobalFlags& flags) {
    const SystemDocument doc = load_system_document(path);
    const RankTolerance tol = flags.tol();
    const Index normal_rank =
        estimate_normal_rank(doc.system, tol, kNormalRankSamples, flags.seed);

    std::vector<PencilEvaluation> evals;
    for (const std::string& text : candidates) {
        evals.push_back(evaluate_pencil(doc.system, parse_complex(text), normal_rank, tol));
    }

    if (flags.json_output) {
        json out;
        out["normal_rank"] = normal_rank;
        json list = json::array();
        for (const PencilEvaluation& e : evals) {
            list.push_back(json{{"re", e.point.real()},
                                {"im", e.point.imag()},
                                {"pencil_rank", e.chi_rank},
                                {"drops", e.drops}});
        }
        out["candidates"] = std::move(list);
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "normal rank: " << normal_rank << "\n";
        for (const PencilEvaluation& e : evals) {
            std::cout << "  s = " << format_complex(e.point) << ": rank " << e.chi_rank << " -> "
                      << (e.drops ? "drop" : "no drop") << "\n";
        }
    }
    return 0;
}

int cmd_compare(const std::string& path, const GlobalFlags& flags) {
    const SystemDocument doc = load_system_document(path);
    const std::vector<std::string> methods = {"izform", "gazero", "detinterp", "auto"};

    struct MethodOutcome {
        bool ok = false;
        ZeroMultiset zeros;
        std::string error;
    };
    std::vector<MethodOutcome> outcomes;
    for (const std::string& m : methods) {
        MethodOutcome outcome;
        try {
            outcome.zeros = run_method(doc.system, m, flags);
            outcome.ok = true;
        } catch (const Error& e) {
            outcome.error = e.what();
        }
        outcomes.push_back(std::move(outcome));
    }

    json out;
    json per_method = json::object();
    for (std::size_t i = 0; i < methods.size(); ++i) {
        if (outcomes[i].ok) {
            json zeros = json::array();
            for (const Zero& z : outcomes[i].zeros.clustered().zeros) {
                zeros.push_back(json{{"re", z.value.real()},
                                     {"im", z.value.imag()},
                                     {"multiplicity", z.multiplicity}});
            }
            per_method[methods[i]] = json{{"status", "ok"}, {"zeros", std::move(zeros)}};
        } else {
            per_method[methods[i]] =
                json{{"status", "not applicable"}, {"error", outcomes[i].error}};
        }
    }
    out["methods"] = std::move(per_method);

    json agreements = json::array();
    for (std::size_t i = 0; i < methods.size(); ++i) {
        for (std::size_t j = i + 1; j < methods.size(); ++j) {
            if (!outcomes[i].ok || !outcomes[j].ok) continue;
            const bool match = multisets_match(outcomes[i].zeros, outcomes[j].zeros);
            agreements.push_back(json{{"a", methods[i]}, {"b", methods[j]}, {"match", match}});
        }
    }
    out["agreement"] = std::move(agreements);

    if (flags.json_output) {
        std::cout << out.dump(2) << "\n";
    } else {
        for (std::size_t i = 0; i < methods.size(); ++i) {
            std::cout << methods[i] << ": ";
            if (outcomes[i].ok) {
                bool first = true;
                for (const Zero& z : outcomes[i].zeros.clustered().zeros) {
                    for (int k = 0; k < z.multiplicity; ++k) {
                        std::cout << (first ? "" : ", ") << format_complex(z.value);
                        first = false;
                    }
                }
                if (first) std::cout << "(none)";
                std::cout << "\n";
            } else {
                std::cout << "not applicable: " << outcomes[i].error << "\n";
            }
        }
        for (const json& a : out["agreement"]) {
            std::cout << a["a"].get<std::string>() << " vs " << a["b"].get<std::string>() << ": "
                      << (a["match"].get<bool>() ? "match" : "MISMATCH") << "\n";
        }
    }

    const bool any_ok =
        std::any_of(outcomes.begin(), outcomes.end(), [](const MethodOutcome& o) { return o.ok; });
    return any_ok ? 0 : kExitMethod;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"invariant zeros of MIMO state-space systems via the invariant zero form"};
    app.require_subcommand(1);

    GlobalFlags flags;
    double tol_arg = 0.0;
    auto* tol_opt = app.add_option("--tol", tol_arg, "relative rank threshold override");
    app.add_option("--seed", flags.seed, "seed for all randomized procedures");
    app.add_option("--rounds", flags.rounds, "squaring rounds for nonsquare systems");
    double alpha_arg = 0.0;
    auto* alpha_opt =
        app.add_option("--alpha", alpha_arg, "extension pole (default: 1 + spectral radius)");
    auto* json_flag = app.add_flag("--json", "machine-readable output");
    app.add_flag("--pretty", "human-readable output (default)");
    app.fallthrough();

    auto* zeros_cmd = app.add_subcommand("zeros", "compute invariant zeros");
    std::string zeros_path;
    zeros_cmd->add_option("input", zeros_path, "system document path, or - for stdin")
        ->required();
    zeros_cmd->add_option("--method", flags.method, "izform|gazero|detinterp|auto")
        ->check(CLI::IsMember({"izform", "gazero", "detinterp", "auto"}));

    auto* decompose_cmd = app.add_subcommand("decompose", "emit the full invariant zero form");
    std::string decompose_path;
    decompose_cmd->add_option("input", decompose_path, "system document path, or - for stdin")
        ->required();
    decompose_cmd->add_flag("--extend", flags.extend,
                            "apply a dynamic extension before decomposing");

    auto* verify_cmd = app.add_subcommand("verify", "pencil rank-drop check of candidate zeros");
    std::string verify_path;
    std::vector<std::string> verify_candidates;
    verify_cmd->add_option("input", verify_path, "system document path, or - for stdin")
        ->required();
    verify_cmd->add_option("-z,--zeros", verify_candidates,
                           "candidate zeros, e.g. -1 0 3+2i (repeatable)");

    auto* compare_cmd = app.add_subcommand("compare", "run all applicable methods and compare");
    std::string compare_path;
    compare_cmd->add_option("input", compare_path, "system document path, or - for stdin")
        ->required();

    CLI11_PARSE(app, argc, argv);

    if (*tol_opt) flags.tol_value = tol_arg;
    if (*alpha_opt) flags.alpha = alpha_arg;
    flags.json_output = json_flag->count() > 0;

    try {
        if (*zeros_cmd) return cmd_zeros(zeros_path, flags);
        if (*decompose_cmd) return cmd_decompose(decompose_path, flags);
        if (*verify_cmd) return cmd_verify(verify_path, verify_candidates, flags);
        if (*compare_cmd) return cmd_compare(compare_path, flags);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const VerificationFailureError& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return kExitVerification;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMethod;
    }
    return 0;
}
