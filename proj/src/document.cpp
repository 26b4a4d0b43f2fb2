#include "zeroform/document.hpp"

#include <fstream>
#include <iostream>
#include <iterator>
#include <regex>
#include <sstream>

#include <json.hpp>

namespace zeroform {

namespace {

using nlohmann::json;

Eigen::MatrixXd matrix_from_json(const json& node, const std::string& key) {
    if (!node.is_array() || node.empty()) {
        throw ParseError("field '" + key + "' must be a non-empty array of rows");
    }
    const std::size_t rows = node.size();
    if (!node[0].is_array() || node[0].empty()) {
        throw ParseError("field '" + key + "' rows must be non-empty arrays");
    }
    const std::size_t cols = node[0].size();
    Eigen::MatrixXd m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (!node[i].is_array() || node[i].size() != cols) {
            std::ostringstream os;
            os << "field '" << key << "' row " << i << " has " << node[i].size()
               << " entries, expected " << cols;
            throw ParseError(os.str());
        }
        for (std::size_t j = 0; j < cols; ++j) {
            if (!node[i][j].is_number()) {
                std::ostringstream os;
                os << "field '" << key << "' entry (" << i << "," << j << ") is not a number";
                throw ParseError(os.str());
            }
            m(static_cast<Index>(i), static_cast<Index>(j)) = node[i][j].get<double>();
        }
    }
    return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Complex complex_from_json(const json& node) {
    if (node.is_number()) return Complex(node.get<double>(), 0.0);
    if (node.is_object()) {
        const double re = node.value("re", 0.0);
        const double im = node.value("im", 0.0);
        return Complex(re, im);
    }
    throw ParseError("complex values must be numbers or {\"re\": x, \"im\": y} objects");
}

json complex_to_json(const Complex& z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

SystemDocument parse_system_document(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("document root must be an object");
    for (const char* key : {"A", "B", "C"}) {
        if (!doc.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    }

    SystemDocument out;
    out.system.A = matrix_from_json(doc["A"], "A");
    out.system.B = matrix_from_json(doc["B"], "B");
    out.system.C = matrix_from_json(doc["C"], "C");
    if (doc.contains("D")) {
        out.system.D = matrix_from_json(doc["D"], "D");
    } else {
        out.system.D = Eigen::MatrixXd::Zero(out.system.C.rows(), out.system.B.cols());
    }
    out.name = doc.value("name", "");
    if (doc.contains("expected_zeros")) {
        if (!doc["expected_zeros"].is_array()) {
            throw ParseError("field 'expected_zeros' must be an array");
        }
        std::vector<Complex> expected;
        for (const json& entry : doc["expected_zeros"]) expected.push_back(complex_from_json(entry));
        out.expected_zeros = std::move(expected);
    }
    try {
        validate(out.system);
    } catch (const InvalidInputError& e) {
        throw ParseError(std::string("inconsistent system: ") + e.what());
    }
    return out;
}

SystemDocument load_system_document(const std::string& path) {
    std::string text;
    if (path == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    } else {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open '" + path + "'");
        text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return parse_system_document(text);
}

std::string serialize_system_document(const SystemDocument& doc) {
    json out;
    if (!doc.name.empty()) out["name"] = doc.name;
    out["A"] = matrix_to_json(doc.system.A);
    out["B"] = matrix_to_json(doc.system.B);
    out["C"] = matrix_to_json(doc.system.C);
    out["D"] = matrix_to_json(doc.system.D);
    if (doc.expected_zeros) {
        json zeros = json::array();
        for (const Complex& z : *doc.expected_zeros) zeros.push_back(complex_to_json(z));
        out["expected_zeros"] = std::move(zeros);
    }
    return out.dump(2) + "\n";
}

std::string serialize_report(const ZeroReport& report) {
    json out;
    out["method"] = report.method;
    json zeros = json::array();
    for (const ReportedZero& z : report.zeros) {
        zeros.push_back(json{{"re", z.re},
                             {"im", z.im},
                             {"multiplicity", z.multiplicity},
                             {"verified", z.verified},
                             {"pencil_rank", z.pencil_rank}});
    }
    out["zeros"] = std::move(zeros);
    out["relative_degree"] = report.relative_degree;
    out["relative_degree_total"] = report.relative_degree_total;
    if (report.l_eta) out["l_eta"] = *report.l_eta;
    if (report.condition_T) out["condition_T"] = *report.condition_T;
    out["normal_rank"] = report.normal_rank;
    out["timing_ms"] = report.timing_ms;
    if (report.expected_match) out["expected_match"] = *report.expected_match;
    return out.dump(2) + "\n";
}

ZeroReport parse_report(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid report JSON: ") + e.what());
    }
    ZeroReport report;
    report.method = doc.value("method", "");
    for (const json& z : doc.value("zeros", json::array())) {
        ReportedZero rz;
        rz.re = z.value("re", 0.0);
        rz.im = z.value("im", 0.0);
        rz.multiplicity = z.value("multiplicity", 1);
        rz.verified = z.value("verified", false);
        rz.pencil_rank = z.value("pencil_rank", Index{0});
        report.zeros.push_back(rz);
    }
    report.relative_degree = doc.value("relative_degree", std::vector<int>{});
    report.relative_degree_total = doc.value("relative_degree_total", 0);
    if (doc.contains("l_eta")) report.l_eta = doc["l_eta"].get<Index>();
    if (doc.contains("condition_T")) report.condition_T = doc["condition_T"].get<double>();
    report.normal_rank = doc.value("normal_rank", Index{0});
    report.timing_ms = doc.value("timing_ms", 0.0);
    if (doc.contains("expected_match")) report.expected_match = doc["expected_match"].get<bool>();
    return report;
}

std::string render_report(const ZeroReport& report) {
    std::ostringstream os;
    os << "method: " << report.method << "\n";
    os << "zeros (" << report.zeros.size() << "):\n";
    for (const ReportedZero& z : report.zeros) {
        os << "  " << format_complex(Complex(z.re, z.im));
        if (z.multiplicity > 1) os << " (x" << z.multiplicity << ")";
        os << "  [" << (z.verified ? "verified" : "unverified") << ", pencil rank "
           << z.pencil_rank << "]\n";
    }
    os << "relative degree:";
    for (int r : report.relative_degree) os << " " << r;
    os << " (total " << report.relative_degree_total << ")\n";
    if (report.l_eta) os << "l_eta: " << *report.l_eta << "\n";
    if (report.condition_T) os << "cond(T): " << *report.condition_T << "\n";
    os << "normal rank: " << report.normal_rank << "\n";
    if (report.expected_match) {
        os << "expected zeros: " << (*report.expected_match ? "match" : "MISMATCH") << "\n";
    }
    os << "time: " << report.timing_ms << " ms\n";
    return os.str();
}

std::string format_complex(const Complex& z) {
    std::ostringstream os;
    os.precision(12);
    if (z.imag() == 0.0) {
        os << z.real();
    } else {
        os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    }
    return os.str();
}

Complex parse_complex(const std::string& text) {
    static const std::regex full(
        R"(^\s*([+-]?[0-9.eE+-]*?)\s*(?:([+-])\s*([0-9.eE]*)\s*[ij])?\s*$)");
    static const std::regex pure_imag(R"(^\s*([+-]?[0-9.eE]*)\s*[ij]\s*$)");

    std::smatch m;
    if (std::regex_match(text, m, pure_imag)) {
        const std::string num = m[1].str();
        if (num.empty() || num == "+") return Complex(0.0, 1.0);
        if (num == "-") return Complex(0.0, -1.0);
        return Complex(0.0, std::stod(num));
    }
    if (std::regex_match(text, m, full)) {
        try {
            const double re = m[1].str().empty() ? 0.0 : std::stod(m[1].str());
            if (!m[2].matched) return Complex(re, 0.0);
            const std::string imag = m[3].str();
            double im = imag.empty() ? 1.0 : std::stod(imag);
            if (m[2].str() == "-") im = -im;
            return Complex(re, im);
        } catch (const std::exception&) {
            // fall through to the error below
        }
    }
    throw ParseError("cannot parse complex number '" + text + "'");
}

}  // namespace zeroform
