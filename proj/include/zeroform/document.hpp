#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zeroform/state_space.hpp"

namespace zeroform {

/// A system read from (or written to) a JSON document. D may be omitted in
/// the document and is then taken as zero.
struct SystemDocument {
    StateSpace system;
    std::string name;
    std::optional<std::vector<Complex>> expected_zeros;
};

/// Parses a document from JSON text. Throws ParseError with field context.
SystemDocument parse_system_document(const std::string& text);

/// Reads from a file path, or from standard input when the path is "-".
SystemDocument load_system_document(const std::string& path);

/// Canonical writer; parse(serialize(doc)) reproduces the matrices bit for bit.
std::string serialize_system_document(const SystemDocument& doc);

struct ReportedZero {
    double re = 0.0;
    double im = 0.0;
    int multiplicity = 1;
    bool verified = false;
    Index pencil_rank = 0;
};

/// Machine-readable result of a zero computation.
struct ZeroReport {
    std::string method;
    std::vector<ReportedZero> zeros;
    std::vector<int> relative_degree;
    int relative_degree_total = 0;
    std::optional<Index> l_eta;
    std::optional<double> condition_T;
    Index normal_rank = 0;
    double timing_ms = 0.0;
    std::optional<bool> expected_match;
};

std::string serialize_report(const ZeroReport& report);
ZeroReport parse_report(const std::string& text);

/// Human-readable rendering of the same report.
std::string render_report(const ZeroReport& report);

/// Formats one complex number the way the CLI accepts it ("a", "a+bi", "a-bi").
std::string format_complex(const Complex& z);

/// Parses "a", "a+bi", "a-bi", "bi", "i". Throws ParseError on junk.
Complex parse_complex(const std::string& text);

}  // namespace zeroform
