#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prmrl/prm.hpp"

namespace prmrl {

struct SourceDocument {
    std::string text;
    std::string origin = "<inline>";

    static SourceDocument from_file(const std::string& path);
    static SourceDocument inline_text(std::string text) { return {std::move(text), "<inline>"}; }
};

struct Diagnostic {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    std::string message;
    int line = 1;
    int column = 1;

    std::string str() const;
};

struct ParseResult {
    std::optional<PrmDefinition> machine;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return machine.has_value(); }
};

// Parses the line-oriented .prm language. Either a fully valid machine or
// error diagnostics come back, never both halves of one.
ParseResult parse_prm(const SourceDocument& doc);

struct ValidateOptions {
    int psi_samples_per_dim = 8;
    std::vector<double> k_samples = {0.0, 1.0, 3.0, 7.0, 12.0, 50.0, 1000.0};
};

// Semantic checks on a parsed machine: guard determinism/totality over all
// labels crossed with a psi sample grid, initial state not terminal, finite
// rewards. Empty result means valid. The grid sweep is a practical check,
// not a proof, since exhaustiveness over continuous psi is undecidable.
std::vector<Diagnostic> validate_prm(const PrmDefinition& prm, const ValidateOptions& opts = {});

// Canonical text form; parse_prm(serialize_prm(p)) is structurally equal to
// p, and re-serializing is byte-stable.
std::string serialize_prm(const PrmDefinition& prm);

// Convenience: parse + validate a file, throwing ConfigError with collected
// diagnostics on any failure.
PrmDefinition load_prm_file(const std::string& path);

}  // namespace prmrl
