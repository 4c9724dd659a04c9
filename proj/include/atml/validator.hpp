#ifndef ATML_VALIDATOR_HPP
#define ATML_VALIDATOR_HPP

#include "atml/documents.hpp"

#include <span>
#include <string>
#include <vector>

namespace atml {

enum class Severity { Error, Warning };

std::string to_string(Severity s);

struct Violation {
    std::string rule_id;
    Severity severity = Severity::Error;
    std::string element_path;
    std::string message;

    bool operator==(const Violation&) const = default;
};

/// `severity rule_id element_path: message` — stable, golden-tested.
std::string format_violation(const Violation& v);

/// Profile-rule check of a single parsed document. Violations are ordered
/// by element path, then rule id; an empty list means conformant.
std::vector<Violation> validate(const Document& doc);

/// Cross-document check that every TestRef resolves to exactly one test
/// in the supplied description set (rule R-TPS-DANGLING).
std::vector<Violation> validate_tps_refs(const TestProgramSet& tps,
                                         std::span<const TestDescription> descriptions);

} // namespace atml

#endif
