#include "atml/validator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>

namespace atml {

namespace {

void add(std::vector<Violation>& out, std::string rule, Severity severity, std::string path,
         std::string message) {
    out.push_back({std::move(rule), severity, std::move(path), std::move(message)});
}

bool requirement_needs_dataset(TestKind kind) {
    return kind == TestKind::CrossValidation || kind == TestKind::Adversarial ||
           kind == TestKind::Drift;
}

std::optional<double> numeric_value(const RequirementValue& value) {
    if (const auto* d = std::get_if<double>(&value)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
    return std::nullopt;
}

void check_limits_in(const std::vector<TestRequirement>& requirements, const std::string& path,
                     std::vector<Violation>& out) {
    for (std::size_t i = 0; i < requirements.size(); ++i) {
        const auto* limit = std::get_if<NumericLimit>(&requirements[i].value);
        if (!limit) continue;
        const std::string rpath =
            path + "/TestRequirement[" + std::to_string(i + 1) + "]/TestLimit";
        if (!std::isfinite(limit->low) || !std::isfinite(limit->high)) {
            add(out, "R-LIMIT-ORDER", Severity::Error, rpath, "limit bounds must be finite");
        } else if (limit->low > limit->high) {
            add(out, "R-LIMIT-ORDER", Severity::Error, rpath,
                "Low " + format_real(limit->low) + " exceeds High " + format_real(limit->high));
        }
    }
}

/// Parses a 1-based feature index out of "Mean_<j>" / "Variance_<j>" names.
std::optional<std::size_t> indexed_property(const PropertyEntry& prop, std::string_view prefix) {
    if (!prop.name.starts_with(prefix)) return std::nullopt;
    std::string_view tail(prop.name);
    tail.remove_prefix(prefix.size());
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), index);
    if (ec != std::errc{} || ptr != tail.data() + tail.size() || index == 0) return std::nullopt;
    return index;
}

void validate_test_case(const TestCase& test, const std::string& path,
                        std::vector<Violation>& out) {
    check_limits_in(test.requirements, path, out);
    for (std::size_t i = 0; i < test.expected_results.size(); ++i) {
        const NumericLimit& limit = test.expected_results[i].limit;
        const std::string rpath =
            path + "/NumericLimitTestResult[" + std::to_string(i + 1) + "]/TestLimit";
        if (!std::isfinite(limit.low) || !std::isfinite(limit.high)) {
            add(out, "R-LIMIT-ORDER", Severity::Error, rpath, "limit bounds must be finite");
        } else if (limit.low > limit.high) {
            add(out, "R-LIMIT-ORDER", Severity::Error, rpath,
                "Low " + format_real(limit.low) + " exceeds High " + format_real(limit.high));
        }
    }
    if (test.sequence) {
        for (std::size_t i = 0; i < test.sequence->size(); ++i) {
            check_limits_in((*test.sequence)[i].requirements,
                            path + "/Sequence/TestStep[" + std::to_string(i + 1) + "]", out);
        }
    }

    if (requirement_needs_dataset(test.kind) && !test.requirement("Dataset ID")) {
        add(out, "R-DATASET-REF", Severity::Error, path,
            to_string(test.kind) + " test '" + test.unique_id +
                "' must carry a \"Dataset ID\" requirement");
    }

    if (test.kind == TestKind::CrossValidation) {
        const TestRequirement* folds = test.requirement("Folds");
        const std::int64_t* folds_value =
            folds ? std::get_if<std::int64_t>(&folds->value) : nullptr;
        if (!folds) {
            add(out, "R-FOLDS", Severity::Error, path,
                "cross-validation test '" + test.unique_id +
                    "' must carry an integer \"Folds\" requirement");
        } else if (!folds_value || *folds_value < 2) {
            add(out, "R-FOLDS", Severity::Error, path,
                "\"Folds\" must be an integer >= 2");
        }
    }

    if (test.kind == TestKind::Adversarial) {
        std::size_t attacks = 0;
        for (std::size_t i = 0; i < test.requirements.size(); ++i) {
            const TestRequirement& req = test.requirements[i];
            if (req.name != "Epsilon") continue;
            ++attacks;
            std::optional<double> eps = numeric_value(req.value);
            if (!eps || !(*eps > 0.0) || !std::isfinite(*eps)) {
                add(out, "R-EPSILON", Severity::Error,
                    path + "/TestRequirement[" + std::to_string(i + 1) + "]",
                    "\"Epsilon\" must be a finite number > 0");
            }
        }
        if (attacks == 0) {
            add(out, "R-EPSILON", Severity::Error, path,
                "adversarial test '" + test.unique_id +
                    "' must carry an \"Epsilon\" requirement per attack");
        } else if (attacks != test.expected_results.size()) {
            add(out, "R-ATTACK-PAIRING", Severity::Error, path,
                std::to_string(attacks) + " \"Epsilon\" requirement(s) but " +
                    std::to_string(test.expected_results.size()) +
                    " result block(s); counts must match");
        }
    }

    if (test.kind == TestKind::Drift) {
        if (!test.sequence || test.sequence->size() < 2) {
            add(out, "R-DRIFT-STEPS", Severity::Error, path,
                "drift test '" + test.unique_id +
                    "' needs a Sequence with a comparison step and a threshold step");
        }
        bool has_reference_dataset = false;
        std::set<std::size_t> means;
        std::set<std::size_t> variances;
        if (test.requirement("Reference Dataset ID")) has_reference_dataset = true;
        if (test.sequence) {
            for (const TestStep& step : *test.sequence) {
                for (const TestRequirement& req : step.requirements) {
                    if (req.name == "Reference Dataset ID") has_reference_dataset = true;
                }
                for (const PropertyEntry& prop : step.properties) {
                    if (auto j = indexed_property(prop, "Mean_")) means.insert(*j);
                    if (auto j = indexed_property(prop, "Variance_")) variances.insert(*j);
                }
            }
        }
        const bool has_gaussian = !means.empty() && means == variances;
        if (!has_reference_dataset && !has_gaussian) {
            add(out, "R-DRIFT-REF", Severity::Error, path,
                "drift test '" + test.unique_id +
                    "' needs a \"Reference Dataset ID\" requirement or matched "
                    "Mean_<j>/Variance_<j> property pairs");
        }
    }
}

void validate_doc(const TestDescription& doc, std::vector<Violation>& out) {
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < doc.tests.size(); ++i) {
        const TestCase& test = doc.tests[i];
        const std::string path = "TestDescription/TestGroup/Test[" + std::to_string(i + 1) + "]";
        auto [it, inserted] = seen.emplace(test.unique_id, i);
        if (!inserted) {
            add(out, "R-UID-UNIQUE", Severity::Error, path,
                "unique id '" + test.unique_id + "' already used by Test[" +
                    std::to_string(it->second + 1) + "]");
        }
        validate_test_case(test, path, out);
    }
}

void validate_doc(const UutDescriptor&, std::vector<Violation>&) {}

void validate_doc(const EnvironmentDescriptor&, std::vector<Violation>&) {}

void validate_doc(const TestResultsDocument&, std::vector<Violation>&) {}

void validate_doc(const TestProgramSet& tps, std::vector<Violation>& out) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < tps.test_refs.size(); ++i) {
        if (!seen.insert(tps.test_refs[i]).second) {
            add(out, "R-UID-UNIQUE", Severity::Error,
                "TestProgramSet/TestGroup/TestRef[" + std::to_string(i + 1) + "]",
                "duplicate TestRef '" + tps.test_refs[i] + "'");
        }
    }
    for (const Extension& ext : tps.extensions) {
        if (ext.name == "Condition") {
            add(out, "R-TPS-CONDITION", Severity::Warning, "TestProgramSet/TestGroup",
                "conditional execution is not supported; Condition elements are ignored");
        }
    }
}

} // namespace

std::string to_string(Severity s) {
    return s == Severity::Error ? "Error" : "Warning";
}

std::string format_violation(const Violation& v) {
    return to_string(v.severity) + " " + v.rule_id + " " + v.element_path + ": " + v.message;
}

std::vector<Violation> validate(const Document& doc) {
    std::vector<Violation> out;
    std::visit([&](const auto& d) { validate_doc(d, out); }, doc);
    std::stable_sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
        if (a.element_path != b.element_path) return a.element_path < b.element_path;
        return a.rule_id < b.rule_id;
    });
    return out;
}

std::vector<Violation> validate_tps_refs(const TestProgramSet& tps,
                                         std::span<const TestDescription> descriptions) {
    std::vector<Violation> out;
    for (std::size_t i = 0; i < tps.test_refs.size(); ++i) {
        const std::string& ref = tps.test_refs[i];
        std::size_t matches = 0;
        for (const TestDescription& desc : descriptions) {
            if (desc.test_by_id(ref)) ++matches;
        }
        if (matches != 1) {
            add(out, "R-TPS-DANGLING", Severity::Error,
                "TestProgramSet/TestGroup/TestRef[" + std::to_string(i + 1) + "]",
                matches == 0
                    ? "TestRef '" + ref + "' does not resolve to any supplied test description"
                    : "TestRef '" + ref + "' resolves to multiple test descriptions");
        }
    }
    return out;
}

} // namespace atml
