#ifndef ATML_DOCUMENTS_HPP
#define ATML_DOCUMENTS_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace atml {

/// Profile identifier written into the xmlns attribute of every root element.
inline constexpr const char* kProfileId = "atml-ml/1";

enum class Status { NotTested, Passed, Failed, Error };

enum class TestKind { CrossValidation, Adversarial, Drift, Generic };

enum class EnvironmentKind { Station, Adapter };

enum class PreprocessingStep { None, Standardize, MinMax };

std::string to_string(Status s);
std::string to_string(TestKind k);
std::string to_string(PreprocessingStep s);

/// Inclusive [low, high] interval a measured value must fall within.
struct NumericLimit {
    double low = 0.0;
    double high = 0.0;
    std::optional<std::string> unit;

    bool operator==(const NumericLimit&) const = default;
};

/// Passed iff low <= value <= high, bounds inclusive.
Status evaluate_limit(double value, const NumericLimit& limit);

/// Unrecognized element kept verbatim (name plus flattened text).
struct Extension {
    std::string name;
    std::string text;

    bool operator==(const Extension&) const = default;
};

/// Requirement values are discriminated by child element name:
/// TestLimit -> NumericLimit, Value -> real or integer, DatasetRef -> identifier.
using RequirementValue = std::variant<NumericLimit, double, std::int64_t, std::string>;

struct TestRequirement {
    std::string name;
    RequirementValue value;

    bool operator==(const TestRequirement&) const = default;
};

struct PropertyEntry {
    std::string name;
    std::variant<double, std::string> value;

    bool operator==(const PropertyEntry&) const = default;
};

struct TestStep {
    std::string step_id;
    std::string description;
    std::vector<TestRequirement> requirements;
    std::vector<PropertyEntry> properties;
    std::vector<Extension> extensions;

    bool operator==(const TestStep&) const = default;
};

struct ExpectedResult {
    std::string result_name;
    NumericLimit limit;

    bool operator==(const ExpectedResult&) const = default;
};

struct TestCase {
    std::string name;
    TestKind kind = TestKind::Generic;
    std::string unique_id;
    std::vector<TestRequirement> requirements;
    std::optional<std::vector<TestStep>> sequence;
    std::vector<ExpectedResult> expected_results;
    std::vector<Extension> extensions;

    const TestRequirement* requirement(std::string_view req_name) const;
    bool operator==(const TestCase&) const = default;
};

struct TestDescription {
    std::string group_name;
    std::vector<TestCase> tests;
    std::vector<Extension> extensions;

    const TestCase* test_by_id(std::string_view unique_id) const;
    bool operator==(const TestDescription&) const = default;
};

struct UutDescriptor {
    std::string uut_type;
    std::string uut_identifier;
    std::string uut_description;
    std::vector<PropertyEntry> characteristics;
    std::vector<Extension> extensions;

    bool operator==(const UutDescriptor&) const = default;
};

struct SoftwareItem {
    std::string name;
    std::string version;

    bool operator==(const SoftwareItem&) const = default;
};

struct HardwareItem {
    std::string name;
    std::string details;

    bool operator==(const HardwareItem&) const = default;
};

/// Covers both TestStation and TestAdapter documents; kind discriminates.
struct EnvironmentDescriptor {
    EnvironmentKind kind = EnvironmentKind::Station;
    std::string name;
    std::vector<SoftwareItem> software;
    std::vector<HardwareItem> hardware;
    std::vector<PreprocessingStep> preprocessing; // Adapter only
    std::vector<Extension> extensions;

    bool operator==(const EnvironmentDescriptor&) const = default;
};

/// UTC instant with seconds precision. Comparison uses the instant.
struct UtcTimestamp {
    std::int64_t epoch_seconds = 0;

    std::string iso8601() const;
    static UtcTimestamp from_iso8601(const std::string& text);
    static UtcTimestamp now();

    auto operator<=>(const UtcTimestamp&) const = default;
};

struct MeasuredValue {
    std::string result_name;
    double value = 0.0;

    bool operator==(const MeasuredValue&) const = default;
};

struct TestResultEntry {
    std::string unique_id;
    Status status = Status::NotTested;
    UtcTimestamp timestamp;
    std::vector<MeasuredValue> measured;
    std::optional<std::string> diagnostic;
    std::vector<Extension> extensions;

    bool operator==(const TestResultEntry&) const = default;
};

struct RunEnvironment {
    std::optional<EnvironmentDescriptor> station;
    std::optional<EnvironmentDescriptor> adapter;

    bool operator==(const RunEnvironment&) const = default;
};

struct TestResultsDocument {
    std::vector<TestResultEntry> entries;
    std::optional<RunEnvironment> environment;
    std::vector<Extension> extensions;

    bool operator==(const TestResultsDocument&) const = default;
};

struct TestProgramSet {
    std::string group_name;
    std::vector<std::string> test_refs;
    std::vector<Extension> extensions;

    bool operator==(const TestProgramSet&) const = default;
};

/// The six document kinds of the profile. TestStation and TestAdapter
/// share EnvironmentDescriptor.
using Document = std::variant<TestDescription, UutDescriptor, EnvironmentDescriptor,
                              TestResultsDocument, TestProgramSet>;

/// Recognized element with the wrong content model (e.g. a non-numeric Low).
class StructuralError : public std::runtime_error {
public:
    StructuralError(std::string message, std::string element_path);

    const std::string& element_path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Serialization refused because a type invariant does not hold.
class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses one profile document; the root element name selects the kind.
Document parse_document(std::string_view xml_text);

/// Serializes a document; refuses documents violating their type invariants.
std::string serialize_document(const Document& doc);

/// Shortest decimal text that reparses to exactly the same double.
std::string format_real(double value);

} // namespace atml

#endif
