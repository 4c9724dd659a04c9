#include "atml/documents.hpp"
#include "atml/xml.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <set>
#include <utility>

namespace atml {

namespace {

using xml::Node;

[[noreturn]] void structural(const std::string& message, const std::string& path) {
    throw StructuralError(message, path);
}

bool parse_full_double(const std::string& text, double& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, out, std::chars_format::general);
    return ec == std::errc{} && ptr == end;
}

bool parse_full_int(const std::string& text, std::int64_t& out) {
    if (text.empty()) return false;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

double require_real(const Node& node, const std::string& path) {
    double v = 0.0;
    if (!parse_full_double(node.text, v)) {
        structural("expected a numeric value, got '" + node.text + "'", path);
    }
    return v;
}

std::string require_attribute(const Node& node, const char* key, const std::string& path) {
    const std::string* v = node.attribute(key);
    if (!v) structural(std::string("missing required attribute '") + key + "'", path);
    return *v;
}

std::string child_path(const std::string& path, const Node& parent, std::size_t index) {
    const Node& c = parent.children[index];
    std::size_t ordinal = 1;
    bool repeated = false;
    for (std::size_t i = 0; i < parent.children.size(); ++i) {
        if (i == index) continue;
        if (parent.children[i].name == c.name) {
            repeated = true;
            if (i < index) ++ordinal;
        }
    }
    std::string p = path + "/" + c.name;
    if (repeated) p += "[" + std::to_string(ordinal) + "]";
    return p;
}

Status parse_status(const std::string& text, const std::string& path) {
    if (text == "NotTested") return Status::NotTested;
    if (text == "Passed") return Status::Passed;
    if (text == "Failed") return Status::Failed;
    if (text == "Error") return Status::Error;
    structural("unknown status '" + text + "'", path);
}

NumericLimit parse_test_limit(const Node& node, const std::string& path) {
    NumericLimit limit;
    const Node* low = node.child("Low");
    const Node* high = node.child("High");
    if (!low) structural("TestLimit is missing a Low element", path);
    if (!high) structural("TestLimit is missing a High element", path);
    limit.low = require_real(*low, path + "/Low");
    limit.high = require_real(*high, path + "/High");
    if (const Node* unit = node.child("Unit")) limit.unit = unit->text;
    return limit;
}

TestRequirement parse_requirement(const Node& node, const std::string& path,
                                  std::vector<Extension>& ext_sink) {
    TestRequirement req;
    req.name = require_attribute(node, "name", path);
    if (req.name.empty()) structural("TestRequirement name must be nonempty", path);
    bool have_value = false;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const Node& c = node.children[i];
        if (c.name == "TestLimit") {
            req.value = parse_test_limit(c, child_path(path, node, i));
            have_value = true;
        } else if (c.name == "Value") {
            std::int64_t iv = 0;
            double dv = 0.0;
            if (parse_full_int(c.text, iv)) {
                req.value = iv;
            } else if (parse_full_double(c.text, dv)) {
                req.value = dv;
            } else {
                structural("Value must be numeric, got '" + c.text + "'",
                           child_path(path, node, i));
            }
            have_value = true;
        } else if (c.name == "DatasetRef") {
            if (c.text.empty()) {
                structural("DatasetRef must be nonempty", child_path(path, node, i));
            }
            req.value = c.text;
            have_value = true;
        } else {
            ext_sink.push_back({c.name, c.deep_text()});
        }
    }
    if (!have_value) {
        structural("TestRequirement needs a TestLimit, Value, or DatasetRef child", path);
    }
    return req;
}

PropertyEntry parse_property(const Node& node, const std::string& path) {
    PropertyEntry prop;
    prop.name = require_attribute(node, "name", path);
    if (prop.name.empty()) structural("Property name must be nonempty", path);
    const std::string* kind = node.attribute("kind");
    double dv = 0.0;
    if ((!kind || *kind != "text") && parse_full_double(node.text, dv)) {
        prop.value = dv;
    } else {
        prop.value = node.text;
    }
    return prop;
}

TestStep parse_test_step(const Node& node, const std::string& path) {
    TestStep step;
    step.step_id = require_attribute(node, "id", path);
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const Node& c = node.children[i];
        const std::string cpath = child_path(path, node, i);
        if (c.name == "Description") {
            step.description = c.text;
        } else if (c.name == "TestRequirement") {
            step.requirements.push_back(parse_requirement(c, cpath, step.extensions));
        } else if (c.name == "Property") {
            step.properties.push_back(parse_property(c, cpath));
        } else {
            step.extensions.push_back({c.name, c.deep_text()});
        }
    }
    return step;
}

TestKind parse_kind(const std::string& text, const std::string& path) {
    if (text == "CrossValidation") return TestKind::CrossValidation;
    if (text == "Adversarial") return TestKind::Adversarial;
    if (text == "Drift") return TestKind::Drift;
    if (text == "Generic") return TestKind::Generic;
    structural("unknown test kind '" + text + "'", path);
}

TestCase parse_test_case(const Node& node, const std::string& path) {
    TestCase test;
    test.name = require_attribute(node, "name", path);
    test.unique_id = require_attribute(node, "uniqueId", path);
    if (const std::string* kind = node.attribute("kind")) {
        test.kind = parse_kind(*kind, path);
    }
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const Node& c = node.children[i];
        const std::string cpath = child_path(path, node, i);
        if (c.name == "TestRequirement") {
            test.requirements.push_back(parse_requirement(c, cpath, test.extensions));
        } else if (c.name == "Sequence") {
            std::vector<TestStep> steps;
            for (std::size_t j = 0; j < c.children.size(); ++j) {
                const Node& sc = c.children[j];
                if (sc.name == "TestStep") {
                    steps.push_back(parse_test_step(sc, child_path(cpath, c, j)));
                } else {
                    test.extensions.push_back({sc.name, sc.deep_text()});
                }
            }
            test.sequence = std::move(steps);
        } else if (c.name == "NumericLimitTestResult") {
            ExpectedResult expected;
            expected.result_name = require_attribute(c, "name", cpath);
            const Node* limit = c.child("TestLimit");
            if (!limit) structural("NumericLimitTestResult needs a TestLimit child", cpath);
            expected.limit = parse_test_limit(*limit, cpath + "/TestLimit");
            test.expected_results.push_back(std::move(expected));
        } else if (c.name == "Status") {
            if (c.text != "NotTested") {
                structural("Status in a test description must be NotTested, got '" + c.text + "'",
                           cpath);
            }
        } else {
            test.extensions.push_back({c.name, c.deep_text()});
        }
    }
    return test;
}

TestDescription parse_test_description(const Node& root, const std::string& path) {
    TestDescription doc;
    const Node* group = root.child("TestGroup");
    if (!group) structural("TestDescription needs a TestGroup element", path);
    const std::string gpath = path + "/TestGroup";
    doc.group_name = require_attribute(*group, "name", gpath);
    for (std::size_t i = 0; i < group->children.size(); ++i) {
        const Node& c = group->children[i];
        if (c.name == "Test") {
            doc.tests.push_back(parse_test_case(c, child_path(gpath, *group, i)));
        } else {
            doc.extensions.push_back({c.name, c.deep_text()});
        }
    }
    for (const Node& c : root.children) {
        if (c.name != "TestGroup") doc.extensions.push_back({c.name, c.deep_text()});
    }
    return doc;
}

UutDescriptor parse_uut(const Node& root, const std::string& path) {
    UutDescriptor uut;
    for (std::size_t i = 0; i < root.children.size(); ++i) {
        const Node& c = root.children[i];
        const std::string cpath = child_path(path, root, i);
        if (c.name == "UUTType") {
            uut.uut_type = c.text;
        } else if (c.name == "UUTIdentifier") {
            uut.uut_identifier = c.text;
        } else if (c.name == "UUTDescription") {
            uut.uut_description = c.text;
        } else if (c.name == "UUTCharacteristics") {
            for (std::size_t j = 0; j < c.children.size(); ++j) {
                const Node& cc = c.children[j];
                if (cc.name == "Characteristic") {
                    PropertyEntry prop = parse_property(cc, child_path(cpath, c, j));
                    uut.characteristics.push_back(std::move(prop));
                } else {
                    uut.extensions.push_back({cc.name, cc.deep_text()});
                }
            }
        } else {
            uut.extensions.push_back({c.name, c.deep_text()});
        }
    }
    if (uut.uut_identifier.empty()) {
        structural("UUTIdentifier must be present and nonempty", path);
    }
    return uut;
}

PreprocessingStep parse_step_name(const std::string& text, const std::string& path) {
    if (text == "None") return PreprocessingStep::None;
    if (text == "Standardize") return PreprocessingStep::Standardize;
    if (text == "MinMax") return PreprocessingStep::MinMax;
    structural("unknown preprocessing step '" + text + "'", path);
}

EnvironmentDescriptor parse_environment(const Node& root, EnvironmentKind kind,
                                        const std::string& path) {
    EnvironmentDescriptor env;
    env.kind = kind;
    if (const std::string* name = root.attribute("name")) env.name = *name;
    for (std::size_t i = 0; i < root.children.size(); ++i) {
        const Node& c = root.children[i];
        const std::string cpath = child_path(path, root, i);
        if (c.name == "Software") {
            SoftwareItem sw;
            sw.name = require_attribute(c, "name", cpath);
            if (const std::string* version = c.attribute("version")) sw.version = *version;
            env.software.push_back(std::move(sw));
        } else if (c.name == "Hardware") {
            HardwareItem hw;
            hw.name = require_attribute(c, "name", cpath);
            hw.details = c.text;
            env.hardware.push_back(std::move(hw));
        } else if (c.name == "Preprocessing") {
            if (kind == EnvironmentKind::Station) {
                structural("a TestStation must not declare Preprocessing", cpath);
            }
            for (std::size_t j = 0; j < c.children.size(); ++j) {
                const Node& sc = c.children[j];
                if (sc.name == "Step") {
                    env.preprocessing.push_back(
                        parse_step_name(sc.text, child_path(cpath, c, j)));
                } else {
                    env.extensions.push_back({sc.name, sc.deep_text()});
                }
            }
        } else {
            env.extensions.push_back({c.name, c.deep_text()});
        }
    }
    return env;
}

TestResultEntry parse_result_entry(const Node& node, const std::string& path) {
    TestResultEntry entry;
    bool have_status = false;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const Node& c = node.children[i];
        const std::string cpath = child_path(path, node, i);
        if (c.name == "UniqueIdentifier") {
            entry.unique_id = c.text;
        } else if (c.name == "Status") {
            entry.status = parse_status(c.text, cpath);
            have_status = true;
        } else if (c.name == "TimeStamp") {
            try {
                entry.timestamp = UtcTimestamp::from_iso8601(c.text);
            } catch (const std::exception& e) {
                structural(e.what(), cpath);
            }
        } else if (c.name == "Measured") {
            MeasuredValue m;
            m.result_name = require_attribute(c, "name", cpath);
            m.value = require_real(c, cpath);
            entry.measured.push_back(std::move(m));
        } else if (c.name == "Diagnostic") {
            const Node* msg = c.child("Message");
            entry.diagnostic = msg ? msg->text : c.text;
        } else {
            entry.extensions.push_back({c.name, c.deep_text()});
        }
    }
    if (entry.unique_id.empty()) structural("TestResult needs a UniqueIdentifier", path);
    if (!have_status) structural("TestResult needs a Status", path);
    return entry;
}

TestResultsDocument parse_results(const Node& root, const std::string& path) {
    TestResultsDocument doc;
    for (std::size_t i = 0; i < root.children.size(); ++i) {
        const Node& c = root.children[i];
        const std::string cpath = child_path(path, root, i);
        if (c.name == "TestResult") {
            doc.entries.push_back(parse_result_entry(c, cpath));
        } else if (c.name == "Environment") {
            RunEnvironment env;
            if (const Node* station = c.child("TestStation")) {
                env.station = parse_environment(*station, EnvironmentKind::Station,
                                                cpath + "/TestStation");
            }
            if (const Node* adapter = c.child("TestAdapter")) {
                env.adapter = parse_environment(*adapter, EnvironmentKind::Adapter,
                                                cpath + "/TestAdapter");
            }
            doc.environment = std::move(env);
        } else {
            doc.extensions.push_back({c.name, c.deep_text()});
        }
    }
    return doc;
}

TestProgramSet parse_tps(const Node& root, const std::string& path) {
    TestProgramSet tps;
    const Node* group = root.child("TestGroup");
    if (!group) structural("TestProgramSet needs a TestGroup element", path);
    const std::string gpath = path + "/TestGroup";
    tps.group_name = require_attribute(*group, "name", gpath);
    for (std::size_t i = 0; i < group->children.size(); ++i) {
        const Node& c = group->children[i];
        const std::string cpath = child_path(gpath, *group, i);
        if (c.name == "TestRef") {
            const Node* id = c.child("UniqueIdentifier");
            if (!id || id->text.empty()) {
                structural("TestRef needs a nonempty UniqueIdentifier", cpath);
            }
            tps.test_refs.push_back(id->text);
            for (const Node& rc : c.children) {
                if (rc.name != "UniqueIdentifier") {
                    tps.extensions.push_back({rc.name, rc.deep_text()});
                }
            }
        } else {
            tps.extensions.push_back({c.name, c.deep_text()});
        }
    }
    for (const Node& c : root.children) {
        if (c.name != "TestGroup") tps.extensions.push_back({c.name, c.deep_text()});
    }
    return tps;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

void check_limit(const NumericLimit& limit, const std::string& where) {
    if (!std::isfinite(limit.low) || !std::isfinite(limit.high)) {
        throw InvariantError("limit bounds must be finite (" + where + ")");
    }
    if (limit.low > limit.high) {
        throw InvariantError("limit requires low <= high (" + where + ")");
    }
}

void check_requirement(const TestRequirement& req, const std::string& where) {
    if (req.name.empty()) throw InvariantError("requirement name must be nonempty (" + where + ")");
    if (const auto* limit = std::get_if<NumericLimit>(&req.value)) {
        check_limit(*limit, where + "/" + req.name);
    } else if (const auto* id = std::get_if<std::string>(&req.value)) {
        if (id->empty()) {
            throw InvariantError("identifier value must be nonempty (" + where + "/" + req.name +
                                 ")");
        }
    }
}

void check_test_description(const TestDescription& doc) {
    std::set<std::string> ids;
    for (const TestCase& test : doc.tests) {
        if (test.unique_id.empty()) {
            throw InvariantError("test unique_id must be nonempty (" + test.name + ")");
        }
        if (!ids.insert(test.unique_id).second) {
            throw InvariantError("duplicate test unique_id '" + test.unique_id + "'");
        }
        for (const TestRequirement& req : test.requirements) {
            check_requirement(req, test.unique_id);
        }
        for (const ExpectedResult& expected : test.expected_results) {
            check_limit(expected.limit, test.unique_id + "/" + expected.result_name);
        }
        if (test.sequence) {
            std::set<std::string> step_ids;
            for (const TestStep& step : *test.sequence) {
                if (!step_ids.insert(step.step_id).second) {
                    throw InvariantError("duplicate step id '" + step.step_id + "' in " +
                                         test.unique_id);
                }
                for (const TestRequirement& req : step.requirements) {
                    check_requirement(req, test.unique_id + "/" + step.step_id);
                }
                for (const PropertyEntry& prop : step.properties) {
                    if (prop.name.empty()) {
                        throw InvariantError("property name must be nonempty (" + test.unique_id +
                                             ")");
                    }
                }
            }
        }
        if (test.kind == TestKind::Drift &&
            (!test.sequence || test.sequence->size() < 2)) {
            throw InvariantError("drift test '" + test.unique_id +
                                 "' requires a sequence with at least 2 steps");
        }
    }
}

Node text_node(std::string name, std::string text) {
    Node n;
    n.name = std::move(name);
    n.text = std::move(text);
    return n;
}

std::string format_requirement_real(double value) {
    std::string s = format_real(value);
    if (s.find_first_of(".eEnN") == std::string::npos) s += ".0";
    return s;
}

Node limit_node(const NumericLimit& limit) {
    Node n;
    n.name = "TestLimit";
    n.children.push_back(text_node("Low", format_real(limit.low)));
    n.children.push_back(text_node("High", format_real(limit.high)));
    if (limit.unit) n.children.push_back(text_node("Unit", *limit.unit));
    return n;
}

Node requirement_node(const TestRequirement& req) {
    Node n;
    n.name = "TestRequirement";
    n.attributes.emplace_back("name", req.name);
    std::visit(
        [&](const auto& value) {
            using T = std::decay_t<decltype(value)>;
            if constexpr (std::is_same_v<T, NumericLimit>) {
                n.children.push_back(limit_node(value));
            } else if constexpr (std::is_same_v<T, double>) {
                n.children.push_back(text_node("Value", format_requirement_real(value)));
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                n.children.push_back(text_node("Value", std::to_string(value)));
            } else {
                n.children.push_back(text_node("DatasetRef", value));
            }
        },
        req.value);
    return n;
}

Node property_node(const PropertyEntry& prop, const char* element_name = "Property") {
    Node n;
    n.name = element_name;
    n.attributes.emplace_back("name", prop.name);
    if (const auto* dv = std::get_if<double>(&prop.value)) {
        n.text = format_real(*dv);
    } else {
        n.text = std::get<std::string>(prop.value);
        double probe = 0.0;
        if (parse_full_double(n.text, probe)) {
            n.attributes.emplace_back("kind", "text");
        }
    }
    return n;
}

void append_extensions(Node& parent, const std::vector<Extension>& extensions) {
    for (const Extension& ext : extensions) {
        parent.children.push_back(text_node(ext.name, ext.text));
    }
}

Node test_case_node(const TestCase& test) {
    Node n;
    n.name = "Test";
    n.attributes.emplace_back("name", test.name);
    n.attributes.emplace_back("uniqueId", test.unique_id);
    n.attributes.emplace_back("kind", to_string(test.kind));
    for (const TestRequirement& req : test.requirements) {
        n.children.push_back(requirement_node(req));
    }
    if (test.sequence) {
        Node seq;
        seq.name = "Sequence";
        for (const TestStep& step : *test.sequence) {
            Node sn;
            sn.name = "TestStep";
            sn.attributes.emplace_back("id", step.step_id);
            if (!step.description.empty()) {
                sn.children.push_back(text_node("Description", step.description));
            }
            for (const TestRequirement& req : step.requirements) {
                sn.children.push_back(requirement_node(req));
            }
            for (const PropertyEntry& prop : step.properties) {
                sn.children.push_back(property_node(prop));
            }
            append_extensions(sn, step.extensions);
            seq.children.push_back(std::move(sn));
        }
        n.children.push_back(std::move(seq));
    }
    for (const ExpectedResult& expected : test.expected_results) {
        Node rn;
        rn.name = "NumericLimitTestResult";
        rn.attributes.emplace_back("name", expected.result_name);
        rn.children.push_back(limit_node(expected.limit));
        n.children.push_back(std::move(rn));
    }
    n.children.push_back(text_node("Status", "NotTested"));
    append_extensions(n, test.extensions);
    return n;
}

Node environment_node(const EnvironmentDescriptor& env) {
    Node n;
    n.name = env.kind == EnvironmentKind::Station ? "TestStation" : "TestAdapter";
    if (!env.name.empty()) n.attributes.emplace_back("name", env.name);
    for (const SoftwareItem& sw : env.software) {
        Node s;
        s.name = "Software";
        s.attributes.emplace_back("name", sw.name);
        if (!sw.version.empty()) s.attributes.emplace_back("version", sw.version);
        n.children.push_back(std::move(s));
    }
    for (const HardwareItem& hw : env.hardware) {
        Node h;
        h.name = "Hardware";
        h.attributes.emplace_back("name", hw.name);
        h.text = hw.details;
        n.children.push_back(std::move(h));
    }
    if (!env.preprocessing.empty()) {
        Node p;
        p.name = "Preprocessing";
        for (PreprocessingStep step : env.preprocessing) {
            p.children.push_back(text_node("Step", to_string(step)));
        }
        n.children.push_back(std::move(p));
    }
    append_extensions(n, env.extensions);
    return n;
}

Node serialize_to_node(const TestDescription& doc) {
    check_test_description(doc);
    Node root;
    root.name = "TestDescription";
    Node group;
    group.name = "TestGroup";
    group.attributes.emplace_back("name", doc.group_name);
    for (const TestCase& test : doc.tests) group.children.push_back(test_case_node(test));
    root.children.push_back(std::move(group));
    append_extensions(root, doc.extensions);
    return root;
}

Node serialize_to_node(const UutDescriptor& uut) {
    if (uut.uut_identifier.empty()) {
        throw InvariantError("UUT identifier must be nonempty");
    }
    Node root;
    root.name = "UUTDescription";
    root.children.push_back(text_node("UUTType", uut.uut_type));
    root.children.push_back(text_node("UUTIdentifier", uut.uut_identifier));
    root.children.push_back(text_node("UUTDescription", uut.uut_description));
    if (!uut.characteristics.empty()) {
        Node chars;
        chars.name = "UUTCharacteristics";
        for (const PropertyEntry& prop : uut.characteristics) {
            if (prop.name.empty()) throw InvariantError("characteristic name must be nonempty");
            chars.children.push_back(property_node(prop, "Characteristic"));
        }
        root.children.push_back(std::move(chars));
    }
    append_extensions(root, uut.extensions);
    return root;
}

Node serialize_to_node(const EnvironmentDescriptor& env) {
    if (env.kind == EnvironmentKind::Station && !env.preprocessing.empty()) {
        throw InvariantError("a test station must not declare preprocessing steps");
    }
    return environment_node(env);
}

Node serialize_to_node(const TestResultsDocument& doc) {
    Node root;
    root.name = "TestResults";
    if (doc.environment) {
        Node env;
        env.name = "Environment";
        if (doc.environment->station) {
            env.children.push_back(environment_node(*doc.environment->station));
        }
        if (doc.environment->adapter) {
            env.children.push_back(environment_node(*doc.environment->adapter));
        }
        root.children.push_back(std::move(env));
    }
    for (const TestResultEntry& entry : doc.entries) {
        if ((entry.status == Status::Failed || entry.status == Status::Error) &&
            (!entry.diagnostic || entry.diagnostic->empty())) {
            throw InvariantError("result entry '" + entry.unique_id +
                                 "' with status " + to_string(entry.status) +
                                 " requires a nonempty diagnostic");
        }
        Node e;
        e.name = "TestResult";
        e.children.push_back(text_node("UniqueIdentifier", entry.unique_id));
        e.children.push_back(text_node("Status", to_string(entry.status)));
        e.children.push_back(text_node("TimeStamp", entry.timestamp.iso8601()));
        for (const MeasuredValue& m : entry.measured) {
            Node mn;
            mn.name = "Measured";
            mn.attributes.emplace_back("name", m.result_name);
            mn.text = format_real(m.value);
            e.children.push_back(std::move(mn));
        }
        if (entry.diagnostic) {
            Node d;
            d.name = "Diagnostic";
            d.children.push_back(text_node("Message", *entry.diagnostic));
            e.children.push_back(std::move(d));
        }
        append_extensions(e, entry.extensions);
        root.children.push_back(std::move(e));
    }
    append_extensions(root, doc.extensions);
    return root;
}

Node serialize_to_node(const TestProgramSet& tps) {
    std::set<std::string> seen;
    for (const std::string& ref : tps.test_refs) {
        if (ref.empty()) throw InvariantError("test refs must be nonempty strings");
        if (!seen.insert(ref).second) {
            throw InvariantError("duplicate test ref '" + ref + "'");
        }
    }
    Node root;
    root.name = "TestProgramSet";
    Node group;
    group.name = "TestGroup";
    group.attributes.emplace_back("name", tps.group_name);
    for (const std::string& ref : tps.test_refs) {
        Node r;
        r.name = "TestRef";
        r.children.push_back(text_node("UniqueIdentifier", ref));
        group.children.push_back(std::move(r));
    }
    root.children.push_back(std::move(group));
    append_extensions(root, tps.extensions);
    return root;
}

} // namespace

std::string to_string(Status s) {
    switch (s) {
        case Status::NotTested: return "NotTested";
        case Status::Passed: return "Passed";
        case Status::Failed: return "Failed";
        case Status::Error: return "Error";
    }
    return "NotTested";
}

std::string to_string(TestKind k) {
    switch (k) {
        case TestKind::CrossValidation: return "CrossValidation";
        case TestKind::Adversarial: return "Adversarial";
        case TestKind::Drift: return "Drift";
        case TestKind::Generic: return "Generic";
    }
    return "Generic";
}

std::string to_string(PreprocessingStep s) {
    switch (s) {
        case PreprocessingStep::None: return "None";
        case PreprocessingStep::Standardize: return "Standardize";
        case PreprocessingStep::MinMax: return "MinMax";
    }
    return "None";
}

Status evaluate_limit(double value, const NumericLimit& limit) {
    return (value >= limit.low && value <= limit.high) ? Status::Passed : Status::Failed;
}

StructuralError::StructuralError(std::string message, std::string element_path)
    : std::runtime_error("structural error at " + element_path + ": " + message),
      path_(std::move(element_path)) {}

const TestRequirement* TestCase::requirement(std::string_view req_name) const {
    for (const TestRequirement& req : requirements) {
        if (req.name == req_name) return &req;
    }
    return nullptr;
}

const TestCase* TestDescription::test_by_id(std::string_view unique_id) const {
    for (const TestCase& test : tests) {
        if (test.unique_id == unique_id) return &test;
    }
    return nullptr;
}

std::string UtcTimestamp::iso8601() const {
    std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

UtcTimestamp UtcTimestamp::from_iso8601(const std::string& text) {
    std::tm tm{};
    char zone = 0;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &tm.tm_year, &tm.tm_mon,
                    &tm.tm_mday, &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &zone) != 7 ||
        zone != 'Z') {
        throw std::runtime_error("invalid ISO 8601 UTC timestamp '" + text + "'");
    }
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    return UtcTimestamp{static_cast<std::int64_t>(timegm(&tm))};
}

UtcTimestamp UtcTimestamp::now() {
    return UtcTimestamp{static_cast<std::int64_t>(std::time(nullptr))};
}

std::string format_real(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

Document parse_document(std::string_view xml_text) {
    Node root = xml::parse(xml_text);
    if (const std::string* ns = root.attribute("xmlns"); ns && *ns != kProfileId) {
        structural("unsupported profile namespace '" + *ns + "'", root.name);
    }
    const std::string path = root.name;
    if (root.name == "TestDescription") return parse_test_description(root, path);
    if (root.name == "UUTDescription") return parse_uut(root, path);
    if (root.name == "TestStation") return parse_environment(root, EnvironmentKind::Station, path);
    if (root.name == "TestAdapter") return parse_environment(root, EnvironmentKind::Adapter, path);
    if (root.name == "TestResults") return parse_results(root, path);
    if (root.name == "TestProgramSet") return parse_tps(root, path);
    structural("unknown document root '" + root.name + "'", path);
}

std::string serialize_document(const Document& doc) {
    Node root = std::visit([](const auto& d) { return serialize_to_node(d); }, doc);
    root.attributes.insert(root.attributes.begin(), {"xmlns", kProfileId});
    return xml::serialize(root);
}

} // namespace atml
