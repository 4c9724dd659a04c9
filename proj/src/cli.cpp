#include "atml/cli.hpp"

#include "atml/documents.hpp"
#include "atml/tps.hpp"
#include "atml/validator.hpp"
#include "atml/xml.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace atml::cli {

namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Document parse_file(const fs::path& path) {
    return parse_document(read_file(path));
}

std::string fixed4(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", value);
    return buf;
}

template <typename T>
T parse_file_as(const fs::path& path, const char* expected_kind) {
    Document doc = parse_file(path);
    if (auto* typed = std::get_if<T>(&doc)) return std::move(*typed);
    throw std::runtime_error(path.string() + ": expected a " + expected_kind + " document");
}

int cmd_validate(const std::vector<std::string>& paths, std::ostream& out, std::ostream& err) {
    std::vector<Document> docs;
    try {
        for (const std::string& path : paths) docs.push_back(parse_file(path));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsageOrIoError;
    }

    std::vector<Violation> violations;
    std::vector<TestDescription> descriptions;
    for (const Document& doc : docs) {
        std::vector<Violation> v = validate(doc);
        violations.insert(violations.end(), v.begin(), v.end());
        if (const auto* desc = std::get_if<TestDescription>(&doc)) {
            descriptions.push_back(*desc);
        }
    }
    // cross-document dangling-ref check only when descriptions were supplied
    if (!descriptions.empty()) {
        for (const Document& doc : docs) {
            if (const auto* tps = std::get_if<TestProgramSet>(&doc)) {
                std::vector<Violation> v = validate_tps_refs(*tps, descriptions);
                violations.insert(violations.end(), v.begin(), v.end());
            }
        }
    }

    bool any_error = false;
    for (const Violation& v : violations) {
        out << format_violation(v) << "\n";
        if (v.severity == Severity::Error) any_error = true;
    }
    return any_error ? kValidationFailed : kOk;
}

struct RunOptions {
    std::string tps_path;
    std::vector<std::string> description_paths;
    std::string uut_path;
    std::string registry_dir;
    std::string out_path;
    std::uint64_t seed = 0;
    std::string station_path;
    std::string adapter_path;
    bool clip01 = false;
};

void write_atomically(const fs::path& target, const std::string& content) {
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
    TestProgramSet tps;
    std::vector<TestDescription> descriptions;
    UutDescriptor uut;
    std::optional<EnvironmentDescriptor> station;
    std::optional<EnvironmentDescriptor> adapter;
    try {
        tps = parse_file_as<TestProgramSet>(opts.tps_path, "TestProgramSet");
        for (const std::string& path : opts.description_paths) {
            descriptions.push_back(parse_file_as<TestDescription>(path, "TestDescription"));
        }
        uut = parse_file_as<UutDescriptor>(opts.uut_path, "UUTDescription");
        if (!opts.station_path.empty()) {
            station = parse_file_as<EnvironmentDescriptor>(opts.station_path, "TestStation");
        }
        if (!opts.adapter_path.empty()) {
            adapter = parse_file_as<EnvironmentDescriptor>(opts.adapter_path, "TestAdapter");
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsageOrIoError;
    }

    bool any_violation_error = false;
    auto report = [&](const std::vector<Violation>& violations) {
        for (const Violation& v : violations) {
            out << format_violation(v) << "\n";
            if (v.severity == Severity::Error) any_violation_error = true;
        }
    };
    report(validate(Document{tps}));
    for (const TestDescription& desc : descriptions) report(validate(Document{desc}));
    report(validate(Document{uut}));
    if (station) report(validate(Document{*station}));
    if (adapter) report(validate(Document{*adapter}));
    if (any_violation_error) return kValidationFailed;

    TestResultsDocument results;
    try {
        const fs::path registry(opts.registry_dir);
        DatasetRegistry datasets = DatasetRegistry::load(registry / "datasets.manifest");
        ModelRegistry models = ModelRegistry::load(registry / "models.manifest");

        RunContext ctx;
        ctx.datasets = &datasets;
        ctx.models = &models;
        ctx.uut = uut;
        ctx.station = station;
        ctx.adapter = adapter;
        ctx.seed = opts.seed;
        ctx.clip01 = opts.clip01;

        results = run_tps(tps, descriptions, ctx);
        write_atomically(opts.out_path, serialize_document(Document{results}));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsageOrIoError;
    }

    bool any_failed = false;
    for (const TestResultEntry& entry : results.entries) {
        out << entry.unique_id << " " << to_string(entry.status);
        for (const MeasuredValue& m : entry.measured) {
            out << " " << m.result_name << "=" << fixed4(m.value);
        }
        out << "\n";
        if (entry.status != Status::Passed) any_failed = true;
    }
    return any_failed ? kTestFailed : kOk;
}

int cmd_report(const std::string& results_path, std::ostream& out, std::ostream& err) {
    TestResultsDocument results;
    try {
        results = parse_file_as<TestResultsDocument>(results_path, "TestResults");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsageOrIoError;
    }

    std::size_t passed = 0;
    std::size_t failed = 0;
    std::size_t errors = 0;
    std::size_t not_tested = 0;
    for (const TestResultEntry& entry : results.entries) {
        out << entry.unique_id << " " << to_string(entry.status) << " "
            << entry.timestamp.iso8601();
        for (const MeasuredValue& m : entry.measured) {
            out << " " << m.result_name << "=" << fixed4(m.value);
        }
        if (entry.diagnostic) out << " " << *entry.diagnostic;
        out << "\n";
        switch (entry.status) {
            case Status::Passed: ++passed; break;
            case Status::Failed: ++failed; break;
            case Status::Error: ++errors; break;
            case Status::NotTested: ++not_tested; break;
        }
    }
    out << "Passed=" << passed << " Failed=" << failed << " Error=" << errors
        << " NotTested=" << not_tested << "\n";
    return (failed + errors) > 0 ? kTestFailed : kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ATML-ML profile tool: validate, execute, and report ML test documents"};
    app.require_subcommand(1);

    std::vector<std::string> validate_paths;
    CLI::App* validate_cmd = app.add_subcommand("validate", "Check documents against the profile rules");
    validate_cmd->add_option("paths", validate_paths, "Document files")->required();

    RunOptions run_opts;
    CLI::App* run_cmd = app.add_subcommand("run", "Execute a test program set");
    run_cmd->add_option("--tps", run_opts.tps_path, "Test program set document")->required();
    run_cmd->add_option("--descriptions", run_opts.description_paths,
                        "Test description documents (repeatable)")
        ->required();
    run_cmd->add_option("--uut", run_opts.uut_path, "UUT description document")->required();
    run_cmd->add_option("--registry", run_opts.registry_dir,
                        "Directory with datasets.manifest and models.manifest")
        ->required();
    run_cmd->add_option("--out", run_opts.out_path, "Results document output path")->required();
    run_cmd->add_option("--seed", run_opts.seed, "Run seed (default 0)");
    run_cmd->add_option("--station", run_opts.station_path, "Test station document");
    run_cmd->add_option("--adapter", run_opts.adapter_path, "Test adapter document");
    run_cmd->add_flag("--clip01", run_opts.clip01, "Clip perturbed inputs to [0,1]");

    std::string report_path;
    CLI::App* report_cmd = app.add_subcommand("report", "Print a results document as a table");
    report_cmd->add_option("results", report_path, "Results document")->required();

    try {
        // CLI11's vector overload consumes arguments from the back
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageOrIoError;
    }

    if (validate_cmd->parsed()) return cmd_validate(validate_paths, out, err);
    if (run_cmd->parsed()) return cmd_run(run_opts, out, err);
    return cmd_report(report_path, out, err);
}

} // namespace atml::cli
