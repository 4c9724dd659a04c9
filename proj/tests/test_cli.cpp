#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "atml/cli.hpp"
#include "atml/documents.hpp"
#include "support.hpp"

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

using namespace atml;
using namespace atml::tests;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::string strip_timestamps(const std::string& xml) {
    std::string out;
    for (const std::string& line : lines_of(xml)) {
        if (line.find("<TimeStamp>") != std::string::npos) continue;
        out += line;
        out += '\n';
    }
    return out;
}

TestCase cv_test(const std::string& id, const std::string& dataset) {
    TestCase test;
    test.name = "Cross Validation";
    test.kind = TestKind::CrossValidation;
    test.unique_id = id;
    test.requirements = {{"Folds", std::int64_t{5}}, {"Dataset ID", dataset}};
    test.expected_results = {{"ValidationScore", {0.8, 1.0, std::nullopt}}};
    return test;
}

TestCase adv_test(const std::string& id, const std::string& dataset) {
    TestCase test;
    test.name = "Adversarial Robustness";
    test.kind = TestKind::Adversarial;
    test.unique_id = id;
    test.requirements = {{"Epsilon", 0.1},
                         {"Attack Method", std::string("FGSM")},
                         {"Dataset ID", dataset}};
    test.expected_results = {{"RobustnessScore", {0.7, 1.0, std::nullopt}}};
    return test;
}

TestCase drift_test(const std::string& id, const std::string& dataset) {
    TestCase test;
    test.name = "Data Drift";
    test.kind = TestKind::Drift;
    test.unique_id = id;
    test.requirements = {{"Dataset ID", dataset}};
    TestStep compare{"Step_1", "Compare feature statistics", {}, {}, {}};
    compare.properties = {{"Mean_1", 0.0}, {"Variance_1", 1.0}, {"Mean_2", 0.0},
                          {"Variance_2", 1.0}};
    TestStep threshold{"Step_2", "Apply thresholds", {}, {{"Z_Threshold", 3.0}}, {}};
    test.sequence = {{compare, threshold}};
    return test;
}

/// Registry directory plus serialized program, description, and UUT documents.
struct Fixture {
    TempDir dir{"cli"};

    Fixture() {
        write_csv(make_blob_dataset(100, 7), dir.path() / "blob.csv");
        Dataset gauss = make_gaussian_dataset(200, 2, 0.0, 11, "Gauss");
        write_csv(gauss, dir.path() / "gauss.csv");
        Dataset shifted = gauss;
        shifted.id = "GaussShift";
        for (double& v : shifted.values) v += 5.0;
        write_csv(shifted, dir.path() / "gauss_shift.csv");
        dir.write("datasets.manifest",
                  "Blob=blob.csv\nGauss=gauss.csv\nGaussShift=gauss_shift.csv\n");
        dir.write("lr1.model", "kind=logistic_regression\n");
        dir.write("models.manifest", "LR_1=lr1.model\n");

        TestProgramSet tps;
        tps.group_name = "ML_Test_Program";
        tps.test_refs = {"CV_Test_1", "ADV_Test_1", "DRIFT_Test_1"};
        dir.write("tps.xml", serialize_document(Document{tps}));

        TestDescription desc;
        desc.group_name = "ML Tests";
        desc.tests = {cv_test("CV_Test_1", "Blob"), adv_test("ADV_Test_1", "Blob"),
                      drift_test("DRIFT_Test_1", "Gauss")};
        dir.write("tests.xml", serialize_document(Document{desc}));

        TestDescription drifting = desc;
        drifting.tests[2] = drift_test("DRIFT_Test_1", "GaussShift");
        dir.write("tests_drifting.xml", serialize_document(Document{drifting}));

        UutDescriptor uut;
        uut.uut_type = "ML Model";
        uut.uut_identifier = "LR_1";
        uut.uut_description = "logistic classifier";
        dir.write("uut.xml", serialize_document(Document{uut}));
    }

    std::string path(const std::string& name) const { return (dir.path() / name).string(); }

    std::vector<std::string> run_args(const std::string& descriptions,
                                      const std::string& out_name) const {
        return {"run",       "--tps",      path("tps.xml"), "--descriptions",
                path(descriptions), "--uut", path("uut.xml"), "--registry",
                dir.path().string(), "--out", path(out_name), "--seed", "42"};
    }
};

} // namespace

TEST_CASE("validate: a clean document exits 0 with no output") {
    CliResult r = run_cli({"validate", corpus("fig03_cv_data.xml").string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(r.err.empty());
}

TEST_CASE("validate: a missing dataset binding exits 2 with one violation line") {
    CliResult r = run_cli({"validate", corpus("fig02_cv.xml").string()});
    CHECK(r.code == 2);
    std::vector<std::string> lines = lines_of(r.out);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].starts_with("Error R-DATASET-REF TestDescription/TestGroup/Test[1]:"));
}

TEST_CASE("validate: dangling program refs surface when descriptions are supplied") {
    CliResult r = run_cli({"validate", corpus("fig12_tps.xml").string(),
                           corpus("fig03_cv_data.xml").string()});
    CHECK(r.code == 2);
    std::size_t dangling = 0;
    for (const std::string& line : lines_of(r.out)) {
        if (line.find("R-TPS-DANGLING") != std::string::npos) ++dangling;
    }
    CHECK(dangling == 2); // ADV_Test_1 and DRIFT_Test_1 have no description
}

TEST_CASE("validate: unreadable input exits 3") {
    CliResult r = run_cli({"validate", "/nonexistent/doc.xml"});
    CHECK(r.code == 3);
    CHECK(r.err.starts_with("error: "));
}

TEST_CASE("validate: malformed XML exits 3") {
    TempDir dir("cli_bad");
    fs::path p = dir.write("bad.xml", "<TestDescription xmlns=\"atml-ml/1\">");
    CliResult r = run_cli({"validate", p.string()});
    CHECK(r.code == 3);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("run: a passing program writes results and exits 0") {
    Fixture fx;
    CliResult r = run_cli(fx.run_args("tests.xml", "results.xml"));
    CHECK(r.code == 0);
    CHECK(r.err.empty());

    std::vector<std::string> lines = lines_of(r.out);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].starts_with("CV_Test_1 Passed ValidationScore="));
    CHECK(lines[1].starts_with("ADV_Test_1 Passed RobustnessScore="));
    CHECK(lines[2].starts_with("DRIFT_Test_1 Passed Z_1="));

    Document doc = parse_document(read_file(fx.dir.path() / "results.xml"));
    const auto& results = std::get<TestResultsDocument>(doc);
    REQUIRE(results.entries.size() == 3);
    for (const TestResultEntry& entry : results.entries) {
        CHECK(entry.status == Status::Passed);
    }
    CHECK_FALSE(fs::exists(fx.dir.path() / "results.xml.tmp"));
}

TEST_CASE("run: a drifted dataset exits 1 and records the failure") {
    Fixture fx;
    CliResult r = run_cli(fx.run_args("tests_drifting.xml", "results.xml"));
    CHECK(r.code == 1);
    std::vector<std::string> lines = lines_of(r.out);
    REQUIRE(lines.size() == 3);
    CHECK(lines[2].starts_with("DRIFT_Test_1 Failed Z_1="));

    Document doc = parse_document(read_file(fx.dir.path() / "results.xml"));
    const auto& results = std::get<TestResultsDocument>(doc);
    CHECK(results.entries[2].status == Status::Failed);
    REQUIRE(results.entries[2].diagnostic.has_value());
    CHECK(results.entries[2].diagnostic->starts_with("drift detected in features: x1"));
}

TEST_CASE("run: reruns differ only in TimeStamp lines") {
    Fixture fx;
    CliResult first = run_cli(fx.run_args("tests.xml", "r1.xml"));
    CliResult second = run_cli(fx.run_args("tests.xml", "r2.xml"));
    CHECK(first.code == 0);
    CHECK(first.out == second.out);
    CHECK(strip_timestamps(read_file(fx.dir.path() / "r1.xml")) ==
          strip_timestamps(read_file(fx.dir.path() / "r2.xml")));
}

TEST_CASE("run: an invalid description exits 2 and writes no results") {
    Fixture fx;
    fx.dir.write("dup.xml",
                 "<TestDescription xmlns=\"atml-ml/1\">\n"
                 "  <TestGroup name=\"G\">\n"
                 "    <Test name=\"A\" uniqueId=\"T1\" kind=\"Generic\"/>\n"
                 "    <Test name=\"B\" uniqueId=\"T1\" kind=\"Generic\"/>\n"
                 "  </TestGroup>\n"
                 "</TestDescription>\n");
    CliResult r = run_cli(fx.run_args("dup.xml", "never.xml"));
    CHECK(r.code == 2);
    CHECK(r.out.find("R-UID-UNIQUE") != std::string::npos);
    CHECK_FALSE(fs::exists(fx.dir.path() / "never.xml"));
}

TEST_CASE("run: a dangling program reference exits 3 before writing results") {
    Fixture fx;
    fx.dir.write("solo.xml",
                 serialize_document(Document{TestDescription{
                     "ML Tests", {cv_test("CV_Test_1", "Blob")}, {}}}));
    CliResult r = run_cli(fx.run_args("solo.xml", "never.xml"));
    CHECK(r.code == 3);
    CHECK(r.err.find("does not resolve") != std::string::npos);
    CHECK_FALSE(fs::exists(fx.dir.path() / "never.xml"));
}

TEST_CASE("run: a missing registry exits 3") {
    Fixture fx;
    std::vector<std::string> args = fx.run_args("tests.xml", "never.xml");
    args[8] = "/nonexistent/registry";
    CliResult r = run_cli(args);
    CHECK(r.code == 3);
}

TEST_CASE("report: per-test lines plus a status footer") {
    SUBCASE("a failed entry exits 1") {
        CliResult r = run_cli({"report", corpus("fig11_results.xml").string()});
        CHECK(r.code == 1);
        std::vector<std::string> lines = lines_of(r.out);
        REQUIRE(lines.size() == 2);
        CHECK(lines[0].starts_with("CV_Test_1 Failed 2023-06-01T12:00:00Z "
                                   "ValidationScore=0.7500"));
        CHECK(lines[1] == "Passed=0 Failed=1 Error=0 NotTested=0");
    }

    SUBCASE("an all-passed document exits 0") {
        Fixture fx;
        REQUIRE(run_cli(fx.run_args("tests.xml", "results.xml")).code == 0);
        CliResult r = run_cli({"report", fx.path("results.xml")});
        CHECK(r.code == 0);
        std::vector<std::string> lines = lines_of(r.out);
        CHECK(lines.back() == "Passed=3 Failed=0 Error=0 NotTested=0");
    }

    SUBCASE("the wrong document kind exits 3") {
        CliResult r = run_cli({"report", corpus("fig08_uut.xml").string()});
        CHECK(r.code == 3);
        CHECK(r.err.find("expected a TestResults document") != std::string::npos);
    }
}

TEST_CASE("usage errors exit 3; help exits 0") {
    CHECK(run_cli({}).code == 3);
    CHECK(run_cli({"frobnicate"}).code == 3);
    CHECK(run_cli({"run"}).code == 3);

    CliResult help = run_cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("validate") != std::string::npos);
    CHECK(help.out.find("report") != std::string::npos);
}

TEST_CASE("the installed binary behaves like the library entry point") {
    std::string cmd = std::string(ATML_CLI_BIN) + " validate " +
                      corpus("fig03_cv_data.xml").string();
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    CHECK(WEXITSTATUS(status) == 0);

    cmd = std::string(ATML_CLI_BIN) + " validate " + corpus("fig02_cv.xml").string() +
          " > /dev/null";
    status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 2);
}
