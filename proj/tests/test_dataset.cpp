#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "atml/dataset.hpp"
#include "support.hpp"

using namespace atml;
using namespace atml::tests;

TEST_CASE("manifest maps ids to CSV paths") {
    TempDir dir("atml_ds");
    dir.write("ds123.csv", "x1,x2,label\n0,0,0\n1,1,1\n2,2,1\n");
    dir.write("datasets.manifest",
              "# datasets for the desk-scale runs\n"
              "DataSet_123=ds123.csv\n"
              "\n");
    DatasetRegistry registry = DatasetRegistry::load(dir.path() / "datasets.manifest");
    CHECK(registry.size() == 1);
    CHECK(registry.contains("DataSet_123"));

    Dataset data = registry.resolve("DataSet_123");
    CHECK(data.rows() == 3);
    CHECK(data.n_features == 2);
    CHECK(data.feature_names == std::vector<std::string>{"x1", "x2"});
    CHECK(data.labels == std::vector<int>{0, 1, 1});
    CHECK(data.at(2, 0) == 2.0);
}

TEST_CASE("empty manifest yields an empty registry") {
    TempDir dir("atml_ds");
    dir.write("datasets.manifest", "# nothing here\n");
    CHECK(DatasetRegistry::load(dir.path() / "datasets.manifest").size() == 0);
}

TEST_CASE("duplicate manifest ids are rejected by name") {
    TempDir dir("atml_ds");
    dir.write("datasets.manifest", "A=a.csv\nA=b.csv\n");
    try {
        DatasetRegistry::load(dir.path() / "datasets.manifest");
        FAIL("expected a duplicate-id error");
    } catch (const DatasetError& e) {
        CHECK(std::string(e.what()).find("'A'") != std::string::npos);
    }
}

TEST_CASE("missing manifest file fails") {
    CHECK_THROWS_AS(DatasetRegistry::load("/no/such/dir/datasets.manifest"), DatasetError);
}

TEST_CASE("unknown id is a dataset-not-found error, distinct from I/O errors") {
    TempDir dir("atml_ds");
    dir.write("datasets.manifest", "");
    DatasetRegistry registry = DatasetRegistry::load(dir.path() / "datasets.manifest");
    CHECK_THROWS_AS(registry.resolve("NoSuchSet"), DatasetNotFound);
}

TEST_CASE("non-numeric feature cell reports row and column") {
    TempDir dir("atml_ds");
    dir.write("bad.csv", "x1,x2,label\n0,abc,0\n");
    try {
        read_csv(dir.path() / "bad.csv", "Bad");
        FAIL("expected an ingestion error");
    } catch (const DatasetError& e) {
        std::string what = e.what();
        CHECK(what.find("row 2") != std::string::npos);
        CHECK(what.find("column 2") != std::string::npos);
    }
}

TEST_CASE("non-integer label is rejected") {
    TempDir dir("atml_ds");
    dir.write("bad.csv", "x1,label\n0,0.5\n");
    CHECK_THROWS_AS(read_csv(dir.path() / "bad.csv", "Bad"), DatasetError);
}

TEST_CASE("CSV write/read round-trips values exactly") {
    Dataset blob = make_blob_dataset(50, 3);
    TempDir dir("atml_ds");
    write_csv(blob, dir.path() / "blob.csv");
    Dataset again = read_csv(dir.path() / "blob.csv", blob.id);
    CHECK(again.values == blob.values);
    CHECK(again.labels == blob.labels);
    CHECK(again.feature_names == blob.feature_names);
}

TEST_CASE("resolve is pure: repeated calls return equal datasets") {
    TempDir dir("atml_ds");
    dir.write("a.csv", "x1,label\n0.25,0\n-1.5,1\n");
    dir.write("datasets.manifest", "A=a.csv\n");
    DatasetRegistry registry = DatasetRegistry::load(dir.path() / "datasets.manifest");
    Dataset first = registry.resolve("A");
    Dataset second = registry.resolve("A");
    CHECK(first.values == second.values);
    CHECK(first.labels == second.labels);
}
