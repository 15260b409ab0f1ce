#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "ppc/csv.hpp"

using namespace ppc;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("/tmp/ppc_test_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("bundled dipper csv parses to the table-2 fixture") {
    RecaptureData bundled = read_recapture_csv(std::string(PPC_DATA_DIR) + "/dipper.csv");
    RecaptureData expected = RecaptureData::dipper();
    CHECK(bundled.releases == expected.releases);
    CHECK(bundled.recaptures == expected.recaptures);
}

TEST_CASE("recapture csv round trip") {
    RecaptureData d = RecaptureData::dipper();
    write_recapture_csv(d, "/tmp/ppc_test_dipper_rt.csv");
    RecaptureData back = read_recapture_csv("/tmp/ppc_test_dipper_rt.csv");
    CHECK(back.releases == d.releases);
    CHECK(back.recaptures == d.recaptures);
    std::remove("/tmp/ppc_test_dipper_rt.csv");
}

TEST_CASE("single column reader accepts an optional header") {
    TempFile with_header("col1.csv", "speed\n1.5\n-2\n3e-1\n");
    auto v = read_single_column_csv(with_header.path);
    CHECK(v == std::vector<double>{1.5, -2.0, 0.3});

    TempFile bare("col2.csv", "4\n5\n");
    CHECK(read_single_column_csv(bare.path) == std::vector<double>{4.0, 5.0});

    TempFile broken("col3.csv", "1\nx\n3\n");
    CHECK_THROWS_AS(read_single_column_csv(broken.path), DataError);
    CHECK_THROWS_AS(read_single_column_csv("/nonexistent/file.csv"), DataError);
}

TEST_CASE("table reader finds named columns") {
    TempFile t("tab.csv", "a,b,y\n1,2,3\n4,5,6\n");
    Table tab = read_table_csv(t.path);
    CHECK(tab.columns == std::vector<std::string>{"a", "b", "y"});
    CHECK(tab.column_index("y") == 2);
    CHECK(tab.column_index("zz") == -1);
    CHECK(tab.values(1, 0) == doctest::Approx(4.0));

    TempFile ragged("rag.csv", "a,b\n1\n");
    CHECK_THROWS_AS(read_table_csv(ragged.path), DataError);
}

TEST_CASE("malformed recapture files are rejected") {
    TempFile blank_inside("bad1.csv",
                          "release_year,released,1982,1983\n1981,10,5,\n1982,10,,3\n");
    CHECK_THROWS_AS(read_recapture_csv(blank_inside.path), DataError);
    TempFile overflow("bad2.csv", "release_year,released,1982\n1981,3,9\n");
    CHECK_THROWS(read_recapture_csv(overflow.path));  // fails shape validation
}
