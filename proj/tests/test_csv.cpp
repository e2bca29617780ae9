#include <cstdio>
#include <fstream>

#include "doctest.h"

#include "mvsne/csv.hpp"

using namespace mvsne;

namespace {

std::string write_temp(const std::string& content) {
    static int counter = 0;
    std::string path = "csv_test_" + std::to_string(counter++) + ".tmp";
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("read_table parses plain rows") {
    auto path = write_temp("1,2,3\n4,5,6\n");
    auto t = csv::read_table(path, {',', false});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == std::vector<std::string>{"1", "2", "3"});
    CHECK(t.rows[1][2] == "6");
    std::remove(path.c_str());
}

TEST_CASE("read_table honours header flag and quoting") {
    auto path = write_temp("a,b\n\"x,y\",\"he said \"\"hi\"\"\"\n");
    auto t = csv::read_table(path, {',', true});
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][0] == "x,y");
    CHECK(t.rows[0][1] == "he said \"hi\"");
    std::remove(path.c_str());
}

TEST_CASE("read_table strips CRLF and skips blank lines") {
    auto path = write_temp("1,2\r\n\r\n3,4\r\n");
    auto t = csv::read_table(path, {',', false});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1][0] == "3");
    std::remove(path.c_str());
}

TEST_CASE("read_table rejects ragged rows and missing files") {
    auto path = write_temp("1,2\n3\n");
    CHECK_THROWS_AS(csv::read_table(path, {',', false}), DataError);
    std::remove(path.c_str());
    CHECK_THROWS_AS(csv::read_table("definitely_not_here.csv", {',', false}), DataError);
}

TEST_CASE("to_matrix converts and reports bad cells") {
    auto path = write_temp("1.5,2\n-3e2,0.25\n");
    auto t = csv::read_table(path, {',', false});
    Mat m = csv::to_matrix(t, "test");
    CHECK(m(0, 0) == 1.5);
    CHECK(m(1, 0) == -300.0);
    std::remove(path.c_str());

    auto bad = write_temp("1,apple\n");
    auto tb = csv::read_table(bad, {',', false});
    CHECK_THROWS_AS(csv::to_matrix(tb, "test"), DataError);
    std::remove(bad.c_str());
}

TEST_CASE("format_double round-trips doubles exactly") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0, 123456789.123456789}) {
        const std::string s = csv::format_double(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("escape_field quotes only when needed") {
    CHECK(csv::escape_field("plain") == "plain");
    CHECK(csv::escape_field("a,b") == "\"a,b\"");
    CHECK(csv::escape_field("q\"q") == "\"q\"\"q\"");
}

TEST_CASE("atomic_write replaces content completely") {
    std::string path = "atomic_test.tmp";
    csv::atomic_write(path, "first version that is quite long\n");
    csv::atomic_write(path, "v2\n");
    std::ifstream in(path, std::ios::binary);
    std::string got((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(got == "v2\n");
    std::remove(path.c_str());
}
