#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "parcs/csv.hpp"
#include "parcs/errors.hpp"

#include "support.hpp"

using namespace parcs;

TEST_SUITE("csv") {

TEST_CASE("doubles print as shortest round-trip decimals") {
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(2.06) == "2.06");
    CHECK(io::format_double(1e-30) == "1e-30");
    CHECK(io::format_double(0.0) == "0");
    CHECK(io::format_double(-3.0) == "-3");
    CHECK(io::format_double(12345678.0) == "12345678");
}

TEST_CASE("formatted doubles parse back bit-exactly") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<int> scale(-300, 300);
    for (int i = 0; i < 1000; ++i) {
        const double v = std::ldexp(unit(rng), scale(rng));
        const std::string s = io::format_double(v);
        const double back = std::stod(s);
        CAPTURE(s);
        CHECK(back == v);
    }
}

TEST_CASE("tables round-trip through text") {
    const std::vector<std::string> header = {"alpha", "beta"};
    Matrix m(3, 2);
    m(0, 0) = 1.5;
    m(0, 1) = -2.0;
    m(1, 0) = 0.1;
    m(1, 1) = 1e-30;
    m(2, 0) = 42.0;
    m(2, 1) = 0.0;
    const std::string text = io::to_csv(header, m);
    CHECK(text == "alpha,beta\n1.5,-2\n0.1,1e-30\n42,0\n");

    const io::CsvTable t = io::parse_csv(text);
    CHECK(t.header == header);
    CHECK(t.values == m);
    CHECK_FALSE(t.any_missing);
}

TEST_CASE("missing cells serialize as empty fields") {
    const std::vector<std::string> header = {"x", "y"};
    Matrix values(2, 2);
    values(0, 0) = 1.0;
    values(0, 1) = 2.0;
    values(1, 0) = 3.0;
    values(1, 1) = 4.0;
    Matrix miss(2, 2);
    miss(0, 1) = 1.0;
    const std::string text = io::to_csv(header, values, &miss);
    CHECK(text == "x,y\n1,\n3,4\n");

    const io::CsvTable t = io::parse_csv(text);
    CHECK(t.any_missing);
    CHECK(t.missing(0, 1) == 1.0);
    CHECK(t.missing(0, 0) == 0.0);
    CHECK(std::isnan(t.values(0, 1)));
    CHECK(t.values(1, 1) == 4.0);
}

TEST_CASE("header-only tables parse to zero rows") {
    const io::CsvTable t = io::parse_csv("only,two\n");
    CHECK(t.header == std::vector<std::string>{"only", "two"});
    CHECK(t.values.rows() == 0);
    CHECK(t.values.cols() == 2);
}

TEST_CASE("defective text is rejected") {
    CHECK_THROWS_AS(io::parse_csv(""), Error);                      // no header
    CHECK_THROWS_AS(io::parse_csv("a,b\n1,2,3\n"), Error);          // ragged wide
    CHECK_THROWS_AS(io::parse_csv("a,b\n1\n"), Error);              // ragged narrow
    CHECK_THROWS_AS(io::parse_csv("a,b\nx,2\n"), Error);            // non-numeric
    CHECK_THROWS_AS(io::parse_csv("a,b\n1,2e\n"), Error);           // broken number
}

TEST_CASE("carriage returns and trailing newlines are tolerated") {
    const io::CsvTable t = io::parse_csv("a,b\r\n1,2\r\n");
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    CHECK(t.values(0, 0) == 1.0);
    const io::CsvTable u = io::parse_csv("a\n1"); // no final newline
    CHECK(u.values(0, 0) == 1.0);
}

TEST_CASE("files write and read back identically") {
    testsup::ScratchDir dir("csv");
    const std::string path = dir.file("t.csv");
    const std::vector<std::string> header = {"v"};
    Matrix m(2, 1);
    m(0, 0) = 0.25;
    m(1, 0) = -1e10;
    io::write_csv(path, header, m);
    const io::CsvTable t = io::read_csv(path);
    CHECK(t.header == header);
    CHECK(t.values == m);
}

TEST_CASE("unreadable paths raise io errors") {
    CHECK_THROWS_AS(io::read_csv("/nonexistent/nowhere.csv"), IoError);
    CHECK_THROWS_AS(io::read_file("/nonexistent/nowhere.txt"), IoError);
    CHECK_THROWS_AS(io::write_file("/nonexistent/dir/file.txt", "x"), IoError);
}

TEST_CASE("plain text files round-trip") {
    testsup::ScratchDir dir("txt");
    const std::string path = dir.file("note.txt");
    const std::string content = "line one\nline two\n";
    io::write_file(path, content);
    CHECK(io::read_file(path) == content);
}

} // TEST_SUITE
