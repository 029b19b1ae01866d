#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "bdms/io_util.hpp"

using namespace bdms;

TEST_CASE("format_double round-trips and is shortest") {
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(1.0) == "1");
    CHECK(io::format_double(-2.5e-5) == "-2.5e-05");
    double v = 0.1 + 0.2;
    CHECK(io::parse_double(io::format_double(v)) == v);
    CHECK(io::parse_double(io::format_double(1e300)) == 1e300);
}

TEST_CASE("parse_double rejects garbage") {
    CHECK_THROWS(io::parse_double("abc"));
    CHECK_THROWS(io::parse_double(""));
    CHECK_THROWS(io::parse_double("1.5x"));
    CHECK(io::parse_int("-42") == -42);
    CHECK_THROWS(io::parse_int("4.2"));
}

TEST_CASE("csv parse with header lookup") {
    io::CsvTable t = io::parse_csv("a,b,c\n1,2,3\n4,5,6\n");
    REQUIRE(t.header.size() == 3);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.column("b") == 1);
    CHECK(t.column("missing") == -1);
    CHECK(t.rows[1][2] == "6");
}

TEST_CASE("csv tolerates missing trailing newline") {
    io::CsvTable t = io::parse_csv("x,y\n7,8");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][1] == "8");
}

TEST_CASE("atomic write leaves no partial file") {
    auto dir = std::filesystem::temp_directory_path() / "bdms_io_test";
    std::filesystem::create_directories(dir);
    auto path = dir / "out.txt";
    io::write_file_atomic(path, "hello\n");
    CHECK(io::read_file(path) == "hello\n");
    CHECK_FALSE(std::filesystem::exists(path.string() + ".partial"));
    std::filesystem::remove_all(dir);
}
