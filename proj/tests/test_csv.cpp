#include <catch2/catch_amalgamated.hpp>

#include "parksent/csv.hpp"

using namespace parksent;

TEST_CASE("rfc4180 quoting and embedded separators", "[corpus]") {
    auto t = csvio::parse("a,b,c\n1,\"x,y\",\"he said \"\"hi\"\"\"\n");
    REQUIRE(t.header == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][1] == "x,y");
    CHECK(t.rows[0][2] == "he said \"hi\"");
}

TEST_CASE("crlf line endings and quoted newlines", "[corpus]") {
    auto t = csvio::parse("a,b\r\n\"line1\nline2\",2\r\n");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][0] == "line1\nline2");
    CHECK(t.rows[0][1] == "2");
}

TEST_CASE("ragged row is an error", "[corpus]") {
    CHECK_THROWS_AS(csvio::parse("a,b\n1,2,3\n"), csvio::CsvError);
}

TEST_CASE("numeric formatting is 9 significant digits", "[corpus]") {
    CHECK(csvio::fmt_sig(0.1) == "0.1");
    CHECK(csvio::fmt_sig(1.0 / 3.0) == "0.333333333");
    CHECK(csvio::fmt_sig(123456789012.0) == "1.23456789e+11");
}

TEST_CASE("field quoting round-trips through parse", "[corpus]") {
    std::string tricky = "a,\"b\"\nc";
    std::string quoted = csvio::quote_field(tricky);
    auto t = csvio::parse("h\n" + quoted + "\n");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][0] == tricky);
}
