#include "doctest.h"

#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "provol/data.hpp"
#include "provol/errors.hpp"

using namespace provol;
using namespace provol::data;

namespace {

double parse_back(const std::string& text) { return std::strtod(text.c_str(), nullptr); }

} // namespace

TEST_SUITE("data") {

TEST_CASE("price CSV: header detection and label preservation") {
    std::stringstream in("date,price\n2007-01-03,1462.42\n2007-01-04,1459.37\n");
    const PriceTable table = read_price_csv(in);
    REQUIRE(table.records.size() == 2);
    CHECK(table.records[0].label == "2007-01-03");
    CHECK(table.records[0].price == 1462.42);
    CHECK(table.records[1].price == 1459.37);
    const auto prices = table.prices();
    CHECK(prices == std::vector<double>{1462.42, 1459.37});
}

TEST_CASE("price CSV: purely numeric files have no header to skip") {
    std::stringstream in("1,100.5\n2,101.25\n3,99.75\n");
    const PriceTable table = read_price_csv(in);
    REQUIRE(table.records.size() == 3);
    CHECK(table.records[0].label == "1");
    CHECK(table.records[2].price == 99.75);
}

TEST_CASE("price CSV errors name the offending row") {
    SUBCASE("wrong column count") {
        std::stringstream in("date,price\n2020-01-01,100\n2020-01-02,1,2\n");
        try {
            read_price_csv(in);
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(std::string(e.what()).find("row 3") != std::string::npos);
        }
    }
    SUBCASE("unparseable price past the header") {
        std::stringstream in("date,price\n2020-01-01,100\n2020-01-02,oops\n");
        try {
            read_price_csv(in);
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(std::string(e.what()).find("row 3") != std::string::npos);
            CHECK(std::string(e.what()).find("oops") != std::string::npos);
        }
    }
    SUBCASE("non-positive price") {
        std::stringstream in("a,100\nb,-3\n");
        CHECK_THROWS_AS(read_price_csv(in), parse_error);
    }
    SUBCASE("empty file") {
        std::stringstream in("");
        CHECK_THROWS_AS(read_price_csv(in), parse_error);
    }
    SUBCASE("fewer than two valid rows") {
        std::stringstream in("date,price\n2020-01-01,100\n");
        CHECK_THROWS_AS(read_price_csv(in), parse_error);
    }
}

TEST_CASE("tail keeps the most recent records") {
    PriceTable table;
    table.records = {{"a", 1.0}, {"b", 2.0}, {"c", 3.0}, {"d", 4.0}};
    const PriceTable last2 = tail(table, 2);
    REQUIRE(last2.records.size() == 2);
    CHECK(last2.records[0].label == "c");
    CHECK(last2.records[1].label == "d");
    CHECK(tail(table, 4).records.size() == 4);
    CHECK_THROWS_AS(tail(table, 5), std::out_of_range);
}

TEST_CASE("decimal rendering round-trips every double exactly") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 7.8245412959830813e-41, 1459.37, -0.000123456789,
                     123456789.123456789}) {
        CHECK(parse_back(format_double(v)) == v);
    }
    CHECK(format_double(0.0) == "0");
}

TEST_CASE("series CSV writes index,value and round-trips values") {
    std::stringstream out;
    write_series_csv(out, {1.5, 2.25, 1.0 / 3.0});
    std::stringstream in(out.str());
    const CsvTable table = read_csv(in);
    REQUIRE(table.header == std::vector<std::string>{"index", "value"});
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0][0] == "0");
    CHECK(parse_back(table.rows[2][1]) == 1.0 / 3.0);
}

TEST_CASE("regression CSV schema") {
    calibration::RegressionEstimate est;
    est.grid = {-0.01, 0.02};
    est.f_hat = {0.001, -0.002};
    est.g2_hat = {1e-4, calibration::g2_floor};
    est.clamped = {0, 1};
    est.valid = {1, 1};
    std::stringstream out;
    write_regression_csv(out, est);
    std::stringstream in(out.str());
    const CsvTable table = read_csv(in);
    REQUIRE(table.header ==
            std::vector<std::string>{"y", "f_hat", "g2_hat", "clamped", "valid"});
    REQUIRE(table.rows.size() == 2);
    CHECK(parse_back(table.rows[0][0]) == -0.01);
    CHECK(parse_back(table.rows[1][2]) == calibration::g2_floor);
    CHECK(table.rows[1][3] == "1");
    CHECK(table.rows[1][4] == "1");
}

TEST_CASE("surface CSV schema: reasons and sentinel values") {
    pricing::IvSurface surface;
    surface.strikes = {1100.0, 2000.0};
    surface.maturities_months = {12};
    surface.cells.resize(2);
    surface.mc_prices = {400.0, 40.0};
    surface.mc_std_errors = {1.0, 0.5};
    surface.cells[0].valid = true;
    surface.cells[0].sigma = 0.22;
    surface.cells[0].vega = 500.0;
    surface.cells[0].reason = pricing::IvFailure::none;
    surface.cells[1].valid = false;
    surface.cells[1].reason = pricing::IvFailure::arbitrage_bound;

    std::stringstream out;
    write_surface_csv(out, surface);
    std::stringstream in(out.str());
    const CsvTable table = read_csv(in);
    REQUIRE(table.header ==
            std::vector<std::string>{"K", "T_months", "iv", "valid", "reason", "vega"});
    REQUIRE(table.rows.size() == 2);
    CHECK(parse_back(table.rows[0][0]) == 1100.0);
    CHECK(table.rows[0][1] == "12");
    CHECK(parse_back(table.rows[0][2]) == 0.22);
    CHECK(table.rows[0][3] == "1");
    CHECK(table.rows[0][4] == "");
    CHECK(parse_back(table.rows[0][5]) == 500.0);
    CHECK(table.rows[1][2] == "nan"); // no volatility for an invalid cell
    CHECK(table.rows[1][3] == "0");
    CHECK(table.rows[1][4] == "arbitrage-bound");
    CHECK(table.rows[1][5] == "nan"); // no root was found either

    // a guard failure still reports the root and its sensitivity
    surface.cells[1].reason = pricing::IvFailure::vega_guard;
    surface.cells[1].sigma = 0.31;
    surface.cells[1].vega = 1e-7;
    std::stringstream out2;
    write_surface_csv(out2, surface);
    std::stringstream in2(out2.str());
    const CsvTable table2 = read_csv(in2);
    CHECK(table2.rows[1][2] == "nan");
    CHECK(table2.rows[1][4] == "vega-guard");
    CHECK(parse_back(table2.rows[1][5]) == 1e-7);
}

TEST_CASE("vega CSV schema") {
    pricing::VegaMap map;
    map.strikes = {800.0};
    map.maturities_months = {1, 2};
    map.values = {7.8245412959830813e-41, 3.5e-21};
    std::stringstream out;
    write_vega_csv(out, map);
    std::stringstream in(out.str());
    const CsvTable table = read_csv(in);
    REQUIRE(table.header == std::vector<std::string>{"K", "T_months", "vega"});
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0][1] == "1");
    CHECK(parse_back(table.rows[0][2]) == 7.8245412959830813e-41);
    CHECK(table.rows[1][1] == "2");
}

TEST_CASE("convergence CSV schema") {
    std::stringstream out;
    write_convergence_csv(out, {{10000, 1.25}, {1000000, 0.125}});
    std::stringstream in(out.str());
    const CsvTable table = read_csv(in);
    REQUIRE(table.header == std::vector<std::string>{"paths", "std_dev"});
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0][0] == "10000");
    CHECK(parse_back(table.rows[1][1]) == 0.125);
}

} // TEST_SUITE
