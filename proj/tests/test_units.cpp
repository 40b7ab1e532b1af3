#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <sqmz/units.hpp>

using namespace sqmz;

TEST_CASE("squeezing parameter to decibel") {
    REQUIRE(db_from_r(0.0) == 0.0);
    REQUIRE(std::abs(db_from_r(1.38) - 11.98652770052975) <= 1e-10);
    // 10 log10(e^{2r}) is linear in r.
    REQUIRE(std::abs(db_from_r(2.0) - 2.0 * db_from_r(1.0)) <= 1e-12);
}

TEST_CASE("decibel to squeezing parameter") {
    REQUIRE(r_from_db(0.0) == 0.0);
    REQUIRE(std::abs(r_from_db(12.0) - 1.3815510557964275) <= 1e-12);
}

TEST_CASE("decibel conversions round-trip") {
    for (double r : {0.1, 0.5, 1.0, 1.38, 3.0})
        REQUIRE(std::abs(r_from_db(db_from_r(r)) - r) <= 1e-12);
    for (double db : {0.5, 3.0, 10.0, 20.0})
        REQUIRE(std::abs(db_from_r(r_from_db(db)) - db) <= 1e-12);
}

TEST_CASE("negative magnitudes are rejected") {
    REQUIRE_THROWS_AS(db_from_r(-0.1), ParameterRange);
    REQUIRE_THROWS_AS(r_from_db(-3.0), ParameterRange);
}
