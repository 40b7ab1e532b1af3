#include <catch2/catch_amalgamated.hpp>

#include <string>

#include <sqmz/verify.hpp>

using namespace sqmz;

TEST_CASE("check roster is stable") {
    const auto& defs = detail::verification_checks();
    REQUIRE(defs.size() == 10);
    const char* expected[] = {
        "coherent-benchmark",  "qfi-threshold",          "oracle-equivalence",
        "degenerate-identity", "heisenberg-asymptote",   "shotnoise-asymptote",
        "bound-chain",         "threshold-monotonicity", "crossing-structure",
        "unit-anchor",
    };
    for (std::size_t i = 0; i < defs.size(); ++i) REQUIRE(defs[i].name == std::string(expected[i]));
}

TEST_CASE("single-check selection") {
    VerifyOptions opts;
    opts.only = "unit-anchor";
    const VerifyReport report = verify(opts);
    REQUIRE(report.checks.size() == 1);
    REQUIRE(report.checks[0].name == "unit-anchor");
    REQUIRE(report.checks[0].passed);
    REQUIRE(report.checks[0].detail.empty());
    REQUIRE(report.checks[0].seconds >= 0.0);
    REQUIRE(report.all_passed());

    opts.only = "no-such-check";
    REQUIRE_THROWS_AS(verify(opts), SpecValidation);
}

TEST_CASE("fast checks pass individually") {
    for (const char* name : {"coherent-benchmark", "qfi-threshold", "degenerate-identity",
                             "heisenberg-asymptote", "shotnoise-asymptote",
                             "threshold-monotonicity", "crossing-structure", "unit-anchor"}) {
        VerifyOptions opts;
        opts.only = name;
        const VerifyReport report = verify(opts);
        INFO(name << ": " << report.checks.at(0).detail);
        REQUIRE(report.checks.size() == 1);
        REQUIRE(report.checks[0].passed);
    }
}

TEST_CASE("starved oracle basis is caught, not papered over") {
    // dims = 4 cannot hold the coherent mode; the equivalence check must fail.
    VerifyOptions opts;
    opts.dims = 4;
    opts.only = "oracle-equivalence";
    const VerifyReport report = verify(opts);
    REQUIRE(report.checks.size() == 1);
    REQUIRE_FALSE(report.checks[0].passed);
    REQUIRE_FALSE(report.checks[0].detail.empty());
    REQUIRE_FALSE(report.all_passed());
}

TEST_CASE("report serialization") {
    VerifyOptions opts;
    opts.only = "unit-anchor";
    const nlohmann::ordered_json j = verify_report_json(verify(opts));
    REQUIRE(j.at("all_passed") == true);
    REQUIRE(j.at("checks").is_array());
    REQUIRE(j.at("checks").size() == 1);
    REQUIRE(j.at("checks").at(0).at("name") == "unit-anchor");
    REQUIRE(j.at("checks").at(0).at("passed") == true);
    REQUIRE(j.at("checks").at(0).at("detail") == "");
    REQUIRE(j.at("checks").at(0).at("seconds").is_number());
}
