#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <sqmz/sweep.hpp>

using namespace sqmz;

namespace {

SweepSpec golden_spec() {
    SweepSpec spec;
    spec.metric = SweepMetric::Sensitivity;
    spec.families = {Family::SqSPh, Family::SqVac, Family::Ch};
    spec.r_min = 0.0;
    spec.r_max = 0.5;
    spec.r_step = 0.5;
    spec.gammas = {0.0, 1.0};
    spec.etas = {0.6, 1.0};
    return spec;
}

std::string csv_of(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    write_sweep_csv(rows, out);
    return out.str();
}

std::string json_of(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    write_sweep_json(rows, out);
    return out.str();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("r grid includes both endpoints despite rounding") {
    SweepSpec spec;
    spec.r_min = 0.0;
    spec.r_max = 1.0;
    spec.r_step = 0.25;
    const std::vector<double> g = r_grid(spec);
    REQUIRE(g.size() == 5);
    REQUIRE(g.front() == 0.0);
    REQUIRE(g.back() == 1.0);

    spec.r_min = 0.0;
    spec.r_max = 0.3;
    spec.r_step = 0.1; // 3*0.1 overshoots 0.3 by one ulp-ish amount
    REQUIRE(r_grid(spec).size() == 4);

    spec.r_min = 0.7;
    spec.r_max = 0.7;
    spec.r_step = 0.25;
    const std::vector<double> single = r_grid(spec);
    REQUIRE(single.size() == 1);
    REQUIRE(single.front() == 0.7);
}

TEST_CASE("spec validation rejects malformed grids") {
    const auto broken = [](auto mutate) {
        SweepSpec spec = golden_spec();
        mutate(spec);
        return spec;
    };
    REQUIRE_THROWS_AS(validate(broken([](SweepSpec& s) { s.gammas.clear(); })), SpecValidation);
    REQUIRE_THROWS_AS(validate(broken([](SweepSpec& s) { s.families.clear(); })), SpecValidation);
    REQUIRE_THROWS_AS(validate(broken([](SweepSpec& s) { s.etas = {0.0}; })), SpecValidation);
    REQUIRE_THROWS_AS(validate(broken([](SweepSpec& s) { s.etas = {1.5}; })), SpecValidation);
    REQUIRE_THROWS_AS(validate(broken([](SweepSpec& s) { s.r_step = 0.0; })), SpecValidation);
    REQUIRE_THROWS_AS(validate(broken([](SweepSpec& s) { s.r_min = -0.5; })), SpecValidation);
    REQUIRE_THROWS_AS(validate(broken([](SweepSpec& s) { s.r_max = -1.0; })), SpecValidation);
    REQUIRE_THROWS_AS(validate(broken([](SweepSpec& s) { s.gammas = {-1.0}; })), SpecValidation);
    REQUIRE_THROWS_AS(validate(broken([](SweepSpec& s) { s.phi = 0.0; })), SpecValidation);
    REQUIRE_THROWS_AS(validate(broken([](SweepSpec& s) { s.phi = 3.2; })), SpecValidation);
    REQUIRE_THROWS_AS(validate(broken([](SweepSpec& s) { s.dims = -1; })), SpecValidation);
    REQUIRE_THROWS_AS(validate(broken([](SweepSpec& s) {
                          s.metric = SweepMetric::ThresholdSens;
                          s.r_min = 0.0;
                      })),
                      SpecValidation);

    // phi is unconstrained for metrics that never use it.
    REQUIRE_NOTHROW(validate(broken([](SweepSpec& s) {
        s.metric = SweepMetric::Qfi;
        s.phi = 0.0;
    })));

    // Metric/function mismatches fail loudly.
    REQUIRE_THROWS_AS(run_sweep(broken([](SweepSpec& s) { s.metric = SweepMetric::ThresholdQfi; })),
                      SpecValidation);
    REQUIRE_THROWS_AS(run_threshold(golden_spec()), SpecValidation);
}

TEST_CASE("sweep rows come out in deterministic grid order") {
    const std::vector<SweepRow> rows = run_sweep(golden_spec());
    REQUIRE(rows.size() == 24);

    // family innermost ...
    REQUIRE(rows[0].family == Family::SqSPh);
    REQUIRE(rows[1].family == Family::SqVac);
    REQUIRE(rows[2].family == Family::Ch);
    // ... then eta ...
    REQUIRE(rows[0].eta == 0.6);
    REQUIRE(rows[3].eta == 1.0);
    REQUIRE(rows[3].gamma == 0.0);
    // ... then gamma ...
    REQUIRE(rows[6].gamma == 1.0);
    REQUIRE(rows[6].r == 0.0);
    // ... and r outermost.
    REQUIRE(rows[12].r == 0.5);
    REQUIRE(rows[12].gamma == 0.0);
    REQUIRE(rows[12].eta == 0.6);
    REQUIRE(rows[23].family == Family::Ch);
    REQUIRE(rows[23].r == 0.5);
    REQUIRE(rows[23].gamma == 1.0);
    REQUIRE(rows[23].eta == 1.0);
}

TEST_CASE("degenerate grid points become error rows, not aborts") {
    const std::vector<SweepRow> rows = run_sweep(golden_spec());
    for (const SweepRow& row : rows) {
        const bool degenerate = row.family == Family::SqSPh && row.r == 0.0 && row.gamma == 1.0;
        if (degenerate) {
            REQUIRE_FALSE(row.error.empty());
            REQUIRE_FALSE(row.s.has_value());
            REQUIRE(row.n_tot.has_value()); // config itself was fine
        } else {
            REQUIRE(row.error.empty());
            REQUIRE(row.s.has_value());
            REQUIRE(row.q_f.has_value());
            REQUIRE(*row.s > 0.0);
        }
        REQUIRE_FALSE(row.f.has_value()); // sensitivity metric never fills f
    }
}

TEST_CASE("qfi sweeps fill only the QFI column") {
    SweepSpec spec = golden_spec();
    spec.metric = SweepMetric::Qfi;
    const std::vector<SweepRow> rows = run_sweep(spec);
    for (const SweepRow& row : rows) {
        REQUIRE(row.error.empty()); // QFI has no degenerate points here
        REQUIRE(row.q_f.has_value());
        REQUIRE_FALSE(row.o.has_value());
        REQUIRE_FALSE(row.s.has_value());
        REQUIRE_FALSE(row.f.has_value());
        REQUIRE(*row.q_f == qfi(make_config(row.family, row.r, row.gamma, row.eta)));
    }
}

TEST_CASE("fisher sweeps add the classical information column") {
    SweepSpec spec;
    spec.metric = SweepMetric::Fisher;
    spec.families = {Family::Ch};
    spec.gammas = {0.0};
    spec.etas = {0.8};
    const std::vector<SweepRow> rows = run_sweep(spec);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].f.has_value());
    REQUIRE(rows[0].s.has_value());
    // Coherent benchmark: F = eta * N_tot.
    REQUIRE(std::abs(*rows[0].f - 0.8 * *rows[0].n_tot) <= 1e-5);
}

TEST_CASE("oracle sweeps agree with the closed-form path") {
    SweepSpec spec = golden_spec();
    spec.families = {Family::SqVac};
    spec.gammas = {1.0};
    spec.etas = {0.6};
    const std::vector<SweepRow> direct = run_sweep(spec);
    spec.oracle = true;
    const std::vector<SweepRow> brute = run_sweep(spec);
    REQUIRE(direct.size() == brute.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        REQUIRE(std::abs(*direct[i].s - *brute[i].s) <= 1e-8 * std::max(1.0, *direct[i].s));
        REQUIRE(std::abs(*direct[i].q_f - *brute[i].q_f) <= 1e-8 * std::max(1.0, *direct[i].q_f));
    }
}

TEST_CASE("sweep output is deterministic") {
    const std::string a = csv_of(run_sweep(golden_spec()));
    const std::string b = csv_of(run_sweep(golden_spec()));
    REQUIRE(a == b);
    REQUIRE(json_of(run_sweep(golden_spec())) == json_of(run_sweep(golden_spec())));
}

TEST_CASE("CSV schema is stable") {
    const std::string csv = csv_of(run_sweep(golden_spec()));
    const std::string header = csv.substr(0, csv.find('\n'));
    REQUIRE(header == "family,r,gamma,eta,phi,n_tot,q_f,o,do_dphi,var_o,s,f,error");
    REQUIRE(std::string(sweep_csv_header) == header);

    // One line per row plus the header, each with exactly 12 commas.
    std::istringstream lines(csv);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        ++count;
        REQUIRE(std::count(line.begin(), line.end(), ',') == 12);
    }
    REQUIRE(count == 25);
}

TEST_CASE("serialized sweeps match the golden files byte for byte") {
    const std::vector<SweepRow> rows = run_sweep(golden_spec());
    REQUIRE(csv_of(rows) == slurp(std::string(SQMZ_TEST_DATA_DIR) + "/golden_sweep.csv"));
    REQUIRE(json_of(rows) == slurp(std::string(SQMZ_TEST_DATA_DIR) + "/golden_sweep.json"));
}

TEST_CASE("threshold curves") {
    SweepSpec spec;
    spec.metric = SweepMetric::ThresholdQfi;
    spec.r_min = 0.0;
    spec.r_max = 1.0;
    spec.r_step = 0.5;
    const ThresholdCurve qfi_curve = run_threshold(spec);
    REQUIRE(qfi_curve.kind == SweepMetric::ThresholdQfi);
    REQUIRE(qfi_curve.points.size() == 3);
    for (const ThresholdPoint& p : qfi_curve.points) {
        REQUIRE_FALSE(p.eta.has_value());
        REQUIRE(p.gamma_threshold == threshold_gamma_qfi(p.r));
    }

    spec.metric = SweepMetric::ThresholdSens;
    spec.r_min = 0.5;
    spec.r_max = 1.0;
    spec.etas = {0.8, 1.0};
    const ThresholdCurve sens_curve = run_threshold(spec);
    REQUIRE(sens_curve.points.size() == 4);
    REQUIRE(sens_curve.points[0].r == 0.5);
    REQUIRE(*sens_curve.points[0].eta == 0.8);
    REQUIRE(*sens_curve.points[1].eta == 1.0);
    REQUIRE(sens_curve.points[1].gamma_threshold == 0.0); // vacuum family wins at (0.5, 1.0)
    REQUIRE(std::abs(sens_curve.points[2].gamma_threshold - 0.8582525729234345) <= 2e-6);
}

TEST_CASE("infinite thresholds spell inf in both formats") {
    ThresholdCurve curve;
    curve.kind = SweepMetric::ThresholdSens;
    curve.points.push_back({0.5, 0.9, std::numeric_limits<double>::infinity()});

    std::ostringstream csv;
    write_threshold_csv(curve, csv);
    REQUIRE(csv.str() == "kind,r,eta,gamma_threshold\nsensitivity,0.5,0.9,inf\n");

    std::ostringstream js;
    write_threshold_json(curve, js);
    const auto parsed = nlohmann::json::parse(js.str());
    REQUIRE(parsed.at(0).at("gamma_threshold") == "inf");
    REQUIRE(parsed.at(0).at("kind") == "sensitivity");
}

TEST_CASE("shortest-round-trip number formatting") {
    REQUIRE(format_double(0.25) == "0.25");
    REQUIRE(format_double(0.0) == "0");
    REQUIRE(format_double(2.0) == "2");
    REQUIRE(format_double(std::numeric_limits<double>::infinity()) == "inf");
    REQUIRE(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    const double v = 0.1 + 0.2;
    REQUIRE(std::stod(format_double(v)) == v); // round-trips exactly
}

TEST_CASE("spec JSON parsing") {
    const nlohmann::json j = {
        {"metric", "qfi"},
        {"families", {"SqVac", "Ch"}},
        {"r_min", 0.25},
        {"r_max", 0.75},
        {"r_step", 0.25},
        {"gammas", {0.5, 1.5}},
        {"etas", {0.9}},
        {"phi", 1.0},
        {"format", "json"},
        {"oracle", true},
        {"dims", 32},
    };
    const SweepSpec spec = sweep_spec_from_json(j);
    REQUIRE(spec.metric == SweepMetric::Qfi);
    REQUIRE(spec.families.size() == 2);
    REQUIRE(spec.families[0] == Family::SqVac);
    REQUIRE(spec.r_min == 0.25);
    REQUIRE(spec.r_max == 0.75);
    REQUIRE(spec.gammas == std::vector<double>{0.5, 1.5});
    REQUIRE(spec.etas == std::vector<double>{0.9});
    REQUIRE(spec.phi == 1.0);
    REQUIRE(spec.format == OutputFormat::Json);
    REQUIRE(spec.oracle);
    REQUIRE(spec.dims == 32);

    // Absent keys keep the base values.
    const SweepSpec partial = sweep_spec_from_json(nlohmann::json{{"r_max", 2.0}});
    REQUIRE(partial.metric == SweepMetric::Sensitivity);
    REQUIRE(partial.r_max == 2.0);
    REQUIRE(partial.families.size() == 3);

    REQUIRE_THROWS_AS(sweep_spec_from_json(nlohmann::json{{"rmax", 2.0}}), SpecValidation);
    REQUIRE_THROWS_AS(sweep_spec_from_json(nlohmann::json::array()), SpecValidation);
    REQUIRE_THROWS_AS(sweep_spec_from_json(nlohmann::json{{"metric", "entropy"}}), SpecValidation);
    REQUIRE_THROWS_AS(sweep_spec_from_json(nlohmann::json{{"gammas", "one"}}), SpecValidation);
    REQUIRE_THROWS_AS(sweep_spec_from_json(nlohmann::json{{"families", {"SqSPh", "Foo"}}}),
                      ParameterRange);
}

TEST_CASE("metric and format names round-trip") {
    for (SweepMetric m : {SweepMetric::Qfi, SweepMetric::Sensitivity, SweepMetric::Fisher,
                          SweepMetric::ThresholdQfi, SweepMetric::ThresholdSens})
        REQUIRE(metric_from_name(metric_name(m)) == m);
    REQUIRE_THROWS_AS(metric_from_name("variance"), SpecValidation);
    REQUIRE(format_from_name("csv") == OutputFormat::Csv);
    REQUIRE(format_from_name("json") == OutputFormat::Json);
    REQUIRE_THROWS_AS(format_from_name("yaml"), SpecValidation);
}
