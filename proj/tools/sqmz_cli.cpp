// Command-line front end: parameter sweeps, threshold curves, the built-in
// verification suite, and squeezing-unit conversion.
//
// Exit codes: 0 on success, 1 on validation/usage errors, 2 when the
// verification suite reports a failure.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <sqmz/sqmz.hpp>

namespace {

// Relative output paths are joined onto SQMZ_OUTPUT_DIR when it is set;
// absolute paths and "-" (stdout) pass through untouched.
std::string resolve_output_path(const std::string& path) {
    if (path.empty() || path == "-" || path.front() == '/') return path;
    const char* dir = std::getenv("SQMZ_OUTPUT_DIR");
    if (dir == nullptr || *dir == '\0') return path;
    std::string joined = dir;
    if (joined.back() != '/') joined += '/';
    return joined + path;
}

// Runs `writer` against stdout or the resolved file path.
int with_output(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    const std::string resolved = resolve_output_path(path);
    if (resolved.empty() || resolved == "-") {
        writer(std::cout);
        return std::cout.good() ? 0 : 1;
    }
    std::ofstream file(resolved);
    if (!file) {
        std::cerr << "error: cannot open output file '" << resolved << "'\n";
        return 1;
    }
    writer(file);
    if (!file.good()) {
        std::cerr << "error: writing to '" << resolved << "' failed\n";
        return 1;
    }
    return 0;
}

// Option holders shared by the sweep and threshold subcommands.
struct GridFlags {
    std::string metric, format, spec_path, out;
    std::vector<std::string> families;
    double r_min = 0.0, r_max = 0.0, r_step = 0.25, phi = 0.0;
    std::vector<double> gammas, etas;
    bool oracle = false;
    int dims = 0;
};

void add_grid_options(CLI::App& cmd, GridFlags& flags) {
    cmd.add_option("--spec", flags.spec_path, "JSON file with SweepSpec fields (flags override)");
    cmd.add_option("--metric", flags.metric,
                   "metric: qfi, sensitivity, fisher, threshold-qfi, threshold-sens");
    cmd.add_option("--family", flags.families, "families to evaluate (SqSPh, SqVac, Ch)")
        ->delimiter(',');
    cmd.add_option("--r-min", flags.r_min, "first squeezing value of the r-grid");
    cmd.add_option("--r-max", flags.r_max, "last squeezing value of the r-grid");
    cmd.add_option("--r-step", flags.r_step, "r-grid step (default 0.25)");
    cmd.add_option("--gamma", flags.gammas, "coherent-amplitude values")->delimiter(',');
    cmd.add_option("--eta", flags.etas, "detector efficiencies in (0,1]")->delimiter(',');
    cmd.add_option("--phi", flags.phi, "working-point phase in radians (default pi/2)");
    cmd.add_option("--format", flags.format, "output format: csv (default) or json");
    cmd.add_flag("--oracle", flags.oracle, "force the truncated-Fock brute-force path");
    cmd.add_option("--dims", flags.dims, "truncated-basis size override (0 = automatic)");
    cmd.add_option("--out", flags.out, "output file (default stdout; relative paths join "
                                       "SQMZ_OUTPUT_DIR when set)");
}

sqmz::SweepSpec build_spec(const CLI::App& cmd, const GridFlags& flags,
                           sqmz::SweepMetric default_metric) {
    sqmz::SweepSpec spec;
    spec.metric = default_metric;

    if (cmd.count("--spec") > 0) {
        std::ifstream file(flags.spec_path);
        if (!file) throw sqmz::SpecValidation("cannot open spec file '" + flags.spec_path + "'");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(file);
        } catch (const nlohmann::json::exception& e) {
            throw sqmz::SpecValidation(std::string("spec file is not valid JSON: ") + e.what());
        }
        spec = sqmz::sweep_spec_from_json(j, spec);
    }

    if (cmd.count("--metric") > 0) spec.metric = sqmz::metric_from_name(flags.metric);
    if (cmd.count("--family") > 0) {
        spec.families.clear();
        for (const std::string& f : flags.families)
            spec.families.push_back(sqmz::family_from_name(f));
    }
    if (cmd.count("--r-min") > 0) spec.r_min = flags.r_min;
    if (cmd.count("--r-max") > 0) spec.r_max = flags.r_max;
    if (cmd.count("--r-step") > 0) spec.r_step = flags.r_step;
    if (cmd.count("--gamma") > 0) spec.gammas = flags.gammas;
    if (cmd.count("--eta") > 0) spec.etas = flags.etas;
    if (cmd.count("--phi") > 0) spec.phi = flags.phi;
    if (cmd.count("--format") > 0) spec.format = sqmz::format_from_name(flags.format);
    if (cmd.count("--oracle") > 0) spec.oracle = flags.oracle;
    if (cmd.count("--dims") > 0) spec.dims = flags.dims;
    return spec;
}

int run_sweep_command(const CLI::App& cmd, const GridFlags& flags) {
    const sqmz::SweepSpec spec = build_spec(cmd, flags, sqmz::SweepMetric::Sensitivity);
    const std::vector<sqmz::SweepRow> rows = sqmz::run_sweep(spec);
    return with_output(flags.out, [&](std::ostream& os) {
        if (spec.format == sqmz::OutputFormat::Csv)
            sqmz::write_sweep_csv(rows, os);
        else
            sqmz::write_sweep_json(rows, os);
    });
}

int run_threshold_command(const CLI::App& cmd, const GridFlags& flags) {
    const sqmz::SweepSpec spec = build_spec(cmd, flags, sqmz::SweepMetric::ThresholdQfi);
    const sqmz::ThresholdCurve curve = sqmz::run_threshold(spec);
    return with_output(flags.out, [&](std::ostream& os) {
        if (spec.format == sqmz::OutputFormat::Csv)
            sqmz::write_threshold_csv(curve, os);
        else
            sqmz::write_threshold_json(curve, os);
    });
}

int run_verify_command(const sqmz::VerifyOptions& opts, bool as_json, const std::string& out) {
    const sqmz::VerifyReport report = sqmz::verify(opts);
    const int io_status = with_output(out, [&](std::ostream& os) {
        if (as_json) {
            os << sqmz::verify_report_json(report).dump(2) << '\n';
            return;
        }
        for (const sqmz::CheckResult& c : report.checks) {
            os << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << " (" << c.seconds << " s)";
            if (!c.detail.empty()) os << ": " << c.detail;
            os << '\n';
        }
        std::size_t passed = 0;
        for (const sqmz::CheckResult& c : report.checks) passed += c.passed ? 1 : 0;
        os << passed << "/" << report.checks.size() << " checks passed\n";
    });
    if (io_status != 0) return io_status;
    return report.all_passed() ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mach-Zehnder metrology with squeezed single-photon and squeezed-vacuum "
                 "sources: parameter sweeps, threshold curves, verification, unit conversion"};
    app.require_subcommand(1);

    GridFlags sweep_flags;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "evaluate metrics over a parameter grid");
    add_grid_options(*sweep_cmd, sweep_flags);

    GridFlags threshold_flags;
    CLI::App* threshold_cmd =
        app.add_subcommand("threshold", "trace gamma-threshold curves over an r-grid");
    add_grid_options(*threshold_cmd, threshold_flags);

    sqmz::VerifyOptions verify_opts;
    bool verify_json = false;
    std::string verify_out;
    CLI::App* verify_cmd = app.add_subcommand("verify", "run the built-in verification suite");
    verify_cmd->add_option("--dims", verify_opts.dims,
                           "force this truncated-basis size on every oracle call");
    verify_cmd->add_option("--only", verify_opts.only, "run a single named check");
    verify_cmd->add_flag("--json", verify_json, "emit a JSON report instead of text");
    verify_cmd->add_option("--out", verify_out, "output file (default stdout)");

    double convert_value = 0.0;
    std::string convert_direction;
    CLI::App* convert_cmd =
        app.add_subcommand("convert-db", "convert between squeezing r and decibels");
    convert_cmd->add_option("value", convert_value, "value to convert")->required();
    convert_cmd
        ->add_option("--direction", convert_direction, "conversion direction: r-to-db or db-to-r")
        ->required()
        ->check(CLI::IsMember({"r-to-db", "db-to-r"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sweep_cmd->parsed()) return run_sweep_command(*sweep_cmd, sweep_flags);
        if (threshold_cmd->parsed()) return run_threshold_command(*threshold_cmd, threshold_flags);
        if (verify_cmd->parsed()) return run_verify_command(verify_opts, verify_json, verify_out);
        if (convert_cmd->parsed()) {
            const double result = convert_direction == "r-to-db"
                                      ? sqmz::db_from_r(convert_value)
                                      : sqmz::r_from_db(convert_value);
            std::cout << sqmz::format_double(result) << '\n';
            return 0;
        }
    } catch (const sqmz::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
