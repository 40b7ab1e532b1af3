#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "metrology.hpp"
#include "source.hpp"
#include "units.hpp"

namespace sqmz {

struct VerifyOptions {
    int dims = 0;     // force this truncated-basis size on every oracle call
    std::string only; // run a single named check ("" = all)
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double seconds = 0.0;
    std::string detail; // empty on a clean pass
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_passed() const {
        for (const CheckResult& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

namespace detail {

inline bool close_abs(double x, double y, double tol) { return std::abs(x - y) <= tol; }

// Mixed absolute/relative comparison used for oracle equivalence.
inline bool close_mixed(double x, double y, double rel) {
    return std::abs(x - y) <= rel * std::max({1.0, std::abs(x), std::abs(y)});
}

// "" = pass; otherwise a short failure description.
using CheckFn = std::function<std::string(const VerifyOptions&)>;

struct CheckDef {
    const char* name;
    double budget_seconds; // 0 = no budget
    CheckFn run;
};

inline std::string check_coherent_benchmark(const VerifyOptions&) {
    constexpr double half_pi = 1.5707963267948966;
    for (int n = 1; n <= 100; ++n)
        for (double eta : {0.4, 0.8, 1.0}) {
            const SourceConfig config = from_energy(Family::Ch, 0.0, static_cast<double>(n), eta);
            const double q = qfi(config);
            if (!close_abs(q, 2.0 * n, 1e-10)) {
                std::ostringstream msg;
                msg << "Q_F(Ch, N=" << n << ") = " << q << ", expected " << 2.0 * n;
                return msg.str();
            }
            const MetricRecord rec = sensitivity(config, half_pi);
            const double target = 1.0 / std::sqrt(eta * n);
            if (!close_abs(rec.s, target, 1e-10)) {
                std::ostringstream msg;
                msg << "s(Ch, N=" << n << ", eta=" << eta << ") = " << rec.s << ", expected "
                    << target;
                return msg.str();
            }
        }
    return {};
}

inline std::string check_qfi_threshold(const VerifyOptions& opts) {
    const double at_zero = threshold_gamma_qfi(0.0);
    if (!close_abs(at_zero, 1.0 / std::sqrt(2.0), 1e-15))
        return "gamma_th(0) = " + std::to_string(at_zero) + ", expected 2^{-1/2}";

    for (double r = 0.0; r <= 1.5 + 1e-12; r += 0.25) {
        const double closed = threshold_gamma_qfi(r);
        const double rooted = threshold_gamma_qfi_root(r);
        if (!close_abs(closed, rooted, 1e-6)) {
            std::ostringstream msg;
            msg << "closed form vs bisection at r=" << r << ": " << closed << " vs " << rooted;
            return msg.str();
        }
    }

    // Consistency anchor at the r=0 threshold: both families give Q_F = 3,
    // brute-force as well as analytically.
    const double g0 = 1.0 / std::sqrt(2.0);
    for (Family family : {Family::SqSPh, Family::SqVac}) {
        const SourceConfig config = make_config(family, 0.0, g0);
        const double analytic = qfi(config);
        const double brute = oracle_qfi(config, opts.dims);
        if (!close_abs(analytic, 3.0, 1e-12) || !close_mixed(brute, 3.0, 1e-8)) {
            std::ostringstream msg;
            msg << "Q_F(" << family_name(family) << ", r=0, gamma=2^{-1/2}) = " << analytic
                << " (analytic) / " << brute << " (brute force), expected 3";
            return msg.str();
        }
    }
    return {};
}

inline std::string check_oracle_equivalence(const VerifyOptions& opts) {
    constexpr double pi = 3.141592653589793;
    for (double r : {0.0, 0.5, 1.0})
        for (double gamma : {0.0, 1.0, 2.0})
            for (Family family : {Family::SqSPh, Family::SqVac, Family::Ch})
                for (double eta : {0.6, 1.0})
                    for (double phi : {pi / 4.0, pi / 2.0}) {
                        const SourceConfig config = make_config(family, r, gamma, eta);
                        std::ostringstream at;
                        at << family_name(family) << ", r=" << r << ", gamma=" << gamma
                           << ", eta=" << eta << ", phi=" << phi;

                        bool analytic_degenerate = false, oracle_degenerate = false;
                        MetricRecord a{}, b{};
                        try {
                            a = sensitivity(config, phi);
                        } catch (const DegenerateWorkingPoint&) {
                            analytic_degenerate = true;
                        }
                        try {
                            b = oracle_metrics(config, phi, opts.dims);
                        } catch (const DegenerateWorkingPoint&) {
                            oracle_degenerate = true;
                        } catch (const Error& e) {
                            return "oracle failed at " + at.str() + ": " + e.what();
                        }

                        if (analytic_degenerate != oracle_degenerate)
                            return "degeneracy disagreement at " + at.str();
                        if (analytic_degenerate) {
                            // Slope is zero on both paths; Q_F is still well
                            // defined and must match.
                            const double qa = qfi(config);
                            const double qb = oracle_qfi(config, opts.dims);
                            if (!close_mixed(qa, qb, 1e-8))
                                return "Q_F mismatch at degenerate point " + at.str();
                            continue;
                        }

                        const struct {
                            const char* label;
                            double analytic, oracle;
                        } fields[] = {{"Q_F", a.q_f, b.q_f},
                                      {"O", a.o, b.o},
                                      {"dO_dphi", a.do_dphi, b.do_dphi},
                                      {"var_O", a.var_o, b.var_o},
                                      {"s", a.s, b.s}};
                        for (const auto& f : fields)
                            if (!close_mixed(f.analytic, f.oracle, 1e-8)) {
                                std::ostringstream msg;
                                msg << f.label << " mismatch at " << at.str() << ": analytic "
                                    << f.analytic << " vs oracle " << f.oracle;
                                return msg.str();
                            }
                    }
    return {};
}

inline std::string check_degenerate_identity(const VerifyOptions&) {
    constexpr double half_pi = 1.5707963267948966;
    for (double r = 0.2; r <= 1.4 + 1e-12; r += 0.2)
        for (double eta : {0.4, 0.8, 1.0}) {
            const SourceConfig config = make_config(Family::SqSPh, r, 0.0, eta);
            const MetricRecord rec = sensitivity(config, half_pi);
            const double target = 1.0 / std::sqrt(eta * config.n_total());
            if (!close_abs(rec.s, target, 1e-10)) {
                std::ostringstream msg;
                msg << "s(SqSPh, gamma=0, r=" << r << ", eta=" << eta << ") = " << rec.s
                    << ", expected (eta N)^{-1/2} = " << target;
                return msg.str();
            }
        }
    return {};
}

inline std::string check_heisenberg_asymptote(const VerifyOptions&) {
    for (Family family : {Family::SqSPh, Family::SqVac}) {
        const AsymptoteReport rep = asymptote_report(family, 1.0, 1.0, 7);
        if (!rep.qf_within_tol) {
            std::ostringstream msg;
            msg << "Q_F/N^2 for " << family_name(family) << " at r=7 is "
                << rep.rows.back().qf_ratio << ", not within 5% of " << rep.qf_target;
            return msg.str();
        }
        if (!rep.qf_monotone_approach)
            return std::string("Q_F/N^2 approach not monotone over r in {5,6,7} for ") +
                   family_name(family);
    }
    return {};
}

inline std::string check_shotnoise_asymptote(const VerifyOptions&) {
    for (double eta : {0.4, 0.8, 1.0})
        for (Family family : {Family::SqSPh, Family::SqVac}) {
            const AsymptoteReport rep = asymptote_report(family, 1.0, eta, 7);
            if (!rep.s_within_tol) {
                std::ostringstream msg;
                msg << "normalized s*sqrt(eta N) for " << family_name(family) << " at eta=" << eta
                    << " is " << rep.rows.back().s_normalized << ", not within 5% of 1";
                return msg.str();
            }
        }
    return {};
}

inline std::string check_bound_chain(const VerifyOptions& opts) {
    constexpr double pi = 3.141592653589793;
    constexpr double slack = 1e-4;
    for (double r : {0.0, 0.5, 1.0})
        for (double gamma : {0.0, 1.0, 2.0})
            for (Family family : {Family::SqSPh, Family::SqVac, Family::Ch})
                for (double eta : {0.6, 1.0})
                    for (double phi : {pi / 4.0, pi / 2.0}) {
                        const SourceConfig config = make_config(family, r, gamma, eta);
                        std::ostringstream at;
                        at << family_name(family) << ", r=" << r << ", gamma=" << gamma
                           << ", eta=" << eta << ", phi=" << phi;

                        double s = std::numeric_limits<double>::infinity();
                        try {
                            s = sensitivity(config, phi).s;
                        } catch (const DegenerateWorkingPoint&) {
                            // zero slope: s = +inf, lower bounds hold trivially
                        }
                        double fisher = 0.0;
                        try {
                            fisher = classical_fisher(config, phi, opts.dims);
                        } catch (const Error& e) {
                            return "classical Fisher failed at " + at.str() + ": " + e.what();
                        }
                        const double q = qfi(config);

                        if (fisher > q + 1e-6) {
                            std::ostringstream msg;
                            msg << "F = " << fisher << " exceeds Q_F = " << q << " at " << at.str();
                            return msg.str();
                        }
                        if (fisher > 0.0 && s < (1.0 - slack) / std::sqrt(fisher)) {
                            std::ostringstream msg;
                            msg << "s = " << s << " violates (1-1e-4)/sqrt(F) = "
                                << (1.0 - slack) / std::sqrt(fisher) << " at " << at.str();
                            return msg.str();
                        }
                    }
    return {};
}

inline std::string check_threshold_monotonicity(const VerifyOptions&) {
    for (double r : {0.5, 1.0, 1.5}) {
        const double t04 = threshold_gamma_sens(r, 0.4);
        const double t08 = threshold_gamma_sens(r, 0.8);
        const double t10 = threshold_gamma_sens(r, 1.0);
        if (!(t04 + 1e-9 >= t08 && t08 + 1e-9 >= t10)) {
            std::ostringstream msg;
            msg << "threshold not nonincreasing in eta at r=" << r << ": " << t04 << ", " << t08
                << ", " << t10;
            return msg.str();
        }
    }
    return {};
}

inline std::string check_crossing_structure(const VerifyOptions&) {
    constexpr double half_pi = 1.5707963267948966;
    const auto gap = [&](double r) { // s(SqSPh) - s(SqVac) at gamma=1, eta=1
        const auto s_of = [&](Family family) {
            try {
                return sensitivity(make_config(family, r, 1.0, 1.0), half_pi).s;
            } catch (const DegenerateWorkingPoint&) {
                return std::numeric_limits<double>::infinity();
            }
        };
        return s_of(Family::SqSPh) - s_of(Family::SqVac);
    };

    int sign_changes = 0;
    double prev = gap(0.01);
    const bool starts_positive = prev > 0.0;
    for (double r = 0.02; r <= 1.99 + 1e-9; r += 0.01) {
        const double cur = gap(r);
        if ((cur > 0.0) != (prev > 0.0)) ++sign_changes;
        prev = cur;
    }
    if (sign_changes != 1) {
        std::ostringstream msg;
        msg << "expected exactly one sign change of s(SqSPh)-s(SqVac) on r in (0,2), found "
            << sign_changes;
        return msg.str();
    }
    if (!starts_positive || prev > 0.0)
        return "crossing direction wrong: expected SqSPh worse at small r, better at large r";
    return {};
}

inline std::string check_unit_anchor(const VerifyOptions&) {
    const double db = db_from_r(1.38);
    if (!(db >= 11.9 && db <= 12.1))
        return "db_from_r(1.38) = " + std::to_string(db) + ", outside [11.9, 12.1]";
    const double r = r_from_db(db_from_r(0.8));
    if (!close_abs(r, 0.8, 1e-12)) return "dB round-trip failed at r=0.8";
    return {};
}

inline const std::vector<CheckDef>& verification_checks() {
    static const std::vector<CheckDef> defs = {
        {"coherent-benchmark", 1.0, check_coherent_benchmark},
        {"qfi-threshold", 5.0, check_qfi_threshold},
        {"oracle-equivalence", 60.0, check_oracle_equivalence},
        {"degenerate-identity", 0.0, check_degenerate_identity},
        {"heisenberg-asymptote", 0.0, check_heisenberg_asymptote},
        {"shotnoise-asymptote", 0.0, check_shotnoise_asymptote},
        {"bound-chain", 120.0, check_bound_chain},
        {"threshold-monotonicity", 0.0, check_threshold_monotonicity},
        {"crossing-structure", 0.0, check_crossing_structure},
        {"unit-anchor", 0.0, check_unit_anchor},
    };
    return defs;
}

} // namespace detail

// Runs the named verification checks (all by default). Failures land in the
// report; only an unknown `only` name throws.
inline VerifyReport verify(const VerifyOptions& opts = {}) {
    const auto& defs = detail::verification_checks();
    if (!opts.only.empty()) {
        bool known = false;
        for (const auto& def : defs) known = known || opts.only == def.name;
        if (!known) throw SpecValidation("unknown verification check '" + opts.only + "'");
    }

    VerifyReport report;
    for (const auto& def : defs) {
        if (!opts.only.empty() && opts.only != def.name) continue;
        CheckResult result;
        result.name = def.name;
        const auto start = std::chrono::steady_clock::now();
        try {
            result.detail = def.run(opts);
            result.passed = result.detail.empty();
        } catch (const std::exception& e) {
            result.passed = false;
            result.detail = e.what();
        }
        result.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (result.passed && def.budget_seconds > 0.0 && result.seconds > def.budget_seconds) {
            result.passed = false;
            std::ostringstream msg;
            msg << "runtime " << result.seconds << " s exceeded the " << def.budget_seconds
                << " s budget";
            result.detail = msg.str();
        }
        report.checks.push_back(std::move(result));
    }
    return report;
}

inline nlohmann::ordered_json verify_report_json(const VerifyReport& report) {
    nlohmann::ordered_json j;
    j["all_passed"] = report.all_passed();
    j["checks"] = nlohmann::ordered_json::array();
    for (const CheckResult& c : report.checks) {
        nlohmann::ordered_json cj;
        cj["name"] = c.name;
        cj["passed"] = c.passed;
        cj["seconds"] = c.seconds;
        cj["detail"] = c.detail;
        j["checks"].push_back(cj);
    }
    return j;
}

} // namespace sqmz
