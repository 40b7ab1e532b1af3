#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "metrology.hpp"
#include "source.hpp"

namespace sqmz {

enum class SweepMetric { Qfi, Sensitivity, Fisher, ThresholdQfi, ThresholdSens };

inline const char* metric_name(SweepMetric m) {
    switch (m) {
        case SweepMetric::Qfi: return "qfi";
        case SweepMetric::Sensitivity: return "sensitivity";
        case SweepMetric::Fisher: return "fisher";
        case SweepMetric::ThresholdQfi: return "threshold-qfi";
        case SweepMetric::ThresholdSens: return "threshold-sens";
    }
    return "?";
}

inline SweepMetric metric_from_name(const std::string& name) {
    if (name == "qfi") return SweepMetric::Qfi;
    if (name == "sensitivity") return SweepMetric::Sensitivity;
    if (name == "fisher") return SweepMetric::Fisher;
    if (name == "threshold-qfi") return SweepMetric::ThresholdQfi;
    if (name == "threshold-sens") return SweepMetric::ThresholdSens;
    throw SpecValidation("unknown metric '" + name +
                         "' (expected qfi, sensitivity, fisher, threshold-qfi, threshold-sens)");
}

enum class OutputFormat { Csv, Json };

inline OutputFormat format_from_name(const std::string& name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw SpecValidation("unknown output format '" + name + "' (expected csv or json)");
}

// Full description of one sweep run. The r-grid is r_min, r_min + r_step, ...
// up to and including r_max (within rounding slack).
struct SweepSpec {
    SweepMetric metric = SweepMetric::Sensitivity;
    std::vector<Family> families{Family::SqSPh, Family::SqVac, Family::Ch};
    double r_min = 0.0;
    double r_max = 0.0;
    double r_step = 0.25;
    std::vector<double> gammas{1.0};
    std::vector<double> etas{1.0};
    double phi = 1.5707963267948966; // pi/2, the default working point
    OutputFormat format = OutputFormat::Csv;
    bool oracle = false; // force the truncated-Fock path
    int dims = 0;        // oracle basis override (0 = automatic sizing)
};

inline std::vector<double> r_grid(const SweepSpec& spec) {
    std::vector<double> grid;
    const double slack = 1e-9 * spec.r_step;
    for (int i = 0;; ++i) {
        const double r = spec.r_min + i * spec.r_step;
        if (r > spec.r_max + slack) break;
        grid.push_back(r);
    }
    return grid;
}

inline void validate(const SweepSpec& spec) {
    if (spec.families.empty()) throw SpecValidation("family list must not be empty");
    if (spec.gammas.empty()) throw SpecValidation("gamma list must not be empty");
    if (spec.etas.empty()) throw SpecValidation("eta list must not be empty");
    if (!(spec.r_step > 0.0)) throw SpecValidation("r_step must be positive");
    if (!(spec.r_min >= 0.0)) throw SpecValidation("r_min must be non-negative");
    if (!(spec.r_max >= spec.r_min)) throw SpecValidation("r_max must be >= r_min");
    for (double g : spec.gammas)
        if (!(g >= 0.0)) throw SpecValidation("gamma values must be non-negative");
    for (double e : spec.etas)
        if (!(e > 0.0 && e <= 1.0)) throw SpecValidation("eta values must lie in (0, 1]");
    if (spec.metric == SweepMetric::Sensitivity || spec.metric == SweepMetric::Fisher) {
        constexpr double pi = 3.141592653589793;
        if (!(spec.phi > 0.0 && spec.phi < pi))
            throw SpecValidation("phi must lie in (0, pi) for sensitivity evaluation");
    }
    if (spec.metric == SweepMetric::ThresholdSens && !(spec.r_min > 0.0))
        throw SpecValidation("threshold-sens requires r_min > 0");
    if (spec.dims < 0) throw SpecValidation("dims override must be non-negative");
}

// One output row; absent metrics stay empty in CSV and null in JSON.
struct SweepRow {
    Family family = Family::SqSPh;
    double r = 0.0;
    double gamma = 0.0;
    double eta = 1.0;
    double phi = 0.0;
    std::optional<double> n_tot, q_f, o, do_dphi, var_o, s, f;
    std::string error; // empty when the point evaluated cleanly
};

namespace detail {

// Runs fn(0..n-1), each index exactly once, distributing indices over
// hardware threads. Callers hand out disjoint result slots, so completion
// order never affects output order.
template <typename Fn>
inline void parallel_for_slots(std::size_t n, Fn&& fn) {
    const std::size_t hw = std::thread::hardware_concurrency();
    const std::size_t workers = std::min(n, std::max<std::size_t>(1, hw));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::future<void>> tasks;
    tasks.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        tasks.push_back(std::async(std::launch::async, [&fn, n, w, workers] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        }));
    for (auto& t : tasks) t.get();
}

} // namespace detail

// Evaluates the grid in deterministic row order: r outermost, then gamma,
// then eta, then the family list. Points that fail with a domain error (a
// degenerate working point, say) become rows with the error column set.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    validate(spec);
    if (spec.metric != SweepMetric::Qfi && spec.metric != SweepMetric::Sensitivity &&
        spec.metric != SweepMetric::Fisher)
        throw SpecValidation("run_sweep handles qfi, sensitivity, and fisher metrics; "
                             "use run_threshold for threshold curves");

    const std::vector<double> rs = r_grid(spec);
    const std::size_t n_points =
        rs.size() * spec.gammas.size() * spec.etas.size() * spec.families.size();
    std::vector<SweepRow> rows(n_points);

    detail::parallel_for_slots(n_points, [&](std::size_t idx) {
        std::size_t rest = idx;
        const std::size_t fi = rest % spec.families.size();
        rest /= spec.families.size();
        const std::size_t ei = rest % spec.etas.size();
        rest /= spec.etas.size();
        const std::size_t gi = rest % spec.gammas.size();
        const std::size_t ri = rest / spec.gammas.size();

        SweepRow& row = rows[idx];
        row.family = spec.families[fi];
        row.r = rs[ri];
        row.gamma = spec.gammas[gi];
        row.eta = spec.etas[ei];
        row.phi = spec.phi;

        try {
            const SourceConfig config = make_config(row.family, row.r, row.gamma, row.eta);
            row.n_tot = config.n_total();
            switch (spec.metric) {
                case SweepMetric::Qfi:
                    row.q_f = spec.oracle ? oracle_qfi(config, spec.dims) : qfi(config);
                    break;
                case SweepMetric::Sensitivity:
                case SweepMetric::Fisher: {
                    const MetricRecord rec = spec.oracle
                                                 ? oracle_metrics(config, spec.phi, spec.dims)
                                                 : sensitivity(config, spec.phi);
                    row.q_f = rec.q_f;
                    row.o = rec.o;
                    row.do_dphi = rec.do_dphi;
                    row.var_o = rec.var_o;
                    row.s = rec.s;
                    if (spec.metric == SweepMetric::Fisher)
                        row.f = classical_fisher(config, spec.phi, spec.dims);
                    break;
                }
                default: break;
            }
        } catch (const Error& e) {
            row.error = e.what();
        }
    });
    return rows;
}

// One point of a threshold curve; eta is meaningful for the sensitivity kind
// only, and gamma_threshold may carry the +inf sentinel.
struct ThresholdPoint {
    double r = 0.0;
    std::optional<double> eta;
    double gamma_threshold = 0.0;
};

struct ThresholdCurve {
    SweepMetric kind = SweepMetric::ThresholdQfi;
    std::vector<ThresholdPoint> points;
};

inline ThresholdCurve run_threshold(const SweepSpec& spec) {
    validate(spec);
    if (spec.metric != SweepMetric::ThresholdQfi && spec.metric != SweepMetric::ThresholdSens)
        throw SpecValidation("run_threshold handles threshold-qfi and threshold-sens metrics");

    const std::vector<double> rs = r_grid(spec);
    ThresholdCurve curve;
    curve.kind = spec.metric;

    if (spec.metric == SweepMetric::ThresholdQfi) {
        curve.points.resize(rs.size());
        detail::parallel_for_slots(rs.size(), [&](std::size_t i) {
            curve.points[i] = ThresholdPoint{rs[i], std::nullopt, threshold_gamma_qfi(rs[i])};
        });
        return curve;
    }

    curve.points.resize(rs.size() * spec.etas.size());
    detail::parallel_for_slots(curve.points.size(), [&](std::size_t idx) {
        const std::size_t ei = idx % spec.etas.size();
        const std::size_t ri = idx / spec.etas.size();
        curve.points[idx] =
            ThresholdPoint{rs[ri], spec.etas[ei], threshold_gamma_sens(rs[ri], spec.etas[ei])};
    });
    return curve;
}

// --- serialization ----------------------------------------------------------

// Shortest round-trip decimal form; infinities spell "inf" in both formats.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string opt_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

inline nlohmann::ordered_json opt_json(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json row_json(const SweepRow& row) {
    nlohmann::ordered_json j;
    j["family"] = family_name(row.family);
    j["r"] = row.r;
    j["gamma"] = row.gamma;
    j["eta"] = row.eta;
    j["phi"] = row.phi;
    j["n_tot"] = opt_json(row.n_tot);
    j["q_f"] = opt_json(row.q_f);
    j["o"] = opt_json(row.o);
    j["do_dphi"] = opt_json(row.do_dphi);
    j["var_o"] = opt_json(row.var_o);
    j["s"] = opt_json(row.s);
    j["f"] = opt_json(row.f);
    j["error"] = row.error.empty() ? nlohmann::ordered_json(nullptr)
                                   : nlohmann::ordered_json(row.error);
    return j;
}

} // namespace detail

inline constexpr const char* sweep_csv_header =
    "family,r,gamma,eta,phi,n_tot,q_f,o,do_dphi,var_o,s,f,error";

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << sweep_csv_header << '\n';
    for (const SweepRow& row : rows) {
        out << family_name(row.family) << ',' << format_double(row.r) << ','
            << format_double(row.gamma) << ',' << format_double(row.eta) << ','
            << format_double(row.phi) << ',' << detail::opt_cell(row.n_tot) << ','
            << detail::opt_cell(row.q_f) << ',' << detail::opt_cell(row.o) << ','
            << detail::opt_cell(row.do_dphi) << ',' << detail::opt_cell(row.var_o) << ','
            << detail::opt_cell(row.s) << ',' << detail::opt_cell(row.f) << ','
            << detail::csv_escape(row.error) << '\n';
    }
}

inline void write_sweep_json(const std::vector<SweepRow>& rows, std::ostream& out) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const SweepRow& row : rows) arr.push_back(detail::row_json(row));
    out << arr.dump(2) << '\n';
}

inline void write_threshold_csv(const ThresholdCurve& curve, std::ostream& out) {
    out << "kind,r,eta,gamma_threshold\n";
    const char* kind = curve.kind == SweepMetric::ThresholdQfi ? "qfi" : "sensitivity";
    for (const ThresholdPoint& p : curve.points) {
        out << kind << ',' << format_double(p.r) << ',' << detail::opt_cell(p.eta) << ','
            << format_double(p.gamma_threshold) << '\n';
    }
}

inline void write_threshold_json(const ThresholdCurve& curve, std::ostream& out) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    const char* kind = curve.kind == SweepMetric::ThresholdQfi ? "qfi" : "sensitivity";
    for (const ThresholdPoint& p : curve.points) {
        nlohmann::ordered_json j;
        j["kind"] = kind;
        j["r"] = p.r;
        j["eta"] = detail::opt_json(p.eta);
        j["gamma_threshold"] = std::isinf(p.gamma_threshold)
                                   ? nlohmann::ordered_json("inf")
                                   : nlohmann::ordered_json(p.gamma_threshold);
        arr.push_back(j);
    }
    out << arr.dump(2) << '\n';
}

// --- JSON spec files --------------------------------------------------------

// Parses a SweepSpec from JSON with the same keys as the CLI flags; fields
// absent from the JSON keep their values from `spec`. Unknown keys are
// rejected so typos fail loudly instead of silently using defaults.
inline SweepSpec sweep_spec_from_json(const nlohmann::json& j, SweepSpec spec = SweepSpec{}) {
    if (!j.is_object()) throw SpecValidation("spec JSON must be an object");
    static const char* known[] = {"metric", "families", "r_min",  "r_max", "r_step", "gammas",
                                  "etas",   "phi",      "format", "oracle", "dims"};
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || item.key() == k;
        if (!ok) throw SpecValidation("unknown spec key '" + item.key() + "'");
    }

    try {
        if (j.contains("metric")) spec.metric = metric_from_name(j.at("metric").get<std::string>());
        if (j.contains("families")) {
            spec.families.clear();
            for (const auto& f : j.at("families"))
                spec.families.push_back(family_from_name(f.get<std::string>()));
        }
        if (j.contains("r_min")) spec.r_min = j.at("r_min").get<double>();
        if (j.contains("r_max")) spec.r_max = j.at("r_max").get<double>();
        if (j.contains("r_step")) spec.r_step = j.at("r_step").get<double>();
        if (j.contains("gammas")) spec.gammas = j.at("gammas").get<std::vector<double>>();
        if (j.contains("etas")) spec.etas = j.at("etas").get<std::vector<double>>();
        if (j.contains("phi")) spec.phi = j.at("phi").get<double>();
        if (j.contains("format")) spec.format = format_from_name(j.at("format").get<std::string>());
        if (j.contains("oracle")) spec.oracle = j.at("oracle").get<bool>();
        if (j.contains("dims")) spec.dims = j.at("dims").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw SpecValidation(std::string("malformed spec JSON: ") + e.what());
    }
    return spec;
}

} // namespace sqmz
