#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fock.hpp"
#include "moments.hpp"
#include "network.hpp"
#include "operators.hpp"
#include "source.hpp"

namespace sqmz {

// One evaluated grid point. o, do_dphi and var_o describe the detected
// (efficiency-thinned) difference photocurrent; q_f is a property of the
// lossless probe; f is filled only when the photocount-distribution Fisher
// information was computed.
struct MetricRecord {
    Family family = Family::SqSPh;
    double r = 0.0;
    double gamma = 0.0;
    double eta = 1.0;
    double phi = 0.0;
    double n_tot = 0.0;
    double q_f = 0.0;
    double o = 0.0;
    double do_dphi = 0.0;
    double var_o = 0.0;
    double s = 0.0;
    std::optional<double> f;
};

namespace detail {

inline MomentTable mode_a_table(const SourceConfig& config) {
    return bogoliubov_moments(config.mode_a_r(), config.mode_a_fock());
}

inline MomentTable mode_b_table(const SourceConfig& config) {
    return coherent_moments(config.mode_b_amplitude());
}

struct IdealSensitivity {
    double o = 0.0;       // <N_a - N_b> at the outputs, lossless
    double do_dphi = 0.0; // exact phi-derivative, lossless
    double var_o = 0.0;   // lossless variance
    double n_in = 0.0;    // <N_a + N_b> of the input (for the thinning noise term)
};

// Lossless difference-photocurrent moments via the quartic moment tables.
// The phi-derivative is exact: phi enters only through the network matrix,
// which is differentiated in closed form.
inline IdealSensitivity ideal_sensitivity(const SourceConfig& config, double phi) {
    const MomentTable ta = mode_a_table(config);
    const MomentTable tb = mode_b_table(config);

    const NetworkUnitary u = mz_network(phi);
    const NetworkUnitary du = mz_network_derivative(phi);

    const OperatorPolynomial obs = heisenberg_substitute(OperatorPolynomial::number_difference(), u);
    const std::complex<double> mean = evaluate(obs, ta, tb);
    const std::complex<double> second = evaluate(obs * obs, ta, tb);

    // d/dphi (U^dag D U) = (dU)^dag D U + U^dag D (dU), with D = diag(1, -1).
    const Mat2 d{std::complex<double>(1.0), 0.0, 0.0, std::complex<double>(-1.0)};
    const Mat2 kprime = du.adjoint() * d * u + u.adjoint() * d * du;
    const std::complex<double> slope = evaluate(quadratic_form(kprime), ta, tb);

    IdealSensitivity out;
    out.o = mean.real();
    out.do_dphi = slope.real();
    out.var_o = std::max(0.0, second.real() - mean.real() * mean.real());
    out.n_in = (ta(1, 1) + tb(1, 1)).real();
    return out;
}

} // namespace detail

// Quantum Fisher information Q_F = 4 Var(G) with G the photon number of the
// phase-shifted arm after the first beam splitter, evaluated on the input
// product state. Detector efficiency plays no role here.
inline double qfi(const SourceConfig& config) {
    const MomentTable ta = detail::mode_a_table(config);
    const MomentTable tb = detail::mode_b_table(config);
    const OperatorPolynomial g =
        heisenberg_substitute(OperatorPolynomial::number_a(), beam_splitter());
    const double mean = evaluate(g, ta, tb).real();
    const double second = evaluate(g * g, ta, tb).real();
    return 4.0 * std::max(0.0, second - mean * mean);
}

// Detected difference-photocurrent metrics at working point phi.
// Loss model (detection-side binomial thinning):
//   O_eta = eta O,   Var_eta = eta^2 Var + eta(1-eta) <N_a + N_b>.
inline MetricRecord sensitivity(const SourceConfig& config, double phi) {
    const detail::IdealSensitivity ideal = detail::ideal_sensitivity(config, phi);
    const double eta = config.eta;

    MetricRecord rec;
    rec.family = config.family;
    rec.r = config.r;
    rec.gamma = config.gamma;
    rec.eta = eta;
    rec.phi = phi;
    rec.n_tot = config.n_total();
    rec.q_f = qfi(config);
    rec.o = eta * ideal.o;
    rec.do_dphi = eta * ideal.do_dphi;
    rec.var_o = eta * eta * ideal.var_o + eta * (1.0 - eta) * ideal.n_in;
    if (std::abs(rec.do_dphi) < 1e-12)
        throw DegenerateWorkingPoint("difference photocurrent has zero slope at phi=" +
                                     std::to_string(phi));
    rec.s = std::sqrt(std::max(0.0, rec.var_o)) / std::abs(rec.do_dphi);
    return rec;
}

// Classical Fisher information of the eta-smeared joint photocount
// distribution at phase phi, by validated central differences: the step-h
// and step-h/2 estimates must agree to 1e-6 relative, and the h/2 estimate
// is returned. dims = 0 sizes the truncated basis automatically.
inline double classical_fisher(const SourceConfig& config, double phi, int dims = 0) {
    constexpr double h = 1e-4;
    constexpr double p_floor = 1e-15;

    const TwoModeKet input = prepare_input(config, dims, dims);
    const auto probabilities = [&](double ph) {
        return photocount_distribution(apply_network(input, mz_network(ph)), config.eta);
    };

    const PhotocountDistribution center = probabilities(phi);
    const auto fisher_at_step = [&](double step) {
        const PhotocountDistribution plus = probabilities(phi + step);
        const PhotocountDistribution minus = probabilities(phi - step);
        double f = 0.0;
        for (std::size_t i = 0; i < center.p.size(); ++i) {
            if (center.p[i] <= p_floor) continue;
            const double dp = (plus.p[i] - minus.p[i]) / (2.0 * step);
            f += dp * dp / center.p[i];
        }
        return f;
    };

    const double coarse = fisher_at_step(h);
    const double fine = fisher_at_step(h / 2.0);
    if (std::abs(coarse - fine) > 1e-6 * std::max(std::abs(fine), 1e-12))
        throw UnstableDerivative("Fisher-information finite difference failed to converge: F(h)=" +
                                 std::to_string(coarse) + " vs F(h/2)=" + std::to_string(fine));
    return fine;
}

// Brute-force Q_F: 4 Var(N_a) after the first beam splitter, computed on the
// truncated two-mode state (no loss: Q_F describes the lossless probe).
inline double oracle_qfi(const SourceConfig& config, int dims = 0) {
    const TwoModeKet probe = apply_network(prepare_input(config, dims, dims), beam_splitter());
    double m1 = 0.0, m2 = 0.0;
    for (int na = 0; na < probe.dim_a; ++na)
        for (int nb = 0; nb < probe.dim_b; ++nb) {
            const double p = std::norm(probe.at(na, nb));
            m1 += p * na;
            m2 += p * static_cast<double>(na) * static_cast<double>(na);
        }
    return 4.0 * std::max(0.0, m2 - m1 * m1);
}

// Full record from the truncated-Fock brute force, independent of the moment
// engine: Q_F from the post-beam-splitter number variance, O and its slope
// from Richardson-extrapolated differences of thinned distributions, Var from
// the thinned distribution itself. dims = 0 sizes the basis automatically.
inline MetricRecord oracle_metrics(const SourceConfig& config, double phi, int dims = 0) {
    const TwoModeKet input = prepare_input(config, dims, dims);

    MetricRecord rec;
    rec.family = config.family;
    rec.r = config.r;
    rec.gamma = config.gamma;
    rec.eta = config.eta;
    rec.phi = phi;
    rec.n_tot = config.n_total();
    rec.q_f = oracle_qfi(config, dims);

    const auto stats_at = [&](double ph) {
        return difference_statistics(
            photocount_distribution(apply_network(input, mz_network(ph)), config.eta));
    };

    constexpr double h = 1e-3;
    const DiffStats center = stats_at(phi);
    const double slope_h = (stats_at(phi + h).mean_diff - stats_at(phi - h).mean_diff) / (2.0 * h);
    const double slope_h2 =
        (stats_at(phi + h / 2.0).mean_diff - stats_at(phi - h / 2.0).mean_diff) / h;
    rec.o = center.mean_diff;
    rec.do_dphi = (4.0 * slope_h2 - slope_h) / 3.0; // Richardson extrapolation
    rec.var_o = center.var_diff;

    if (std::abs(rec.do_dphi) < 1e-9 * std::max(1.0, rec.n_tot))
        throw DegenerateWorkingPoint("brute-force difference photocurrent has zero slope at phi=" +
                                     std::to_string(phi));
    rec.s = std::sqrt(std::max(0.0, rec.var_o)) / std::abs(rec.do_dphi);
    return rec;
}

// Closed-form QFI threshold: below gamma_th(r) the squeezed vacuum yields the
// larger Q_F, above it the squeezed single photon does.
inline double threshold_gamma_qfi(double r) {
    if (!(r >= 0.0)) throw ParameterRange("squeezing r must be non-negative");
    return 0.5 * std::exp(-r) * std::sqrt(2.0 + std::sinh(4.0 * r));
}

// Independent cross-check of threshold_gamma_qfi: bisection on the sign of
// Q_F(SqSPh) - Q_F(SqVac) in gamma, to absolute tolerance `tol`.
inline double threshold_gamma_qfi_root(double r, double tol = 1e-9) {
    if (!(r >= 0.0)) throw ParameterRange("squeezing r must be non-negative");
    const auto diff = [&](double gamma) {
        return qfi(make_config(Family::SqSPh, r, gamma)) - qfi(make_config(Family::SqVac, r, gamma));
    };
    double lo = 0.0, hi = 50.0;
    const double flo = diff(lo);
    const double fhi = diff(hi);
    if (flo == 0.0) return lo;
    if ((flo > 0.0) == (fhi > 0.0))
        throw BracketFailure("QFI difference does not change sign on gamma in [0, 50] at r=" +
                             std::to_string(r));
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = diff(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace detail {

// Sensitivity comparison d(gamma) = s(SqVac) - s(SqSPh) at phi = pi/2; a
// degenerate SqSPh working point means s(SqSPh) = +inf there, so d = -inf.
inline double sensitivity_gap(double r, double gamma, double eta) {
    constexpr double half_pi = 1.5707963267948966;
    const IdealSensitivity vac = ideal_sensitivity(make_config(Family::SqVac, r, gamma, eta), half_pi);
    const IdealSensitivity sph =
        ideal_sensitivity(make_config(Family::SqSPh, r, gamma, eta), half_pi);
    const auto detected_s = [eta](const IdealSensitivity& x) {
        const double slope = eta * x.do_dphi;
        if (std::abs(slope) < 1e-12) return std::numeric_limits<double>::infinity();
        const double var = eta * eta * x.var_o + eta * (1.0 - eta) * x.n_in;
        return std::sqrt(std::max(0.0, var)) / std::abs(slope);
    };
    return detected_s(vac) - detected_s(sph);
}

} // namespace detail

// Sensitivity threshold gamma~_th(r, eta): for gamma <= gamma~_th the squeezed
// single photon is at least as sensitive as the squeezed vacuum (s_SqVac >=
// s_SqSPh at phi = pi/2). Scans gamma in [0, 50], then bisects the single sign
// change to 1e-6. Sentinels: 0 when the squeezed vacuum wins already at
// gamma = 0 (and everywhere after), +inf when the squeezed single photon wins
// on the whole bracket.
inline double threshold_gamma_sens(double r, double eta, double tol = 1e-6) {
    if (!(r > 0.0)) throw ParameterRange("sensitivity threshold requires r > 0");
    if (!(eta > 0.0 && eta <= 1.0))
        throw InvalidEfficiency("detector efficiency must lie in (0, 1]");

    constexpr double gamma_max = 50.0;
    constexpr double scan_step = 0.25;

    std::vector<double> grid;
    for (double g = 0.0; g <= gamma_max + 1e-12; g += scan_step) grid.push_back(g);

    std::vector<double> gap(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) gap[i] = detail::sensitivity_gap(r, grid[i], eta);

    std::vector<std::size_t> flips;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if ((gap[i] > 0.0) != (gap[i + 1] > 0.0)) flips.push_back(i);

    if (flips.empty()) {
        const bool all_non_positive = std::all_of(gap.begin(), gap.end(), [](double d) { return d <= 0.0; });
        if (all_non_positive) return 0.0;
        const bool all_positive = std::all_of(gap.begin(), gap.end(), [](double d) { return d > 0.0; });
        if (all_positive) return std::numeric_limits<double>::infinity();
        throw BracketFailure("sensitivity comparison has no certifiable structure on [0, 50]");
    }
    if (flips.size() > 1)
        throw BracketFailure("sensitivity comparison changes sign more than once on [0, 50]");

    double lo = grid[flips[0]];
    double hi = grid[flips[0] + 1];
    const bool lo_positive = gap[flips[0]] > 0.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double gm = detail::sensitivity_gap(r, mid, eta);
        if (gm == 0.0) return mid;
        if ((gm > 0.0) == lo_positive)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// --- asymptotic-scaling report ----------------------------------------------

struct AsymptoteRow {
    double r = 0.0;
    double n_tot = 0.0;
    double qf_ratio = 0.0;      // Q_F / N_tot^2
    double s_scaled = 0.0;      // s * sqrt(eta N_tot)
    double s_normalized = 0.0;  // s_scaled / family constant
};

struct AsymptoteReport {
    Family family = Family::SqSPh;
    double gamma = 0.0;
    double eta = 1.0;
    double qf_target = 0.0;    // 2/3 (SqSPh) or 10/9 (SqVac)
    double s_constant = 1.0;   // 1 (SqSPh) or sqrt(3(3-2 eta)) (SqVac)
    double tolerance = 0.05;
    std::vector<AsymptoteRow> rows;
    bool qf_within_tol = false;       // last row within tolerance of qf_target
    bool s_within_tol = false;        // last row's s_normalized within tolerance of 1
    bool qf_monotone_approach = false; // |qf_ratio - target| nonincreasing, last 3 rows
    bool s_monotone_approach = false;
};

// Scaling check at fixed gamma: Q_F/N_tot^2 should approach 2/3 (SqSPh) or
// 10/9 (SqVac), and s*sqrt(eta N_tot) should approach 1 (SqSPh) or
// sqrt(3(3-2 eta)) (SqVac), as r grows. Uses the closed-form moment path
// (integer r-grid 1..r_max), so no truncated basis is involved.
inline AsymptoteReport asymptote_report(Family family, double gamma, double eta, int r_max) {
    if (family == Family::Ch)
        throw ParameterRange("asymptote report applies to the squeezed families only");
    if (r_max < 3 || r_max > 10)
        throw ParameterRange("r_max must lie in [3, 10] (moment tables require |r| <= 10)");

    AsymptoteReport report;
    report.family = family;
    report.gamma = gamma;
    report.eta = eta;
    report.qf_target = family == Family::SqSPh ? 2.0 / 3.0 : 10.0 / 9.0;
    report.s_constant = family == Family::SqSPh ? 1.0 : std::sqrt(3.0 * (3.0 - 2.0 * eta));

    constexpr double half_pi = 1.5707963267948966;
    for (int ri = 1; ri <= r_max; ++ri) {
        const SourceConfig config = make_config(family, static_cast<double>(ri), gamma, eta);
        const MetricRecord m = sensitivity(config, half_pi);
        AsymptoteRow row;
        row.r = static_cast<double>(ri);
        row.n_tot = m.n_tot;
        row.qf_ratio = m.q_f / (m.n_tot * m.n_tot);
        row.s_scaled = m.s * std::sqrt(eta * m.n_tot);
        row.s_normalized = row.s_scaled / report.s_constant;
        report.rows.push_back(row);
    }

    const AsymptoteRow& last = report.rows.back();
    report.qf_within_tol = std::abs(last.qf_ratio / report.qf_target - 1.0) <= report.tolerance;
    report.s_within_tol = std::abs(last.s_normalized - 1.0) <= report.tolerance;

    const auto monotone = [&](auto deviation) {
        const std::size_t n = report.rows.size();
        double prev = deviation(report.rows[n - 3]);
        for (std::size_t i = n - 2; i < n; ++i) {
            const double cur = deviation(report.rows[i]);
            if (cur > prev) return false;
            prev = cur;
        }
        return true;
    };
    report.qf_monotone_approach =
        monotone([&](const AsymptoteRow& row) { return std::abs(row.qf_ratio - report.qf_target); });
    report.s_monotone_approach =
        monotone([&](const AsymptoteRow& row) { return std::abs(row.s_normalized - 1.0); });
    return report;
}

} // namespace sqmz
