#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "network.hpp"
#include "operators.hpp"

namespace sqmz {

// Maximum tolerated norm deficit of any prepared or evolved truncated state.
inline constexpr double leakage_tolerance = 1e-10;

// Single-mode state over photon numbers 0..dim-1.
struct TruncatedKet {
    int dim = 0;
    std::vector<std::complex<double>> amplitudes;

    double norm_deficit() const {
        double n2 = 0.0;
        for (const auto& c : amplitudes) n2 += std::norm(c);
        return 1.0 - n2;
    }
};

// Two-mode state; amplitude of |n_a, n_b> sits at index n_a*dim_b + n_b.
struct TwoModeKet {
    int dim_a = 0;
    int dim_b = 0;
    std::vector<std::complex<double>> amplitudes;

    std::complex<double> at(int na, int nb) const {
        return amplitudes[static_cast<std::size_t>(na) * static_cast<std::size_t>(dim_b) +
                          static_cast<std::size_t>(nb)];
    }
    std::complex<double>& at(int na, int nb) {
        return amplitudes[static_cast<std::size_t>(na) * static_cast<std::size_t>(dim_b) +
                          static_cast<std::size_t>(nb)];
    }

    double norm_deficit() const {
        double n2 = 0.0;
        for (const auto& c : amplitudes) n2 += std::norm(c);
        return 1.0 - n2;
    }
};

// Dense annihilation-operator matrix: (a)_{n-1,n} = sqrt(n).
struct LadderMatrix {
    int dim = 0;
    std::vector<std::complex<double>> entries; // row-major dim x dim

    std::complex<double> operator()(int i, int j) const {
        return entries[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim) +
                       static_cast<std::size_t>(j)];
    }
};

inline LadderMatrix make_ladder(int dim) {
    if (dim < 1) throw InvalidDimension("ladder dimension must be at least 1");
    LadderMatrix a;
    a.dim = dim;
    a.entries.assign(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), 0.0);
    for (int n = 1; n < dim; ++n)
        a.entries[static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(dim) +
                  static_cast<std::size_t>(n)] = std::sqrt(static_cast<double>(n));
    return a;
}

// --- basis sizing -----------------------------------------------------------

// Mean + 8 sigma + margin; adequate for Poisson-like (coherent) tails.
inline int poisson_dim(double mu) {
    return static_cast<int>(std::ceil(mu + 8.0 * std::sqrt(mu + 1.0) + 20.0));
}

inline int coherent_dim(double gamma) { return poisson_dim(gamma * gamma); }

// Squeezed photon-number tails fall off geometrically with ratio tanh^2(r),
// which the mean+8*sigma rule under-covers; bound the geometric tail directly
// and keep the Poisson rule as a floor.
inline int squeezed_dim(double r, int k, double eps = 1e-12) {
    const double ar = std::abs(r);
    const double mu = (k == 1) ? std::cosh(2.0 * ar) + std::sinh(ar) * std::sinh(ar)
                               : std::sinh(ar) * std::sinh(ar);
    const int floor_dim = poisson_dim(mu);
    if (ar < 1e-8) return std::max(floor_dim, k + 3);

    const double x = std::tanh(ar) * std::tanh(ar); // |c_{2m}|^2 ~ x^m
    const double ch = std::cosh(ar);
    int m = 1;
    if (k == 0) {
        // tail(M) <= x^(M+1) / ((1-x) cosh r)
        const double rhs = std::log(eps * (1.0 - x) * ch);
        m = static_cast<int>(std::ceil(rhs / std::log(x)));
    } else {
        // tail(M) <= x^(M+1) [(2M+3)(1-x) + 2x] / ((1-x)^2 cosh^3 r)
        const double denom = (1.0 - x) * (1.0 - x) * ch * ch * ch;
        for (m = 1; m < 100000; ++m) {
            const double tail =
                std::pow(x, m + 1) * ((2.0 * m + 3.0) * (1.0 - x) + 2.0 * x) / denom;
            if (tail <= eps) break;
        }
    }
    const int n_max = 2 * (m + 1) + k;
    return std::max(floor_dim, n_max + 7);
}

// --- state preparation ------------------------------------------------------

// S(r)|k> for k in {0,1}, S(r) = exp[r(adag^2 - a^2)/2], via the exact
// number-basis recursions (no truncated-generator exponential):
//   k=0: (a cosh r - adag sinh r) S|0> = 0  =>
//        c_{n+1} = tanh(r) sqrt(n/(n+1)) c_{n-1},  c_0 = 1/sqrt(cosh r)
//   k=1: S|1> = (cosh r adag - sinh r a) S|0>  =>  c^1_n = sqrt(n) c^0_{n-1}/cosh r
// Every stored coefficient is a positive multiple of c_0 for r > 0, so the
// recursion is cancellation-free.
inline TruncatedKet squeezed_fock_ket(double r, int k, int dim) {
    if (dim < 1) throw InvalidDimension("state dimension must be at least 1");
    if (k != 0 && k != 1) throw ParameterRange("squeezed Fock seed k must be 0 or 1");

    const double t = std::tanh(r);
    const double ch = std::cosh(r);

    std::vector<double> even(static_cast<std::size_t>(dim), 0.0);
    even[0] = 1.0 / std::sqrt(ch);
    for (int n = 1; n + 1 < dim; ++n)
        even[static_cast<std::size_t>(n + 1)] =
            t * std::sqrt(static_cast<double>(n) / (n + 1.0)) * even[static_cast<std::size_t>(n - 1)];
    // odd entries of `even` stay exactly zero.

    TruncatedKet ket;
    ket.dim = dim;
    ket.amplitudes.assign(static_cast<std::size_t>(dim), 0.0);
    if (k == 0) {
        for (int n = 0; n < dim; ++n) ket.amplitudes[static_cast<std::size_t>(n)] = even[static_cast<std::size_t>(n)];
    } else {
        for (int n = 1; n < dim; ++n)
            ket.amplitudes[static_cast<std::size_t>(n)] =
                std::sqrt(static_cast<double>(n)) * even[static_cast<std::size_t>(n - 1)] / ch;
    }

    if (ket.norm_deficit() > leakage_tolerance)
        throw TruncationOverflow("squeezed Fock state at r=" + std::to_string(r) +
                                 " leaks beyond dim=" + std::to_string(dim));
    return ket;
}

// |gamma> with c_n = e^{-gamma^2/2} gamma^n / sqrt(n!).
inline TruncatedKet coherent_ket(double gamma, int dim) {
    if (dim < 1) throw InvalidDimension("state dimension must be at least 1");
    if (gamma < 0.0) throw ParameterRange("coherent amplitude must be non-negative");

    TruncatedKet ket;
    ket.dim = dim;
    ket.amplitudes.assign(static_cast<std::size_t>(dim), 0.0);
    ket.amplitudes[0] = std::exp(-0.5 * gamma * gamma);
    for (int n = 0; n + 1 < dim; ++n)
        ket.amplitudes[static_cast<std::size_t>(n + 1)] =
            ket.amplitudes[static_cast<std::size_t>(n)] * gamma / std::sqrt(n + 1.0);

    if (ket.norm_deficit() > leakage_tolerance)
        throw TruncationOverflow("coherent state at gamma=" + std::to_string(gamma) +
                                 " leaks beyond dim=" + std::to_string(dim));
    return ket;
}

inline TwoModeKet tensor_product(const TruncatedKet& a, const TruncatedKet& b) {
    TwoModeKet psi;
    psi.dim_a = a.dim;
    psi.dim_b = b.dim;
    psi.amplitudes.assign(static_cast<std::size_t>(a.dim) * static_cast<std::size_t>(b.dim), 0.0);
    for (int na = 0; na < a.dim; ++na)
        for (int nb = 0; nb < b.dim; ++nb)
            psi.at(na, nb) = a.amplitudes[static_cast<std::size_t>(na)] *
                             b.amplitudes[static_cast<std::size_t>(nb)];
    return psi;
}

// --- network evolution ------------------------------------------------------

namespace detail {

// Multiplies amplitudes by e^{i(pa*n_a + pb*n_b)} (Schroedinger image of the
// Heisenberg phase map a -> e^{i pa} a, b -> e^{i pb} b).
inline void apply_mode_phases(TwoModeKet& psi, double pa, double pb) {
    if (pa == 0.0 && pb == 0.0) return;
    for (int na = 0; na < psi.dim_a; ++na) {
        for (int nb = 0; nb < psi.dim_b; ++nb) {
            psi.at(na, nb) *= std::polar(1.0, pa * na + pb * nb);
        }
    }
}

// Mode-mixing rotation exp[theta (adag b - a bdag)], whose Heisenberg map is
// a -> cos(theta) a + sin(theta) b, b -> -sin(theta) a + cos(theta) b.
// Total photon number is conserved, so the unitary is block diagonal over
// N = n_a + n_b; blocks are built by the ladder recursion
//   T^N(j,m) = [cos sqrt(j) T^{N-1}(j-1,m-1) - sin sqrt(N-j) T^{N-1}(j,m-1)]/sqrt(m)
//   T^N(j,0) = [sin sqrt(j) T^{N-1}(j-1,0) + cos sqrt(N-j) T^{N-1}(j,0)]/sqrt(N).
// Amplitudes rotated outside the stored rectangle are dropped (leakage).
inline void apply_rotation(TwoModeKet& psi, double theta) {
    if (theta == 0.0) return;
    const double c = std::cos(theta);
    const double s = std::sin(theta);

    int n_occ = -1;
    for (int na = 0; na < psi.dim_a; ++na)
        for (int nb = 0; nb < psi.dim_b; ++nb)
            if (psi.at(na, nb) != 0.0) n_occ = std::max(n_occ, na + nb);
    if (n_occ <= 0) return; // vacuum (or empty) is invariant

    TwoModeKet out = psi;
    for (auto& amp : out.amplitudes) amp = 0.0;
    out.at(0, 0) = psi.at(0, 0);

    const std::size_t stride = static_cast<std::size_t>(n_occ) + 1;
    std::vector<double> t_prev(stride * stride, 0.0), t_cur(stride * stride, 0.0);
    t_prev[0] = 1.0;

    std::vector<std::complex<double>> in_slice(stride), out_slice(stride);

    for (int n = 1; n <= n_occ; ++n) {
        const double rn = std::sqrt(static_cast<double>(n));
        for (int j = 0; j <= n; ++j) {
            const double rj = std::sqrt(static_cast<double>(j));
            const double rnj = std::sqrt(static_cast<double>(n - j));
            const double up = (j >= 1) ? t_prev[static_cast<std::size_t>(j - 1) * stride] : 0.0;
            const double same = (j <= n - 1) ? t_prev[static_cast<std::size_t>(j) * stride] : 0.0;
            t_cur[static_cast<std::size_t>(j) * stride] = (s * rj * up + c * rnj * same) / rn;
            for (int m = 1; m <= n; ++m) {
                const double upm =
                    (j >= 1 && m - 1 <= n - 1)
                        ? t_prev[static_cast<std::size_t>(j - 1) * stride + static_cast<std::size_t>(m - 1)]
                        : 0.0;
                const double samem =
                    (j <= n - 1)
                        ? t_prev[static_cast<std::size_t>(j) * stride + static_cast<std::size_t>(m - 1)]
                        : 0.0;
                t_cur[static_cast<std::size_t>(j) * stride + static_cast<std::size_t>(m)] =
                    (c * rj * upm - s * rnj * samem) / std::sqrt(static_cast<double>(m));
            }
        }

        // Transform this block: stored a-indices in [lo, hi].
        const int lo = std::max(0, n - psi.dim_b + 1);
        const int hi = std::min(n, psi.dim_a - 1);
        if (lo <= hi) {
            for (int m = lo; m <= hi; ++m)
                in_slice[static_cast<std::size_t>(m)] = psi.at(m, n - m);
            for (int j = lo; j <= hi; ++j) {
                std::complex<double> acc = 0.0;
                for (int m = lo; m <= hi; ++m)
                    acc += t_cur[static_cast<std::size_t>(j) * stride + static_cast<std::size_t>(m)] *
                           in_slice[static_cast<std::size_t>(m)];
                out_slice[static_cast<std::size_t>(j)] = acc;
            }
            for (int j = lo; j <= hi; ++j) out.at(j, n - j) = out_slice[static_cast<std::size_t>(j)];
        }

        std::swap(t_prev, t_cur);
    }

    psi = std::move(out);
}

} // namespace detail

// Schroedinger-picture image of `state` under the passive network whose
// Heisenberg action on (a, b)^T is `u`. The unitary is factored as
// phases * rotation * phases, each applied exactly on the Fock lattice.
inline TwoModeKet apply_network(const TwoModeKet& state, const NetworkUnitary& u) {
    require_unitary(u);

    const double c = std::abs(u(0, 0));
    const double s = std::abs(u(0, 1));

    double theta, p1, q1, p2 = 0.0, q2 = 0.0;
    if (s <= 1e-14) { // diagonal: pure phases
        theta = 0.0;
        p1 = std::arg(u(0, 0));
        q1 = std::arg(u(1, 1));
    } else if (c <= 1e-14) { // antidiagonal: full swap
        theta = 2.0 * std::atan(1.0); // pi/2
        p1 = std::arg(u(0, 1));
        q1 = std::arg(-u(1, 0));
    } else {
        theta = std::atan2(s, c);
        p1 = std::arg(u(0, 0));
        q1 = std::arg(-u(1, 0));
        q2 = std::arg(u(0, 1)) - p1;
    }

    TwoModeKet out = state;
    detail::apply_mode_phases(out, p2, q2);
    detail::apply_rotation(out, theta);
    detail::apply_mode_phases(out, p1, q1);
    return out;
}

// --- expectation values -----------------------------------------------------

namespace detail {

// Applies one ladder letter in place on a padded two-mode array.
inline void apply_letter(std::vector<std::complex<double>>& v, int da, int db, Op op) {
    const auto idx = [db](int na, int nb) {
        return static_cast<std::size_t>(na) * static_cast<std::size_t>(db) +
               static_cast<std::size_t>(nb);
    };
    switch (op) {
        case Op::A:
            for (int na = 0; na < da; ++na)
                for (int nb = 0; nb < db; ++nb)
                    v[idx(na, nb)] = (na + 1 < da) ? std::sqrt(na + 1.0) * v[idx(na + 1, nb)]
                                                   : std::complex<double>(0.0);
            break;
        case Op::ADag:
            for (int na = da - 1; na >= 0; --na)
                for (int nb = 0; nb < db; ++nb)
                    v[idx(na, nb)] = (na >= 1) ? std::sqrt(static_cast<double>(na)) * v[idx(na - 1, nb)]
                                               : std::complex<double>(0.0);
            break;
        case Op::B:
            for (int na = 0; na < da; ++na)
                for (int nb = 0; nb < db; ++nb)
                    v[idx(na, nb)] = (nb + 1 < db) ? std::sqrt(nb + 1.0) * v[idx(na, nb + 1)]
                                                   : std::complex<double>(0.0);
            break;
        case Op::BDag:
            for (int na = 0; na < da; ++na)
                for (int nb = db - 1; nb >= 0; --nb)
                    v[idx(na, nb)] = (nb >= 1) ? std::sqrt(static_cast<double>(nb)) * v[idx(na, nb - 1)]
                                               : std::complex<double>(0.0);
            break;
    }
}

} // namespace detail

// <state| poly |state> evaluated on a basis padded by 4 levels per mode, so
// degree-<=4 words never touch the truncation boundary.
inline std::complex<double> expectation(const TwoModeKet& state, const OperatorPolynomial& poly) {
    constexpr int pad = 4;
    if (poly.max_mode_degree() > pad)
        throw TruncationOverflow("operator degree exceeds the per-mode padding budget of 4");

    const int da = state.dim_a + pad;
    const int db = state.dim_b + pad;
    std::vector<std::complex<double>> base(static_cast<std::size_t>(da) * static_cast<std::size_t>(db),
                                           0.0);
    for (int na = 0; na < state.dim_a; ++na)
        for (int nb = 0; nb < state.dim_b; ++nb)
            base[static_cast<std::size_t>(na) * static_cast<std::size_t>(db) +
                 static_cast<std::size_t>(nb)] = state.at(na, nb);

    std::complex<double> total = 0.0;
    std::vector<std::complex<double>> scratch;
    for (const Term& t : poly.terms()) {
        scratch = base;
        for (auto it = t.word.rbegin(); it != t.word.rend(); ++it)
            detail::apply_letter(scratch, da, db, *it);
        std::complex<double> inner = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i) inner += std::conj(base[i]) * scratch[i];
        total += t.coeff * inner;
    }
    return total;
}

// Single-mode convenience: the polynomial must involve mode a only.
inline std::complex<double> expectation(const TruncatedKet& state, const OperatorPolynomial& poly) {
    for (const Term& t : poly.terms())
        for (Op op : t.word)
            if (!is_mode_a(op))
                throw Error("single-mode expectation requires an a-mode polynomial");
    TruncatedKet vac;
    vac.dim = 1;
    vac.amplitudes = {1.0};
    return expectation(tensor_product(state, vac), poly);
}

// --- photocounting ----------------------------------------------------------

// Joint photocount probabilities after per-mode binomial thinning with
// efficiency eta.
struct PhotocountDistribution {
    int dim_a = 0;
    int dim_b = 0;
    double eta = 1.0;
    std::vector<double> p; // index n_a*dim_b + n_b

    double at(int na, int nb) const {
        return p[static_cast<std::size_t>(na) * static_cast<std::size_t>(dim_b) +
                 static_cast<std::size_t>(nb)];
    }
    double total() const {
        double s = 0.0;
        for (double v : p) s += v;
        return s;
    }
};

namespace detail {

// Binomial thinning kernel rows: T(m, n) = C(n, m) eta^m (1-eta)^(n-m), m <= n.
inline std::vector<double> thinning_matrix(int dim, double eta) {
    std::vector<double> t(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), 0.0);
    const double le = std::log(eta);
    const double l1e = std::log1p(-eta);
    for (int n = 0; n < dim; ++n)
        for (int m = 0; m <= n; ++m) {
            const double lc = std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0);
            t[static_cast<std::size_t>(m) * static_cast<std::size_t>(dim) +
              static_cast<std::size_t>(n)] = std::exp(lc + m * le + (n - m) * l1e);
        }
    return t;
}

} // namespace detail

inline PhotocountDistribution photocount_distribution(const TwoModeKet& state, double eta) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw InvalidEfficiency("detector efficiency must lie in (0, 1]");

    PhotocountDistribution dist;
    dist.dim_a = state.dim_a;
    dist.dim_b = state.dim_b;
    dist.eta = eta;
    dist.p.resize(state.amplitudes.size());
    for (std::size_t i = 0; i < state.amplitudes.size(); ++i)
        dist.p[i] = std::norm(state.amplitudes[i]);
    if (eta == 1.0) return dist; // lossless detection: exactly |amplitudes|^2

    const int da = state.dim_a;
    const int db = state.dim_b;
    const std::vector<double> ta = detail::thinning_matrix(da, eta);
    const std::vector<double> tb = detail::thinning_matrix(db, eta);

    // q = T_a * p  (thin mode a)
    std::vector<double> q(dist.p.size(), 0.0);
    for (int ma = 0; ma < da; ++ma)
        for (int na = ma; na < da; ++na) {
            const double w = ta[static_cast<std::size_t>(ma) * static_cast<std::size_t>(da) +
                                static_cast<std::size_t>(na)];
            const std::size_t src = static_cast<std::size_t>(na) * static_cast<std::size_t>(db);
            const std::size_t dst = static_cast<std::size_t>(ma) * static_cast<std::size_t>(db);
            for (int nb = 0; nb < db; ++nb)
                q[dst + static_cast<std::size_t>(nb)] += w * dist.p[src + static_cast<std::size_t>(nb)];
        }

    // p' = q * T_b^T  (thin mode b)
    std::fill(dist.p.begin(), dist.p.end(), 0.0);
    for (int ma = 0; ma < da; ++ma) {
        const std::size_t row = static_cast<std::size_t>(ma) * static_cast<std::size_t>(db);
        for (int mb = 0; mb < db; ++mb) {
            double acc = 0.0;
            for (int nb = mb; nb < db; ++nb)
                acc += q[row + static_cast<std::size_t>(nb)] *
                       tb[static_cast<std::size_t>(mb) * static_cast<std::size_t>(db) +
                          static_cast<std::size_t>(nb)];
            dist.p[row + static_cast<std::size_t>(mb)] = acc;
        }
    }
    return dist;
}

// Mean and variance of the count difference n_a - n_b, plus the mean total.
struct DiffStats {
    double mean_diff = 0.0;
    double var_diff = 0.0;
    double mean_total = 0.0;
};

inline DiffStats difference_statistics(const PhotocountDistribution& dist) {
    double m1 = 0.0, m2 = 0.0, tot = 0.0;
    for (int na = 0; na < dist.dim_a; ++na)
        for (int nb = 0; nb < dist.dim_b; ++nb) {
            const double p = dist.at(na, nb);
            if (p == 0.0) continue;
            const double d = static_cast<double>(na - nb);
            m1 += p * d;
            m2 += p * d * d;
            tot += p * static_cast<double>(na + nb);
        }
    return {m1, m2 - m1 * m1, tot};
}

} // namespace sqmz
