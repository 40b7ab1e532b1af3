#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "errors.hpp"
#include "operators.hpp"

namespace sqmz {

// Single-mode moment table: values(m, n) = <a_dag^m a^n> for m + n <= 4.
// Entries above that order are never produced by the quartic observables this
// library evaluates, so requesting one is an error rather than a silent zero.
class MomentTable {
  public:
    MomentTable() : values_(25, 0.0) {}
    explicit MomentTable(std::string label) : label_(std::move(label)), values_(25, 0.0) {}

    const std::string& label() const { return label_; }

    std::complex<double> operator()(int m, int n) const {
        check_order(m, n);
        return values_[static_cast<std::size_t>(m) * 5 + static_cast<std::size_t>(n)];
    }
    void set(int m, int n, std::complex<double> v) {
        check_order(m, n);
        values_[static_cast<std::size_t>(m) * 5 + static_cast<std::size_t>(n)] = v;
    }

  private:
    static void check_order(int m, int n) {
        if (m < 0 || n < 0 || m + n > 4)
            throw TableOrder("moment order (" + std::to_string(m) + ", " + std::to_string(n) +
                             ") is outside the quartic table");
    }

    std::string label_;
    std::vector<std::complex<double>> values_;
};

namespace detail {

// <k| a_dag^p a^q |k> = delta_{pq} * k!/(k-p)!  (falling factorial; 0 if p > k).
inline double fock_normal_moment(int k, int p, int q) {
    if (p != q || p > k) return 0.0;
    double v = 1.0;
    for (int i = 0; i < p; ++i) v *= static_cast<double>(k - i);
    return v;
}

} // namespace detail

// Moments of the squeezed Fock state S(r)|k>, k in {0, 1}, with
// S(r) = exp[r(adag^2 - a^2)/2]. Uses the exact Heisenberg images
//   a -> cosh(r) a + sinh(r) adag,   adag -> cosh(r) adag + sinh(r) a,
// expands each monomial mechanically, normal-orders it, and applies the
// Fock-state contraction rule. No truncation is involved anywhere.
inline MomentTable bogoliubov_moments(double r, int k) {
    if (!(std::abs(r) <= 10.0))
        throw ParameterRange("squeezing parameter must satisfy |r| <= 10");
    if (k != 0 && k != 1) throw ParameterRange("Fock seed k must be 0 or 1");

    const double c = std::cosh(r);
    const double s = std::sinh(r);

    MomentTable table("squeezed_fock(r=" + std::to_string(r) + ",k=" + std::to_string(k) + ")");
    for (int m = 0; m <= 4; ++m) {
        for (int n = 0; n + m <= 4; ++n) {
            // Expand (c adag + s a)^m (c a + s adag)^n into 2^(m+n) words.
            std::vector<Term> expanded{Term{1.0, {}}};
            const auto append_image = [&](Op primary, Op mixed) {
                std::vector<Term> next;
                next.reserve(expanded.size() * 2);
                for (const Term& t : expanded) {
                    Term t1 = t;
                    t1.coeff *= c;
                    t1.word.push_back(primary);
                    next.push_back(std::move(t1));
                    Term t2 = t;
                    t2.coeff *= s;
                    t2.word.push_back(mixed);
                    next.push_back(std::move(t2));
                }
                expanded = std::move(next);
            };
            for (int i = 0; i < m; ++i) append_image(Op::ADag, Op::A);
            for (int i = 0; i < n; ++i) append_image(Op::A, Op::ADag);

            const OperatorPolynomial ordered =
                normal_order(OperatorPolynomial::from_terms(std::move(expanded)));

            std::complex<double> value = 0.0;
            for (const Term& t : ordered.terms()) {
                const Exponents e = OperatorPolynomial::word_exponents(t.word);
                value += t.coeff * detail::fock_normal_moment(k, e.ma, e.na);
            }
            table.set(m, n, value);
        }
    }
    return table;
}

// Moments of the coherent state |gamma> with real non-negative amplitude:
// <adag^m a^n> = gamma^(m+n).
inline MomentTable coherent_moments(double gamma) {
    if (gamma < 0.0) throw ParameterRange("coherent amplitude must be non-negative");
    MomentTable table("coherent(gamma=" + std::to_string(gamma) + ")");
    for (int m = 0; m <= 4; ++m)
        for (int n = 0; n + m <= 4; ++n)
            table.set(m, n, std::pow(gamma, m + n));
    return table;
}

// Expectation of an operator polynomial in a product state whose per-mode
// moments are given by `mode_a` and `mode_b`. The polynomial is normal-ordered
// first, so arbitrary (canonical or not) input words are accepted.
inline std::complex<double> evaluate(const OperatorPolynomial& poly, const MomentTable& mode_a,
                                     const MomentTable& mode_b) {
    const OperatorPolynomial ordered = poly.canonical() ? poly : normal_order(poly);
    std::complex<double> total = 0.0;
    for (const Term& t : ordered.terms()) {
        const Exponents e = OperatorPolynomial::word_exponents(t.word);
        if (e.ma + e.na > 4 || e.mb + e.nb > 4)
            throw TableOrder("operator degree exceeds the quartic moment tables");
        total += t.coeff * mode_a(e.ma, e.na) * mode_b(e.mb, e.nb);
    }
    return total;
}

} // namespace sqmz
