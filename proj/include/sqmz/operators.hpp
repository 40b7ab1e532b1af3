#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "network.hpp"

namespace sqmz {

// Mode-operator letters, listed in canonical word order: within a monomial the
// a-block precedes the b-block and daggers precede annihilators in each block.
enum class Op : unsigned char { ADag = 0, A = 1, BDag = 2, B = 3 };

inline bool is_mode_a(Op op) { return op == Op::A || op == Op::ADag; }

// One monomial: coefficient times an ordered product of letters (empty word
// means the identity operator).
struct Term {
    std::complex<double> coeff;
    std::vector<Op> word;
};

// Exponents of a canonical monomial adag^ma a^na bdag^mb b^nb.
struct Exponents {
    int ma = 0, na = 0, mb = 0, nb = 0;
};

// A polynomial in the two-mode ladder operators. Words may be arbitrary
// products; normal_order() rewrites them into the canonical form in which
// terms are collected, sorted, and evaluable against moment tables.
class OperatorPolynomial {
public:
    using cplx = std::complex<double>;

    OperatorPolynomial() = default;

    static OperatorPolynomial constant(cplx c) {
        OperatorPolynomial p;
        if (c != 0.0) p.terms_.push_back({c, {}});
        p.canonical_ = true;
        return p;
    }

    static OperatorPolynomial letter(Op op, cplx c = 1.0) {
        OperatorPolynomial p;
        p.terms_.push_back({c, {op}});
        p.canonical_ = true;
        return p;
    }

    // adag a
    static OperatorPolynomial number_a() {
        OperatorPolynomial p;
        p.terms_.push_back({1.0, {Op::ADag, Op::A}});
        p.canonical_ = true;
        return p;
    }

    // bdag b
    static OperatorPolynomial number_b() {
        OperatorPolynomial p;
        p.terms_.push_back({1.0, {Op::BDag, Op::B}});
        p.canonical_ = true;
        return p;
    }

    // adag a - bdag b, the difference-photocurrent observable.
    static OperatorPolynomial number_difference() {
        OperatorPolynomial p;
        p.terms_.push_back({1.0, {Op::ADag, Op::A}});
        p.terms_.push_back({-1.0, {Op::BDag, Op::B}});
        p.canonical_ = true;
        return p;
    }

    const std::vector<Term>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    bool canonical() const { return canonical_; }

    // Largest per-mode letter count over all monomials.
    int max_mode_degree() const {
        int deg = 0;
        for (const Term& t : terms_) {
            int da = 0, db = 0;
            for (Op op : t.word) (is_mode_a(op) ? da : db) += 1;
            deg = std::max({deg, da, db});
        }
        return deg;
    }

    // Coefficient of adag^ma a^na bdag^mb b^nb; valid on canonical polynomials.
    cplx coefficient(int ma, int na, int mb, int nb) const {
        const std::vector<Op> want = make_canonical_word({ma, na, mb, nb});
        for (const Term& t : terms_)
            if (t.word == want) return t.coeff;
        return 0.0;
    }

    OperatorPolynomial& operator+=(const OperatorPolynomial& rhs) {
        terms_.insert(terms_.end(), rhs.terms_.begin(), rhs.terms_.end());
        canonical_ = false;
        return *this;
    }

    friend OperatorPolynomial operator+(OperatorPolynomial lhs, const OperatorPolynomial& rhs) {
        lhs += rhs;
        return lhs;
    }

    friend OperatorPolynomial operator-(OperatorPolynomial lhs, const OperatorPolynomial& rhs) {
        lhs += (-1.0) * rhs;
        return lhs;
    }

    friend OperatorPolynomial operator*(cplx c, OperatorPolynomial p) {
        for (Term& t : p.terms_) t.coeff *= c;
        return p;
    }

    // Operator product: concatenates words pairwise. The result is generally
    // not canonical; pass it through normal_order before evaluating.
    friend OperatorPolynomial operator*(const OperatorPolynomial& lhs,
                                        const OperatorPolynomial& rhs) {
        OperatorPolynomial out;
        out.terms_.reserve(lhs.terms_.size() * rhs.terms_.size());
        for (const Term& x : lhs.terms_)
            for (const Term& y : rhs.terms_) {
                Term t;
                t.coeff = x.coeff * y.coeff;
                t.word = x.word;
                t.word.insert(t.word.end(), y.word.begin(), y.word.end());
                out.terms_.push_back(std::move(t));
            }
        out.canonical_ = false;
        return out;
    }

    // Assembles a polynomial from raw monomials (not assumed canonical).
    static OperatorPolynomial from_terms(std::vector<Term> terms) {
        OperatorPolynomial p;
        p.terms_ = std::move(terms);
        p.canonical_ = false;
        return p;
    }

    static std::vector<Op> make_canonical_word(const Exponents& e) {
        std::vector<Op> w;
        w.reserve(static_cast<std::size_t>(e.ma + e.na + e.mb + e.nb));
        w.insert(w.end(), static_cast<std::size_t>(e.ma), Op::ADag);
        w.insert(w.end(), static_cast<std::size_t>(e.na), Op::A);
        w.insert(w.end(), static_cast<std::size_t>(e.mb), Op::BDag);
        w.insert(w.end(), static_cast<std::size_t>(e.nb), Op::B);
        return w;
    }

    // Exponents of a canonical word (letter counts; callers guarantee order).
    static Exponents word_exponents(const std::vector<Op>& w) {
        Exponents e;
        for (Op op : w) {
            switch (op) {
                case Op::ADag: e.ma += 1; break;
                case Op::A: e.na += 1; break;
                case Op::BDag: e.mb += 1; break;
                case Op::B: e.nb += 1; break;
            }
        }
        return e;
    }

private:
    friend OperatorPolynomial normal_order(const OperatorPolynomial&);

    std::vector<Term> terms_;
    bool canonical_ = false;
};

// Rewrites every word into canonical order using [a, adag] = [b, bdag] = 1 and
// the commutation of distinct modes, then collects equal monomials. Terms come
// out sorted by exponent tuple (ma, na, mb, nb), zero coefficients dropped.
inline OperatorPolynomial normal_order(const OperatorPolynomial& poly) {
    using cplx = std::complex<double>;
    std::map<std::array<int, 4>, cplx> acc;
    std::vector<Term> work(poly.terms().begin(), poly.terms().end());

    while (!work.empty()) {
        Term t = std::move(work.back());
        work.pop_back();

        // Find the first adjacent pair out of canonical order.
        std::size_t i = 0;
        bool disorder = false;
        for (; i + 1 < t.word.size(); ++i) {
            if (static_cast<int>(t.word[i]) > static_cast<int>(t.word[i + 1])) {
                disorder = true;
                break;
            }
        }

        if (!disorder) {
            const Exponents e = OperatorPolynomial::word_exponents(t.word);
            acc[{e.ma, e.na, e.mb, e.nb}] += t.coeff;
            continue;
        }

        const Op x = t.word[i];
        const Op y = t.word[i + 1];
        const bool same_mode_pair = (x == Op::A && y == Op::ADag) || (x == Op::B && y == Op::BDag);

        // Swapped word: a adag -> adag a (+ contraction below), or a free swap
        // when the letters commute (distinct modes).
        Term swapped = t;
        std::swap(swapped.word[i], swapped.word[i + 1]);
        work.push_back(std::move(swapped));

        if (same_mode_pair) {
            Term contracted;
            contracted.coeff = t.coeff;
            contracted.word.reserve(t.word.size() - 2);
            contracted.word.insert(contracted.word.end(), t.word.begin(),
                                   t.word.begin() + static_cast<std::ptrdiff_t>(i));
            contracted.word.insert(contracted.word.end(),
                                   t.word.begin() + static_cast<std::ptrdiff_t>(i) + 2,
                                   t.word.end());
            work.push_back(std::move(contracted));
        }
    }

    OperatorPolynomial out;
    for (const auto& [key, coeff] : acc) {
        if (coeff == 0.0) continue;
        Term t;
        t.coeff = coeff;
        t.word = OperatorPolynomial::make_canonical_word({key[0], key[1], key[2], key[3]});
        out.terms_.push_back(std::move(t));
    }
    out.canonical_ = true;
    return out;
}

// Heisenberg map of a network: every letter is replaced by its U-image,
//   a -> u00 a + u01 b,   b -> u10 a + u11 b  (daggers get conjugates),
// the product is expanded, and the result is normally ordered.
inline OperatorPolynomial heisenberg_substitute(const OperatorPolynomial& poly,
                                                const NetworkUnitary& u) {
    using cplx = std::complex<double>;
    require_unitary(u);

    const auto images = [&u](Op op) -> std::array<std::pair<cplx, Op>, 2> {
        switch (op) {
            case Op::A: return {{{u(0, 0), Op::A}, {u(0, 1), Op::B}}};
            case Op::B: return {{{u(1, 0), Op::A}, {u(1, 1), Op::B}}};
            case Op::ADag: return {{{std::conj(u(0, 0)), Op::ADag}, {std::conj(u(0, 1)), Op::BDag}}};
            default: return {{{std::conj(u(1, 0)), Op::ADag}, {std::conj(u(1, 1)), Op::BDag}}};
        }
    };

    std::vector<Term> expanded;
    for (const Term& t : poly.terms()) {
        std::vector<Term> partial{{t.coeff, {}}};
        for (Op op : t.word) {
            std::vector<Term> next;
            next.reserve(partial.size() * 2);
            for (const Term& p : partial)
                for (const auto& [c, img] : images(op)) {
                    if (c == 0.0) continue;
                    Term q = p;
                    q.coeff *= c;
                    q.word.push_back(img);
                    next.push_back(std::move(q));
                }
            partial = std::move(next);
        }
        expanded.insert(expanded.end(), partial.begin(), partial.end());
    }
    return normal_order(OperatorPolynomial::from_terms(std::move(expanded)));
}

// Quadratic form sum_ij k(i,j) x_i^dag x_j with (x_0, x_1) = (a, b); used for
// observables whose Heisenberg image is a numeric 2x2 kernel.
inline OperatorPolynomial quadratic_form(const Mat2& k) {
    static const std::array<Op, 2> dag{Op::ADag, Op::BDag};
    static const std::array<Op, 2> ann{Op::A, Op::B};
    std::vector<Term> terms;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            if (k(i, j) == 0.0) continue;
            terms.push_back({k(i, j),
                             {dag[static_cast<std::size_t>(i)], ann[static_cast<std::size_t>(j)]}});
        }
    return normal_order(OperatorPolynomial::from_terms(std::move(terms)));
}

} // namespace sqmz
