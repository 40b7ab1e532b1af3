#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include <sqmz/fock.hpp>
#include <sqmz/moments.hpp>

using namespace sqmz;
using cplx = std::complex<double>;

namespace {

OperatorPolynomial mode_a_word(int m, int n) {
    OperatorPolynomial p = OperatorPolynomial::constant(1.0);
    for (int i = 0; i < m; ++i) p = p * OperatorPolynomial::letter(Op::ADag);
    for (int i = 0; i < n; ++i) p = p * OperatorPolynomial::letter(Op::A);
    return p;
}

} // namespace

TEST_CASE("squeezed-vacuum moment anchors") {
    const MomentTable t = bogoliubov_moments(0.8, 0);
    REQUIRE(std::abs(t(0, 0) - cplx(1.0)) <= 1e-14);
    REQUIRE(std::abs(t(1, 1) - cplx(0.7887322355974427)) <= 1e-12);  // sinh^2 r
    REQUIRE(std::abs(t(0, 2) - cplx(1.187783976600115)) <= 1e-12);   // cosh r sinh r
    REQUIRE(std::abs(t(2, 0) - cplx(1.187783976600115)) <= 1e-12);
    // Photon-number parity kills every odd total order.
    REQUIRE(t(1, 0) == cplx(0.0));
    REQUIRE(t(0, 1) == cplx(0.0));
    REQUIRE(t(2, 1) == cplx(0.0));
    REQUIRE(t(1, 2) == cplx(0.0));
    REQUIRE(t(3, 0) == cplx(0.0));
}

TEST_CASE("squeezed-single-photon moment anchors") {
    const MomentTable t = bogoliubov_moments(0.8, 1);
    REQUIRE(std::abs(t(1, 1) - cplx(3.366196706792328)) <= 1e-12);  // cosh 2r + sinh^2 r
    REQUIRE(std::abs(t(0, 2) - cplx(3.0 * 1.187783976600115)) <= 1e-12);
    REQUIRE(t(1, 0) == cplx(0.0));
    REQUIRE(t(2, 1) == cplx(0.0));
}

TEST_CASE("coherent moments factor into powers of the amplitude") {
    const double g = 1.3;
    const MomentTable t = coherent_moments(g);
    for (int m = 0; m <= 4; ++m)
        for (int n = 0; m + n <= 4; ++n)
            REQUIRE(std::abs(t(m, n) - cplx(std::pow(g, m + n))) <= 1e-12);
}

TEST_CASE("moment tables agree with brute-force truncated kets") {
    struct Case {
        MomentTable table;
        TruncatedKet ket;
    };
    std::vector<Case> cases;
    for (double r : {0.5, 0.8})
        for (int k : {0, 1})
            cases.push_back({bogoliubov_moments(r, k), squeezed_fock_ket(r, k, squeezed_dim(r, k))});
    cases.push_back({coherent_moments(0.0), coherent_ket(0.0, 4)});
    cases.push_back({coherent_moments(1.3), coherent_ket(1.3, coherent_dim(1.3))});

    for (const Case& c : cases)
        for (int m = 0; m <= 4; ++m)
            for (int n = 0; m + n <= 4; ++n) {
                const cplx brute = expectation(c.ket, mode_a_word(m, n));
                REQUIRE(std::abs(c.table(m, n) - brute) <= 1e-9);
                // Hermiticity of the moment family.
                REQUIRE(std::abs(c.table(m, n) - std::conj(c.table(n, m))) <= 1e-12);
            }
}

TEST_CASE("moment-table domain checks") {
    REQUIRE_THROWS_AS(bogoliubov_moments(10.5, 0), ParameterRange);
    REQUIRE_THROWS_AS(bogoliubov_moments(-11.0, 1), ParameterRange);
    REQUIRE_THROWS_AS(bogoliubov_moments(0.5, 2), ParameterRange);
    REQUIRE_THROWS_AS(bogoliubov_moments(0.5, -1), ParameterRange);
}

TEST_CASE("table order is capped at four") {
    MomentTable t("test");
    REQUIRE_NOTHROW(t.set(2, 2, cplx(1.0)));
    REQUIRE_THROWS_AS(t.set(3, 2, cplx(1.0)), TableOrder);
    const MomentTable c = coherent_moments(0.5);
    REQUIRE_THROWS_AS(c(5, 0), TableOrder);
    REQUIRE_THROWS_AS(c(2, 3), TableOrder);
}

TEST_CASE("evaluate factorizes across modes and normal-orders its input") {
    const MomentTable ta = bogoliubov_moments(0.7, 1);
    const MomentTable tb = coherent_moments(0.9);

    const OperatorPolynomial nab =
        OperatorPolynomial::number_a() * OperatorPolynomial::number_b();
    const cplx v = evaluate(nab, ta, tb);
    REQUIRE(std::abs(v - ta(1, 1) * tb(1, 1)) <= 1e-12);

    // Non-canonical word: a adag = adag a + 1 must be ordered before lookup.
    const OperatorPolynomial aad =
        OperatorPolynomial::letter(Op::A) * OperatorPolynomial::letter(Op::ADag);
    REQUIRE(std::abs(evaluate(aad, ta, tb) - (ta(1, 1) + cplx(1.0))) <= 1e-12);

    // Degree beyond the stored table must be refused, not silently zeroed.
    OperatorPolynomial deg6 = OperatorPolynomial::constant(1.0);
    for (int i = 0; i < 3; ++i) deg6 = deg6 * OperatorPolynomial::number_a();
    REQUIRE_THROWS_AS(evaluate(deg6, ta, tb), TableOrder);
}
