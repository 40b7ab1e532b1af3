#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "errors.hpp"

namespace sqmz {

// 2x2 complex matrix acting on the mode-operator column (a, b)^T.
// A unitary instance describes a passive linear-optical network in the
// Heisenberg picture: (a_out, b_out)^T = U (a_in, b_in)^T.
struct Mat2 {
    using cplx = std::complex<double>;

    // Row-major entries: m[0]=u00, m[1]=u01, m[2]=u10, m[3]=u11.
    std::array<cplx, 4> m{};

    cplx operator()(int i, int j) const { return m[static_cast<std::size_t>(2 * i + j)]; }
    cplx& operator()(int i, int j) { return m[static_cast<std::size_t>(2 * i + j)]; }

    static Mat2 identity() { return Mat2{{cplx(1.0), cplx(0.0), cplx(0.0), cplx(1.0)}}; }

    Mat2 adjoint() const {
        return Mat2{{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}};
    }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        Mat2 out;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                out(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j);
        return out;
    }

    friend Mat2 operator+(const Mat2& x, const Mat2& y) {
        Mat2 out;
        for (std::size_t i = 0; i < 4; ++i) out.m[i] = x.m[i] + y.m[i];
        return out;
    }
};

// Alias used in interfaces that require the matrix to be unitary.
using NetworkUnitary = Mat2;

// Largest entry of |U^dag U - 1|.
inline double unitarity_defect(const Mat2& u) {
    const Mat2 p = u.adjoint() * u;
    double defect = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const std::complex<double> want = (i == j) ? 1.0 : 0.0;
            defect = std::max(defect, std::abs(p(i, j) - want));
        }
    return defect;
}

inline bool is_unitary(const Mat2& u, double tol = 1e-12) {
    return unitarity_defect(u) <= tol;
}

inline void require_unitary(const Mat2& u, double tol = 1e-12) {
    if (!is_unitary(u, tol))
        throw InvalidNetwork("matrix is not unitary to tolerance " + std::to_string(tol));
}

// Balanced beam splitter: a_BS = (a+b)/sqrt(2), b_BS = (b-a)/sqrt(2).
inline NetworkUnitary beam_splitter() {
    const double h = 1.0 / std::sqrt(2.0);
    return Mat2{{h, h, -h, h}};
}

// Phase shift on mode a: a -> e^{i phi} a, b untouched.
inline NetworkUnitary phase_shifter(double phi) {
    return Mat2{{std::polar(1.0, phi), 0.0, 0.0, 1.0}};
}

// Full Mach-Zehnder: beam splitter, phase on the internal a-arm, beam splitter.
inline NetworkUnitary mz_network(double phi) {
    return beam_splitter() * phase_shifter(phi) * beam_splitter();
}

// d/dphi of mz_network(phi); not unitary, used for closed-form signal slopes.
inline Mat2 mz_network_derivative(double phi) {
    const Mat2 dp{{std::complex<double>(0.0, 1.0) * std::polar(1.0, phi), 0.0, 0.0, 0.0}};
    return beam_splitter() * dp * beam_splitter();
}

} // namespace sqmz
