#pragma once

#include <cmath>

#include "errors.hpp"

namespace sqmz {

// Squeezing strength in decibels: dB = 10*log10(e^{2r}) = 20 r / ln 10.
inline double db_from_r(double r) {
    if (!(r >= 0.0)) throw ParameterRange("squeezing r must be non-negative");
    return 20.0 * r / std::log(10.0);
}

inline double r_from_db(double db) {
    if (!(db >= 0.0)) throw ParameterRange("squeezing in dB must be non-negative");
    return db * std::log(10.0) / 20.0;
}

} // namespace sqmz
