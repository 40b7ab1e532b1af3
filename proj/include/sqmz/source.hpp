#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"
#include "fock.hpp"

namespace sqmz {

// Input families: squeezed single photon, squeezed vacuum, or a plain
// coherent benchmark, each interfering with a coherent state on mode b.
enum class Family { SqSPh, SqVac, Ch };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::SqSPh: return "SqSPh";
        case Family::SqVac: return "SqVac";
        case Family::Ch: return "Ch";
    }
    return "?";
}

inline Family family_from_name(const std::string& name) {
    if (name == "SqSPh") return Family::SqSPh;
    if (name == "SqVac") return Family::SqVac;
    if (name == "Ch") return Family::Ch;
    throw ParameterRange("unknown family '" + name + "' (expected SqSPh, SqVac, or Ch)");
}

// Source description. gamma is always stored in the SqSPh convention: the
// total energy is N_tot = gamma^2 + cosh(2r) + sinh^2(r) for every family,
// and the other families' mode-b amplitudes are derived from it so that equal
// (r, gamma) always means equal energy budget.
struct SourceConfig {
    Family family = Family::SqSPh;
    double r = 0.0;
    double gamma = 0.0;
    double eta = 1.0;

    double n_total() const {
        return gamma * gamma + std::cosh(2.0 * r) + std::sinh(r) * std::sinh(r);
    }

    // Coherent amplitude actually fed into mode b.
    double mode_b_amplitude() const {
        switch (family) {
            case Family::SqSPh: return gamma;
            case Family::SqVac: return std::sqrt(gamma * gamma + std::cosh(2.0 * r));
            case Family::Ch: return std::sqrt(n_total());
        }
        return 0.0;
    }

    // Fock seed of the mode-a squeezer (S(r)|k>).
    int mode_a_fock() const { return family == Family::SqSPh ? 1 : 0; }

    // Squeezing actually applied on mode a (the Ch benchmark leaves a in
    // vacuum; its r field only tracks the energy bookkeeping).
    double mode_a_r() const { return family == Family::Ch ? 0.0 : r; }
};

inline SourceConfig make_config(Family family, double r, double gamma, double eta = 1.0) {
    if (!(r >= 0.0)) throw ParameterRange("squeezing r must be non-negative");
    if (!(gamma >= 0.0)) throw ParameterRange("coherent amplitude gamma must be non-negative");
    if (!(eta > 0.0 && eta <= 1.0))
        throw InvalidEfficiency("detector efficiency must lie in (0, 1]");
    return SourceConfig{family, r, gamma, eta};
}

// Builds a config from a total-energy budget: gamma = sqrt(N_tot - cosh(2r)
// - sinh^2(r)). Because gamma is stored in the shared convention, every
// family needs N_tot >= cosh(2r) + sinh^2(r) (>= 1) to be representable.
inline SourceConfig from_energy(Family family, double r, double n_tot, double eta = 1.0) {
    if (!(r >= 0.0)) throw ParameterRange("squeezing r must be non-negative");
    const double floor = std::cosh(2.0 * r) + std::sinh(r) * std::sinh(r);
    if (!(n_tot >= floor))
        throw InfeasibleEnergy("N_tot=" + std::to_string(n_tot) + " infeasible at r=" +
                               std::to_string(r) + "; minimal feasible N_tot is " +
                               std::to_string(floor));
    const double gamma = std::sqrt(std::max(0.0, n_tot - floor));
    return make_config(family, r, gamma, eta);
}

// Largest per-mode basis the oracle will allocate before deferring to the
// closed-form path.
inline constexpr int max_oracle_dim = 2048;

// Truncated two-mode input state for `config`. With dim_a = dim_b = 0 the
// basis is sized automatically from the tail bounds (and retried once at
// double size if preparation still leaks); explicit dims are used verbatim.
// Both modes get the same dimension, chosen so that every total-photon-number
// block of the stored support fits: passive networks then conserve the norm
// exactly instead of leaking across the truncation corner.
inline TwoModeKet prepare_input(const SourceConfig& config, int dim_a = 0, int dim_b = 0) {
    const double ra = config.mode_a_r();
    const int k = config.mode_a_fock();
    const double beta = config.mode_b_amplitude();

    const auto build = [&](int da, int db) {
        return tensor_product(squeezed_fock_ket(ra, k, da), coherent_ket(beta, db));
    };

    if (dim_a > 0 || dim_b > 0) {
        if (dim_a < 1 || dim_b < 1)
            throw InvalidDimension("explicit dims must both be positive");
        return build(dim_a, dim_b);
    }

    int cut_a = squeezed_dim(ra, k);
    int cut_b = coherent_dim(beta);
    for (int attempt = 0; attempt < 2; ++attempt) {
        // One shared dimension covering every occupied total-N block.
        const int dim = cut_a + cut_b + 1;
        if (dim > max_oracle_dim)
            throw TruncationOverflow(
                "oracle basis of " + std::to_string(dim) +
                " per mode exceeds the cap of " + std::to_string(max_oracle_dim) +
                "; use the closed-form moment path for this regime");
        try {
            return build(dim, dim);
        } catch (const TruncationOverflow&) {
            if (attempt == 1) throw;
            cut_a *= 2;
            cut_b *= 2;
        }
    }
    throw TruncationOverflow("unreachable"); // loop always returns or throws
}

} // namespace sqmz
