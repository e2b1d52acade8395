#include "ringcav/units.hpp"

#include <numbers>
#include <stdexcept>

namespace ringcav::units {

namespace {
constexpr double kHbar = 1.054571817e-34;      // J s
constexpr double kAtomicMass = 1.66053906660e-27;  // kg
}  // namespace

double kappa_angular(double kappa_value, KappaConvention convention) {
    return convention == KappaConvention::Cyclic ? 2 * std::numbers::pi * kappa_value
                                                 : kappa_value;
}

double recoil_frequency(double mass_amu, double wavenumber_per_m, double kappa_value,
                        KappaConvention convention) {
    if (!(mass_amu > 0) || !(wavenumber_per_m > 0) || !(kappa_value > 0))
        throw std::invalid_argument("recoil_frequency: inputs must be positive");
    const double m = mass_amu * kAtomicMass;
    const double omega_rec = kHbar * wavenumber_per_m * wavenumber_per_m / (2 * m);
    return omega_rec / kappa_angular(kappa_value, convention);
}

}  // namespace ringcav::units
