// SI to dimensionless conversion

#pragma once

namespace ringcav::units {

// A quoted "kappa = X Hz" is ambiguous; both readings are supported.
enum class KappaConvention {
    Angular,  // kappa = X rad/s
    Cyclic,   // kappa / 2pi = X Hz
};

/// omega_rec = hbar k^2 / 2m expressed in units of kappa.
double recoil_frequency(double mass_amu, double wavenumber_per_m, double kappa_value,
                        KappaConvention convention);

/// kappa in rad/s for the given convention.
double kappa_angular(double kappa_value, KappaConvention convention);

}  // namespace ringcav::units
