// Sideband-cooling rates of the linearized particle/sine-mode model
//
// Sideband scattering rate convention:
//     A(w) = kappa * u0_bar^2 / (kappa^2 + (w + delta)^2)
// peaked at w = -delta. With Gamma = A(omega_m) - A(-omega_m) this gives cooling
// (Gamma > 0) for delta < 0 and n_at = A(-omega_m) / Gamma reduces exactly to
// (kappa^2 + (omega_m + delta)^2) / (-4 omega_m delta).

#pragma once

#include <cmath>
#include <stdexcept>

#include "ringcav/errors.hpp"
#include "ringcav/params.hpp"

namespace ringcav {

/// Inputs of the linearized model. omega_rec is optional (0 = unknown) and is
/// only used to flag the small-detuning divergence.
template <typename Scalar = double>
struct LinearizedParams {
    Scalar kappa{1};
    Scalar delta{-1};
    Scalar omega_m{1};
    Scalar u0_bar{0};
    Scalar omega_rec{0};

    /// Single-photon light shift implied by u0_bar^2 = u0 * omega_m / 2.
    Scalar u0() const { return Scalar(2) * u0_bar * u0_bar / omega_m; }
};

template <typename Scalar>
LinearizedParams<Scalar> linearize(const SystemParams<Scalar>& p) {
    const auto d = derive_params(p);
    return {p.kappa, p.delta, d.omega_m, d.u0_bar, p.omega_rec};
}

template <typename Scalar>
Scalar sideband_rate(Scalar omega, const LinearizedParams<Scalar>& lp) {
    const Scalar w = omega + lp.delta;
    return lp.kappa * lp.u0_bar * lp.u0_bar / (lp.kappa * lp.kappa + w * w);
}

template <typename Scalar>
Scalar sideband_rate(Scalar omega, const SystemParams<Scalar>& p) {
    return sideband_rate(omega, linearize(p));
}

template <typename Scalar = double>
struct SidebandResult {
    Scalar a_plus;      // anti-Stokes rate A(omega_m)
    Scalar a_minus;     // Stokes rate A(-omega_m)
    Scalar gamma_cool;  // A(omega_m) - A(-omega_m)
    Scalar n_at;        // final phonon occupancy
    Scalar n_a;         // perturbative steady sine-mode photon number u0 / (-8 delta)
    bool divergence_warning = false;  // |delta| < omega_rec: linearization breaks down
};

template <typename Scalar>
SidebandResult<Scalar> cooling_summary(const LinearizedParams<Scalar>& lp) {
    using std::abs;
    if (!(lp.delta < 0))
        throw HeatingRegimeError("cooling_summary: delta >= 0 is the heating side");
    if (!(lp.omega_m > 0)) throw UntrappedError("cooling_summary: omega_m must be > 0");
    SidebandResult<Scalar> r;
    r.a_plus = sideband_rate(lp.omega_m, lp);
    r.a_minus = sideband_rate(-lp.omega_m, lp);
    r.gamma_cool = r.a_plus - r.a_minus;
    const Scalar w = lp.omega_m + lp.delta;
    r.n_at = (lp.kappa * lp.kappa + w * w) / (Scalar(-4) * lp.omega_m * lp.delta);
    r.n_a = lp.u0() / (Scalar(-8) * lp.delta);
    r.divergence_warning = lp.omega_rec > 0 && abs(lp.delta) < lp.omega_rec;
    return r;
}

template <typename Scalar>
SidebandResult<Scalar> cooling_summary(const SystemParams<Scalar>& p) {
    if (!(p.delta < 0))
        throw HeatingRegimeError("cooling_summary: delta >= 0 is the heating side");
    return cooling_summary(linearize(p));
}

template <typename Scalar = double>
struct SpontaneousEmissionParams {
    Scalar gamma{0};    // excited-state linewidth
    Scalar g{0};        // single-photon coupling
    Scalar delta_a{1};  // atomic detuning omega_a - omega_p

    Scalar gamma0() const { return gamma * g * g / (delta_a * delta_a); }
};

template <typename Scalar = double>
struct SpontaneousCorrections {
    Scalar gamma0;
    Scalar gamma0_bar;             // (k x_zpm) * gamma0 * alpha
    Scalar renormalized_coupling;  // sqrt(u0_bar^2 + gamma0_bar^2)
    Scalar diffusion_rate;         // gamma0_bar * alpha^2 * (k x_zpm)^2, geometric factor 1
};

template <typename Scalar>
SpontaneousCorrections<Scalar> spontaneous_corrections(const SystemParams<Scalar>& p,
                                                       const SpontaneousEmissionParams<Scalar>& se) {
    using std::sqrt;
    if (se.delta_a == Scalar(0))
        throw std::invalid_argument("spontaneous_corrections: delta_a must be nonzero");
    const auto d = derive_params(p);
    SpontaneousCorrections<Scalar> c;
    c.gamma0 = se.gamma0();
    c.gamma0_bar = d.lamb_dicke * c.gamma0 * d.alpha;
    c.renormalized_coupling = sqrt(d.u0_bar * d.u0_bar + c.gamma0_bar * c.gamma0_bar);
    c.diffusion_rate = c.gamma0_bar * d.alpha * d.alpha * d.lamb_dicke * d.lamb_dicke;
    return c;
}

}  // namespace ringcav
