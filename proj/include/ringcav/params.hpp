// Physical parameters, derived trap quantities and regime diagnostics
//
// Unit system: kappa sets the frequency scale, hbar = 1, momentum in units of
// hbar*k and position in units of 1/k. All frequencies are plain multiples of
// the same unit (normally kappa = 1).
//
// Sign convention: u0 > 0 is a high-field seeker (red atomic detuning). The
// particle sits at the antinodes of the driven cosine mode where the
// light-shift potential -u0*|alpha|^2*cos^2(kx) is deepest.

#pragma once

#include <cmath>
#include <stdexcept>

#include "ringcav/errors.hpp"

namespace ringcav {

template <typename Scalar = double>
struct SystemParams {
    Scalar kappa{1};       // cavity amplitude decay rate; fields decay at 2*kappa
    Scalar delta{-1};      // pump-cavity detuning omega_p - omega_c
    Scalar u0{0.01};       // single-photon light shift g^2/Delta_a
    Scalar eta{0};         // cosine-mode pump amplitude, real by phase choice
    Scalar omega_rec{0.01};  // recoil frequency hbar k^2 / 2m

    template <typename Other>
    SystemParams<Other> cast() const {
        return {Other(kappa), Other(delta), Other(u0), Other(eta), Other(omega_rec)};
    }
};

template <typename Scalar>
void validate(const SystemParams<Scalar>& p) {
    using std::isfinite;
    if (!(isfinite(p.kappa) && isfinite(p.delta) && isfinite(p.u0) && isfinite(p.eta) &&
          isfinite(p.omega_rec)))
        throw std::invalid_argument("SystemParams: non-finite value");
    if (!(p.kappa > 0)) throw std::invalid_argument("SystemParams: kappa must be > 0");
    if (p.eta < 0) throw std::invalid_argument("SystemParams: eta must be >= 0");
    if (p.u0 < 0) throw std::invalid_argument("SystemParams: u0 must be >= 0");
    if (!(p.omega_rec > 0)) throw std::invalid_argument("SystemParams: omega_rec must be > 0");
}

template <typename Scalar = double>
struct DerivedParams {
    Scalar alpha;       // steady cosine-mode amplitude
    Scalar omega_m;     // harmonic trap frequency
    Scalar lamb_dicke;  // k * x_zpm
    Scalar u0_bar;      // linear optomechanical coupling
    Scalar u0_prime;    // u0 * k * alpha, per unit kx
};

/// Steady cosine-mode amplitude in the weak-coupling approximation.
template <typename Scalar>
Scalar cavity_amplitude(const SystemParams<Scalar>& p) {
    using std::sqrt;
    return p.eta / sqrt(p.kappa * p.kappa + p.delta * p.delta);
}

template <typename Scalar>
Scalar trap_frequency(const SystemParams<Scalar>& p) {
    using std::sqrt;
    return Scalar(2) * cavity_amplitude(p) * sqrt(p.u0 * p.omega_rec);
}

/// All trap-dependent quantities. Throws UntrappedError when u0 or eta vanish,
/// since omega_m = 0 leaves the Lamb-Dicke factor undefined.
template <typename Scalar>
DerivedParams<Scalar> derive_params(const SystemParams<Scalar>& p) {
    using std::sqrt;
    validate(p);
    if (p.u0 == Scalar(0) || p.eta == Scalar(0))
        throw UntrappedError("derive_params: u0 and eta must both be nonzero for a trap to exist");
    DerivedParams<Scalar> d;
    d.alpha = cavity_amplitude(p);
    d.omega_m = Scalar(2) * d.alpha * sqrt(p.u0 * p.omega_rec);
    d.lamb_dicke = sqrt(Scalar(2) * p.omega_rec / d.omega_m);
    d.u0_bar = d.lamb_dicke * p.u0 * d.alpha;
    d.u0_prime = p.u0 * d.alpha;
    return d;
}

// Thresholds for reading the "much less than" conditions as ratio < threshold.
struct ValidityThresholds {
    double localization = 0.1;   // omega_rec / omega_m
    double perturbative = 0.1;   // u0_bar / kappa
    double detuning = 1.0;       // omega_rec / |delta| must be strictly below this
    double sideband = 1.0;       // 2 omega_rec u0 eta^2 / kappa^4 must strictly exceed this
};

struct ValidityRatios {
    double rec_over_trap = 0;       // omega_rec / omega_m
    double rec_over_detuning = 0;   // omega_rec / |delta|
    double coupling_over_kappa = 0; // u0_bar / kappa
    double sideband_parameter = 0;  // 2 omega_rec u0 eta^2 / kappa^4
};

struct ValidityReport {
    bool localization_ok = false;
    bool detuning_ok = false;
    bool perturbative_ok = false;
    bool sidebands_resolved = false;
    ValidityRatios ratios;
    // Perturbative bound restated as sideband_parameter << kappa/u0.
    double perturbative_bound_rhs = 0;
    bool perturbative_bound_ok = false;
};

/// Regime diagnostics; never throws for valid parameters. An untrapped system
/// reports infinite ratios and every trap-dependent flag false.
template <typename Scalar>
ValidityReport validity_report(const SystemParams<Scalar>& ps,
                               const ValidityThresholds& th = {}) {
    const auto p = ps.template cast<double>();
    validate(p);
    ValidityReport r;
    const double inf = INFINITY;
    const double omega_m = trap_frequency(p);
    const double alpha = cavity_amplitude(p);
    r.ratios.rec_over_trap = omega_m > 0 ? p.omega_rec / omega_m : inf;
    r.ratios.rec_over_detuning = p.delta != 0 ? p.omega_rec / std::abs(p.delta) : inf;
    r.ratios.coupling_over_kappa =
        omega_m > 0 ? std::sqrt(2 * p.omega_rec / omega_m) * p.u0 * alpha / p.kappa : 0;
    const double k4 = std::pow(p.kappa, 4);
    r.ratios.sideband_parameter = 2 * p.omega_rec * p.u0 * p.eta * p.eta / k4;

    r.localization_ok = r.ratios.rec_over_trap < th.localization;
    r.detuning_ok = r.ratios.rec_over_detuning < th.detuning;
    r.perturbative_ok = omega_m > 0 && r.ratios.coupling_over_kappa < th.perturbative;
    r.sidebands_resolved = r.ratios.sideband_parameter > th.sideband;
    r.perturbative_bound_rhs = p.u0 > 0 ? p.kappa / p.u0 : inf;
    r.perturbative_bound_ok =
        r.ratios.sideband_parameter < th.perturbative * r.perturbative_bound_rhs;
    return r;
}

/// Trap frequency that satisfies delta = -omega_m self-consistently,
/// i.e. the positive root of w^4 + kappa^2 w^2 - 4 omega_rec u0 eta^2 = 0.
/// The detuning stored in p is ignored.
template <typename Scalar>
Scalar optimal_trap_frequency(const SystemParams<Scalar>& p) {
    using std::sqrt;
    const Scalar k2 = p.kappa * p.kappa;
    const Scalar s = p.omega_rec * p.u0 * p.eta * p.eta / (k2 * k2);
    // (k^2/2)(sqrt(1+16s) - 1) rewritten without cancellation
    const Scalar w2 = Scalar(8) * k2 * s / (sqrt(Scalar(1) + Scalar(16) * s) + Scalar(1));
    return sqrt(w2);
}

/// Pump amplitude producing trap frequency omega_m at delta = -omega_m.
template <typename Scalar>
Scalar eta_for_optimal_trap(Scalar omega_m, const SystemParams<Scalar>& p) {
    using std::sqrt;
    const Scalar w2 = omega_m * omega_m;
    return sqrt(w2 * (p.kappa * p.kappa + w2) / (Scalar(4) * p.omega_rec * p.u0));
}

/// Pump amplitude producing trap frequency omega_m at the detuning stored in p.
template <typename Scalar>
Scalar eta_for_trap(Scalar omega_m, const SystemParams<Scalar>& p) {
    using std::sqrt;
    const Scalar alpha = omega_m / (Scalar(2) * sqrt(p.u0 * p.omega_rec));
    return alpha * sqrt(p.kappa * p.kappa + p.delta * p.delta);
}

/// Copy of p with delta = -omega_m enforced for the given pump.
template <typename Scalar>
SystemParams<Scalar> with_optimal_detuning(SystemParams<Scalar> p) {
    p.delta = -optimal_trap_frequency(p);
    return p;
}

}  // namespace ringcav
