#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ringcav/params.hpp"
#include "ringcav/units.hpp"

using namespace ringcav;

namespace {

SystemParams<double> random_params(std::mt19937_64& g) {
    std::uniform_real_distribution<double> lg(-3, 1);
    SystemParams<double> p;
    p.kappa = std::pow(10.0, lg(g));
    p.delta = -std::pow(10.0, lg(g));
    p.u0 = std::pow(10.0, lg(g));
    p.eta = std::pow(10.0, lg(g) + 2);
    p.omega_rec = std::pow(10.0, lg(g));
    return p;
}

}  // namespace

TEST_CASE("cavity amplitude examples") {
    SystemParams<double> p{1, -0.3, 0.1, 10.3, 0.01};
    // 10.3 / sqrt(1.09) evaluated at 30 digits
    CHECK(derive_params(p).alpha == doctest::Approx(9.86561073777785934).epsilon(1e-15));

    p = {1, 0, 0.1, 5, 0.01};
    CHECK(derive_params(p).alpha == 5.0);
}

TEST_CASE("derived quantities satisfy their defining relations") {
    std::mt19937_64 g(3);
    for (int i = 0; i < 200; ++i) {
        const auto p = random_params(g);
        const auto d = derive_params(p);
        CHECK(d.u0_bar * d.u0_bar == doctest::Approx(p.u0 * d.omega_m / 2).epsilon(1e-13));
        CHECK(d.lamb_dicke * d.lamb_dicke == doctest::Approx(2 * p.omega_rec / d.omega_m).epsilon(1e-13));
        CHECK(d.omega_m == doctest::Approx(2 * d.alpha * std::sqrt(p.u0 * p.omega_rec)).epsilon(1e-14));
        CHECK(d.u0_prime == doctest::Approx(p.u0 * d.alpha).epsilon(1e-15));
    }
}

TEST_CASE("simultaneous rescaling leaves alpha fixed and scales omega_m linearly") {
    std::mt19937_64 g(5);
    for (int i = 0; i < 50; ++i) {
        const auto p = random_params(g);
        const double s = 3.7;
        const SystemParams<double> q{s * p.kappa, s * p.delta, s * p.u0, s * p.eta, s * p.omega_rec};
        const auto a = derive_params(p), b = derive_params(q);
        CHECK(b.alpha == doctest::Approx(a.alpha).epsilon(1e-13));
        CHECK(b.omega_m == doctest::Approx(s * a.omega_m).epsilon(1e-13));
    }
}

TEST_CASE("untrapped parameters are reported distinctly") {
    SystemParams<double> p{1, -1, 0, 5, 0.01};
    CHECK_THROWS_AS(derive_params(p), UntrappedError);
    p.u0 = 0.01;
    p.eta = 0;
    CHECK_THROWS_AS(derive_params(p), UntrappedError);
    CHECK(trap_frequency(p) == 0.0);
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(validate(SystemParams<double>{0, -1, 0.01, 1, 0.01}), std::invalid_argument);
    CHECK_THROWS_AS(validate(SystemParams<double>{1, -1, -0.01, 1, 0.01}), std::invalid_argument);
    CHECK_THROWS_AS(validate(SystemParams<double>{1, -1, 0.01, -1, 0.01}), std::invalid_argument);
    CHECK_THROWS_AS(validate(SystemParams<double>{1, -1, 0.01, 1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(SystemParams<double>{1, NAN, 0.01, 1, 0.01}), std::invalid_argument);
}

TEST_CASE("validity report at omega_m = 6, delta = -6") {
    SystemParams<double> p{1, -6, 0.01, 0, 0.01};
    p.eta = eta_for_trap(6.0, p);
    const auto r = validity_report(p);
    CHECK(r.ratios.rec_over_trap == doctest::Approx(0.01 / 6).epsilon(1e-12));
    CHECK(r.ratios.rec_over_detuning == doctest::Approx(0.01 / 6).epsilon(1e-12));
    // u0_bar = sqrt(u0 omega_m / 2) = sqrt(0.03)
    CHECK(r.ratios.coupling_over_kappa == doctest::Approx(0.17320508075688773).epsilon(1e-12));
    CHECK(r.ratios.sideband_parameter == doctest::Approx(666.0).epsilon(1e-12));
    CHECK(r.localization_ok);
    CHECK(r.detuning_ok);
    CHECK(r.sidebands_resolved);
    // u0_bar / kappa = 0.173 is not below the default 0.1 threshold
    CHECK_FALSE(r.perturbative_ok);
    ValidityThresholds th;
    th.perturbative = 0.2;
    CHECK(validity_report(p, th).perturbative_ok);
    CHECK(r.perturbative_bound_rhs == doctest::Approx(100.0));
}

TEST_CASE("validity flags at the thresholds") {
    SystemParams<double> p{1, 0, 0.01, 1, 0.01};
    p.delta = 0.5 * p.omega_rec;
    CHECK_FALSE(validity_report(p).detuning_ok);
    p.delta = -1;
    // 2 omega_rec u0 eta^2 / kappa^4 = 0.5
    p.eta = std::sqrt(0.5 / (2 * p.omega_rec * p.u0));
    CHECK(validity_report(p).ratios.sideband_parameter == doctest::Approx(0.5));
    CHECK_FALSE(validity_report(p).sidebands_resolved);
    p.eta = 0;
    const auto r = validity_report(p);
    CHECK(std::isinf(r.ratios.rec_over_trap));
    CHECK_FALSE(r.localization_ok);
    CHECK_FALSE(r.perturbative_ok);
}

TEST_CASE("optimal trap frequency limits and round trip") {
    SystemParams<double> p{1, -1, 0.0025, 0, 0.01};
    SUBCASE("weak pump") {
        p.eta = 1e-3;
        CHECK(optimal_trap_frequency(p) == doctest::Approx(2 * p.eta * std::sqrt(p.omega_rec * p.u0)).epsilon(1e-9));
    }
    SUBCASE("strong pump") {
        p.eta = 1e12;
        CHECK(optimal_trap_frequency(p) ==
              doctest::Approx(std::sqrt(2 * p.eta) * std::pow(p.omega_rec * p.u0, 0.25)).epsilon(1e-5));
    }
    SUBCASE("inverse") {
        p.eta = eta_for_optimal_trap(6.0, p);
        CHECK(std::abs(optimal_trap_frequency(p) - 6.0) < 1e-12 * 6);
        const auto q = with_optimal_detuning(p);
        CHECK(q.delta == doctest::Approx(-6.0).epsilon(1e-14));
        CHECK(trap_frequency(q) == doctest::Approx(6.0).epsilon(1e-13));
    }
}

TEST_CASE("optimal trap frequency solves the quartic") {
    std::mt19937_64 g(11);
    for (int i = 0; i < 200; ++i) {
        const auto p = random_params(g);
        const double w = optimal_trap_frequency(p);
        const double k2 = p.kappa * p.kappa;
        const double c = 4 * p.omega_rec * p.u0 * p.eta * p.eta;
        const double resid = std::pow(w, 4) + k2 * w * w - c;
        CHECK(std::abs(resid) <= 1e-12 * std::max({std::pow(w, 4), k2 * w * w, c}));
    }
}

TEST_CASE("recoil frequency conversion under both kappa readings") {
    using units::KappaConvention;
    const double k = 2 * M_PI * 1e6;
    const double cyc = units::recoil_frequency(77, k, 1e6, KappaConvention::Cyclic);
    const double ang = units::recoil_frequency(77, k, 1e6, KappaConvention::Angular);
    CHECK(ang == doctest::Approx(2 * M_PI * cyc).epsilon(1e-12));
    // hbar k^2 / 2m with m = 77 u, divided by 2 pi x 1 MHz
    const double hbar = 1.054571817e-34, amu = 1.66053906660e-27;
    CHECK(cyc == doctest::Approx(hbar * k * k / (2 * 77 * amu) / (2 * M_PI * 1e6)).epsilon(1e-9));
    CHECK(cyc == doctest::Approx(2.591e-3).epsilon(1e-3));
    CHECK(units::kappa_angular(1e6, KappaConvention::Cyclic) == doctest::Approx(2 * M_PI * 1e6));
}
