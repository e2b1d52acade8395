#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "ringcav/classical.hpp"
#include "ringcav/moments.hpp"

using namespace ringcav;

namespace {

LinearizedParams<double> lp(double omega_m, double delta, double u0_bar, double kappa = 1) {
    return {kappa, delta, omega_m, u0_bar, 0.01};
}

LinearizedParams<double> random_lp(std::mt19937_64& g) {
    std::uniform_real_distribution<double> lg(-1.5, 1.5), uu(-3, -0.7);
    return lp(std::pow(10.0, lg(g)), -std::pow(10.0, lg(g)), std::pow(10.0, uu(g)), std::pow(10.0, lg(g) / 3));
}

MomentState<double> random_state(std::mt19937_64& g) {
    std::normal_distribution<double> n;
    MomentVector<double> v;
    for (int i = 0; i < 10; ++i) v(i) = n(g);
    return MomentState<double>::unpack(v);
}

}  // namespace

TEST_CASE("packing round trip") {
    std::mt19937_64 g(1);
    const auto m = random_state(g);
    const auto v = m.pack();
    CHECK(MomentState<double>::unpack(v).pack() == v);
    CHECK(v(4) == m.aq.real());
    CHECK(v(9) == m.a2.imag());
}

TEST_CASE("vacuum is a fixed point without coupling") {
    const auto d = moment_rhs(MomentState<double>::vacuum(), lp(6, -6, 0));
    CHECK(d.pack().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("uncoupled blocks: field decays at 2 kappa, motion rotates at 2 omega_m") {
    const auto s = moment_system(lp(3, -2, 0, 0.7));
    CHECK(s.drift(0, 0) == doctest::Approx(-1.4));
    Eigen::Matrix3d motion = s.drift.block<3, 3>(1, 1);
    Eigen::EigenSolver<Eigen::Matrix3d> es(motion);
    std::vector<double> im;
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(es.eigenvalues()(i).real()) < 1e-12);
        im.push_back(std::abs(es.eigenvalues()(i).imag()));
    }
    std::sort(im.begin(), im.end());
    CHECK(im[0] == doctest::Approx(0.0));
    CHECK(im[2] == doctest::Approx(6.0));

    // a field-only initial state decays as exp(-2 kappa t)
    MomentState<double> m0 = MomentState<double>::vacuum();
    m0.n_a = 3;
    const auto series = integrate_moments(m0, lp(3, -2, 0, 0.7), {0, 0.5, 1, 2});
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(series.states[k].n_a == doctest::Approx(3 * std::exp(-1.4 * series.times[k])).epsilon(1e-8));
}

TEST_CASE("rhs agrees with a finite difference of the integrator") {
    std::mt19937_64 g(2);
    for (int i = 0; i < 10; ++i) {
        const auto p = random_lp(g);
        const auto m0 = random_state(g);
        const double h = 1e-5;
        ode::Tolerances tol;
        tol.rtol = 1e-13;
        tol.atol = 1e-15;
        const auto s = integrate_moments(m0, p, {0, h}, tol);
        const MomentVector<double> fd = (s.states[1].pack() - m0.pack()) / h;
        const MomentVector<double> rhs = moment_rhs(m0, p).pack();
        const MomentVector<double> rhs_mid = moment_rhs(MomentState<double>::unpack((m0.pack() + s.states[1].pack()) / 2), p).pack();
        CHECK((fd - rhs_mid).norm() <= 1e-6 * std::max(1.0, rhs.norm()));
    }
}

TEST_CASE("closed-form examples") {
    const auto s = steady_state_moments(lp(6, -6, 1e-3));
    // closed forms evaluated at 30 digits
    CHECK(s.q2 == doctest::Approx(0.506944458333334084).epsilon(1e-13));
    CHECK(s.p2 == doctest::Approx(0.506944444444444444).epsilon(1e-13));
    CHECK(s.n_a == doctest::Approx(6.94444481981984011e-9).epsilon(1e-10));
    CHECK(occupancy_from_moments(s) == doctest::Approx(1.0 / 144).epsilon(1e-6));
    CHECK(occupancy_from_moments(steady_state_moments(lp(6, -6, 1e-6))) == doctest::Approx(1.0 / 144).epsilon(1e-9));
}

TEST_CASE("steady state: linear solve, closed forms and identities agree") {
    std::mt19937_64 g(3);
    for (int i = 0; i < 200; ++i) {
        const auto p = random_lp(g);
        const auto s = steady_state_moments(p);
        const auto c = closed_form_steady_state(p);
        CHECK(s.n_a == doctest::Approx(c.n_a).epsilon(1e-10));
        CHECK(s.q2 == doctest::Approx(c.q2).epsilon(1e-10));
        CHECK(s.p2 == doctest::Approx(c.p2).epsilon(1e-10));
        const double scale = s.pack().cwiseAbs().maxCoeff();
        CHECK(moment_rhs(s, p).pack().cwiseAbs().maxCoeff() <= 1e-12 * scale * std::max({1.0, p.kappa, p.omega_m, std::abs(p.delta)}));
        CHECK(s.n_a == doctest::Approx(-(p.omega_m / (2 * p.delta)) * (s.q2 - s.p2)).epsilon(1e-9));
        CHECK(s.q2 > 0);
        CHECK(s.p2 > 0);
        CHECK(s.n_a >= 0);
        CHECK(s.q2 * s.p2 - s.acorr * s.acorr / 4 >= 0.25 - 1e-12);
    }
}

TEST_CASE("no steady state on the heating side") {
    CHECK_THROWS_AS(steady_state_moments(lp(6, 0, 0.1)), NoSteadyStateError);
    SystemParams<double> p{1, 1, 0.01, 10, 0.01};
    CHECK_THROWS_AS(steady_state_moments(p), NoSteadyStateError);
}

TEST_CASE("occupancy from moments") {
    CHECK(occupancy_from_moments(MomentState<double>::vacuum()) == 0.0);
    MomentState<double> m;
    m.q2 = m.p2 = 1.5;
    CHECK(occupancy_from_moments(m) == 1.0);
    m.q2 = m.p2 = 0.2;
    CHECK(occupancy_from_moments(m) < 0);
}

TEST_CASE("long-time integration reaches the steady state") {
    const auto p = lp(6, -6, 0.05);
    const double gamma = cooling_summary(p).gamma_cool;
    ode::Tolerances tol;
    tol.rtol = 1e-12;
    tol.atol = 1e-14;
    const auto s = integrate_moments(MomentState<double>::vacuum(), p, {20 / gamma}, tol);
    const auto ss = steady_state_moments(p);
    const MomentVector<double> diff = s.states[0].pack() - ss.pack();
    CHECK(diff.cwiseAbs().maxCoeff() <= 1e-6 * ss.pack().cwiseAbs().maxCoeff());
}

TEST_CASE("a hot start cools monotonically on the envelope") {
    const auto p = lp(6, -6, 0.05);
    MomentState<double> m0 = MomentState<double>::vacuum();
    m0.q2 = m0.p2 = 50;
    const auto times = classical::uniform_grid(0, 3000, 301);
    const auto s = integrate_moments(m0, p, times);
    const double target = occupancy_from_moments(steady_state_moments(p));
    // envelope: maximum over each window of 10 samples
    double prev = INFINITY;
    for (std::size_t k = 0; k + 10 <= times.size(); k += 10) {
        double env = -INFINITY;
        for (std::size_t j = k; j < k + 10; ++j) env = std::max(env, occupancy_from_moments(s.states[j]));
        CHECK(env <= prev);
        prev = env;
    }
    CHECK(occupancy_from_moments(s.states.back()) == doctest::Approx(target).epsilon(0.05));
}

TEST_CASE("slowest relaxation matches the sideband cooling rate") {
    for (double u : {0.01, 0.05}) {
        const auto p = lp(6, -6, u);
        CHECK(relaxation_rate(p) == doctest::Approx(cooling_summary(p).gamma_cool).epsilon(0.02));
    }
}
