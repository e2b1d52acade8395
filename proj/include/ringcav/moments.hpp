// Closed second-moment equations of the linearized model
//
// Real packing of MomentState (frozen; CSV column order follows it):
//   0 n_a   1 q2   2 p2   3 acorr   4 Re<aQ>   5 Im<aQ>   6 Re<aP>   7 Im<aP>
//   8 Re<a^2>   9 Im<a^2>
// The dynamics is affine, x' = M x + b, with b the vacuum term u0_bar/2 in Re<aP>.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ringcav/errors.hpp"
#include "ringcav/linear.hpp"
#include "ringcav/ode.hpp"
#include "ringcav/params.hpp"

namespace ringcav {

template <typename Scalar>
using MomentVector = Eigen::Matrix<Scalar, 10, 1>;
template <typename Scalar>
using MomentMatrix = Eigen::Matrix<Scalar, 10, 10>;

template <typename Scalar = double>
struct MomentState {
    Scalar n_a{0};   // <a^dag a>
    Scalar q2{0};    // <Q^2>
    Scalar p2{0};    // <P^2>
    Scalar acorr{0}; // <QP + PQ>
    std::complex<Scalar> aq{};
    std::complex<Scalar> ap{};
    std::complex<Scalar> a2{};

    static MomentState vacuum() {
        MomentState m;
        m.q2 = m.p2 = Scalar(0.5);
        return m;
    }

    MomentVector<Scalar> pack() const {
        MomentVector<Scalar> v;
        v << n_a, q2, p2, acorr, aq.real(), aq.imag(), ap.real(), ap.imag(), a2.real(), a2.imag();
        return v;
    }

    static MomentState unpack(const MomentVector<Scalar>& v) {
        MomentState m;
        m.n_a = v(0);
        m.q2 = v(1);
        m.p2 = v(2);
        m.acorr = v(3);
        m.aq = {v(4), v(5)};
        m.ap = {v(6), v(7)};
        m.a2 = {v(8), v(9)};
        return m;
    }
};

template <typename Scalar = double>
struct MomentSystem {
    MomentMatrix<Scalar> drift;
    MomentVector<Scalar> source;
};

template <typename Scalar>
MomentSystem<Scalar> moment_system(const LinearizedParams<Scalar>& lp) {
    const Scalar k = lp.kappa, d = lp.delta, w = lp.omega_m, u = lp.u0_bar;
    MomentSystem<Scalar> s;
    auto& M = s.drift;
    M.setZero();
    s.source.setZero();
    // d<a^dag a>/dt = -2k n - i u (<aQ> - <a^dag Q>)
    M(0, 0) = -2 * k;
    M(0, 5) = 2 * u;
    // d<Q^2>/dt = w A
    M(1, 3) = w;
    // d<P^2>/dt = -w A + 2u (<aP> + <a^dag P>)
    M(2, 3) = -w;
    M(2, 6) = 4 * u;
    // dA/dt = 2w (P^2 - Q^2) + 2u (<aQ> + <a^dag Q>)
    M(3, 1) = -2 * w;
    M(3, 2) = 2 * w;
    M(3, 4) = 4 * u;
    // d<aQ>/dt = w <aP> - (k - i d) <aQ> + i u <Q^2>
    M(4, 4) = -k;
    M(4, 5) = -d;
    M(4, 6) = w;
    M(5, 4) = d;
    M(5, 5) = -k;
    M(5, 7) = w;
    M(5, 1) = u;
    // d<aP>/dt = (-k + i d) <aP> - w <aQ> + u (n + 1/2 + <a^2> + i A / 2)
    M(6, 6) = -k;
    M(6, 7) = -d;
    M(6, 4) = -w;
    M(6, 0) = u;
    M(6, 8) = u;
    s.source(6) = u / 2;
    M(7, 6) = d;
    M(7, 7) = -k;
    M(7, 5) = -w;
    M(7, 9) = u;
    M(7, 3) = u / 2;
    // d<a^2>/dt = -2 (k - i d) <a^2> + 2 i u <aQ>
    M(8, 8) = -2 * k;
    M(8, 9) = -2 * d;
    M(8, 5) = -2 * u;
    M(9, 8) = 2 * d;
    M(9, 9) = -2 * k;
    M(9, 4) = 2 * u;
    return s;
}

template <typename Scalar>
MomentState<Scalar> moment_rhs(const MomentState<Scalar>& m, const LinearizedParams<Scalar>& lp) {
    const auto s = moment_system(lp);
    return MomentState<Scalar>::unpack(s.drift * m.pack() + s.source);
}

template <typename Scalar>
MomentState<Scalar> moment_rhs(const MomentState<Scalar>& m, const SystemParams<Scalar>& p) {
    return moment_rhs(m, linearize(p));
}

/// The three stationary moments that have compact closed forms.
template <typename Scalar = double>
struct ClosedFormMoments {
    Scalar n_a, q2, p2;
};

template <typename Scalar>
Scalar steady_state_denominator(const LinearizedParams<Scalar>& lp) {
    const Scalar k2d2 = lp.kappa * lp.kappa + lp.delta * lp.delta;
    const Scalar u2 = lp.u0_bar * lp.u0_bar;
    return Scalar(4) * lp.omega_m * lp.delta * k2d2 + Scalar(8) * u2 * lp.delta * lp.delta;
}

template <typename Scalar>
ClosedFormMoments<Scalar> closed_form_steady_state(const LinearizedParams<Scalar>& lp) {
    const Scalar k2 = lp.kappa * lp.kappa, d2 = lp.delta * lp.delta, w = lp.omega_m;
    const Scalar u2 = lp.u0_bar * lp.u0_bar;
    const Scalar den = steady_state_denominator(lp);
    if (den == Scalar(0)) throw NoSteadyStateError("closed_form_steady_state: singular denominator");
    ClosedFormMoments<Scalar> c;
    c.n_a = -u2 * (d2 + k2) / den;
    c.q2 = -((k2 + w * w + d2) * (k2 + d2) + 2 * u2 * w * lp.delta) / den;
    c.p2 = -((k2 + w * w + d2 + 2 * u2 * lp.delta / w) * (k2 + d2) + 2 * u2 * w * lp.delta) / den;
    return c;
}

/// Full ten-component stationary state from the exact linear solve M x = -b.
template <typename Scalar>
MomentState<Scalar> steady_state_moments(const LinearizedParams<Scalar>& lp) {
    using std::abs;
    const Scalar den = steady_state_denominator(lp);
    const Scalar scale = Scalar(4) * abs(lp.omega_m * lp.delta) *
                         (lp.kappa * lp.kappa + lp.delta * lp.delta);
    if (!(lp.delta < 0) || abs(den) <= Eigen::NumTraits<Scalar>::epsilon() * scale)
        throw NoSteadyStateError("steady_state_moments: no stationary state (heating regime)");
    const auto s = moment_system(lp);
    Eigen::FullPivLU<MomentMatrix<Scalar>> lu(s.drift);
    if (!lu.isInvertible())
        throw NoSteadyStateError("steady_state_moments: singular moment system");
    MomentVector<Scalar> x = lu.solve(-s.source);
    // one step of iterative refinement
    x += lu.solve(-s.source - s.drift * x);
    return MomentState<Scalar>::unpack(x);
}

template <typename Scalar>
MomentState<Scalar> steady_state_moments(const SystemParams<Scalar>& p) {
    if (!(p.delta < 0))
        throw NoSteadyStateError("steady_state_moments: delta >= 0 has no stationary state");
    return steady_state_moments(linearize(p));
}

/// Symmetric-quadrature phonon number (q2 + p2)/2 - 1/2; not clamped.
template <typename Scalar>
Scalar occupancy_from_moments(const MomentState<Scalar>& m) {
    return (m.q2 + m.p2) / Scalar(2) - Scalar(0.5);
}

/// Slowest relaxation rate of the moment dynamics, -max Re(eig M).
template <typename Scalar>
Scalar relaxation_rate(const LinearizedParams<Scalar>& lp) {
    const auto s = moment_system(lp);
    Eigen::EigenSolver<MomentMatrix<Scalar>> es(s.drift, false);
    Scalar slowest = -std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index i = 0; i < 10; ++i) slowest = std::max(slowest, Scalar(es.eigenvalues()(i).real()));
    return -slowest;
}

template <typename Scalar = double>
struct MomentSeries {
    std::vector<double> times;
    std::vector<MomentState<Scalar>> states;
};

/// Adaptive integration of the affine moment system from t = 0.
inline MomentSeries<double> integrate_moments(const MomentState<double>& m0,
                                              const LinearizedParams<double>& lp,
                                              const std::vector<double>& times,
                                              ode::Tolerances tol = {}) {
    using Vec = Eigen::VectorXd;
    const auto sys = moment_system(lp);
    auto rhs = [sys](double, const Vec& x, Vec& dx) { dx.noalias() = sys.drift * x + sys.source; };
    const Vec x0 = m0.pack();
    const auto xs = ode::integrate<Vec>(rhs, x0, 0.0, times, tol);
    MomentSeries<double> out;
    out.times = times;
    out.states.reserve(xs.size());
    for (const auto& x : xs) out.states.push_back(MomentState<double>::unpack(x));
    return out;
}

}  // namespace ringcav
