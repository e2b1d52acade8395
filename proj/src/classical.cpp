#include "ringcav/classical.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

namespace ringcav::classical {

ClassicalState::Packed ClassicalState::pack() const {
    Packed v;
    v << alpha_c.real(), alpha_c.imag(), alpha_s.real(), alpha_s.imag(), x, p;
    return v;
}

ClassicalState ClassicalState::unpack(const Eigen::Ref<const Eigen::VectorXd>& v) {
    return {{v(0), v(1)}, {v(2), v(3)}, v(4), v(5)};
}

PotentialTriple potentials(double x, double u0, Geometry g) {
    const double c = std::cos(x), s = std::sin(x);
    const double s2 = std::sin(2 * x), c2 = std::cos(2 * x);
    PotentialTriple u;
    u.u_c = u0 * c * c;
    u.u_s = u0 * s * s;
    u.du_c = -u0 * s2;
    u.du_s = u0 * s2;
    if (g == Geometry::Ring) {
        u.u_cs = 0.5 * u0 * s2;
        u.du_cs = u0 * c2;
    } else {
        u.u_cs = 0;
        u.du_cs = 0;
    }
    return u;
}

double light_shift(const ClassicalState& s, double u0, Geometry g) {
    const auto u = potentials(s.x, u0, g);
    return std::norm(s.alpha_c) * u.u_c + std::norm(s.alpha_s) * u.u_s +
           2 * (std::conj(s.alpha_c) * s.alpha_s).real() * u.u_cs;
}

ClassicalState classical_rhs(const ClassicalState& s, const SystemParams<double>& p, Geometry g) {
    const cplx i{0, 1};
    const auto u = potentials(s.x, p.u0, g);
    ClassicalState d;
    d.alpha_c = (-p.kappa + i * (p.delta + u.u_c)) * s.alpha_c + i * s.alpha_s * u.u_cs + p.eta;
    d.alpha_s = (-p.kappa + i * (p.delta + u.u_s)) * s.alpha_s + i * s.alpha_c * u.u_cs;
    d.x = 2 * p.omega_rec * s.p;
    d.p = std::norm(s.alpha_c) * u.du_c + std::norm(s.alpha_s) * u.du_s +
          2 * (std::conj(s.alpha_c) * s.alpha_s).real() * u.du_cs;
    return d;
}

double kinetic_energy(const ClassicalState& s, const SystemParams<double>& p) {
    return p.omega_rec * s.p * s.p;
}

double total_energy(const ClassicalState& s, const SystemParams<double>& p, Geometry g) {
    return kinetic_energy(s, p) - p.delta * (std::norm(s.alpha_c) + std::norm(s.alpha_s)) -
           light_shift(s, p.u0, g);
}

cplx steady_cosine_amplitude(const SystemParams<double>& p, double x) {
    const auto u = potentials(x, p.u0);
    return p.eta / cplx(p.kappa, -(p.delta + u.u_c));
}

ClassicalSeries integrate_classical(const ClassicalState& s0, const SystemParams<double>& p,
                                    Geometry g, const std::vector<double>& times, double rtol) {
    validate(p);
    if (!(rtol > 0 && rtol <= 1e-3))
        throw std::invalid_argument("integrate_classical: tolerance must be in (0, 1e-3]");
    using Vec = Eigen::VectorXd;
    auto rhs = [&p, g](double, const Vec& y, Vec& dy) {
        dy = classical_rhs(ClassicalState::unpack(y), p, g).pack();
    };
    ode::Tolerances tol;
    tol.rtol = rtol;
    tol.atol = rtol * 1e-2;
    const Vec y0 = s0.pack();
    const auto ys = ode::integrate<Vec>(rhs, y0, 0.0, times, tol);
    ClassicalSeries out;
    out.times = times;
    out.states.reserve(ys.size());
    for (const auto& y : ys) out.states.push_back(ClassicalState::unpack(y));
    return out;
}

std::vector<double> uniform_grid(double t0, double t1, int n) {
    if (n < 2) throw std::invalid_argument("uniform_grid: need at least two points");
    std::vector<double> t(n);
    for (int k = 0; k < n; ++k) t[k] = t0 + (t1 - t0) * double(k) / double(n - 1);
    t.back() = t1;
    return t;
}

double envelope_window(const SystemParams<double>& p, double t_max) {
    const double w = trap_frequency(p);
    return w > 0 ? 2 * std::numbers::pi / w : t_max / 50;
}

GeometryRun analyse_run(ClassicalSeries series, const SystemParams<double>& p, double window) {
    GeometryRun r;
    const auto n = series.times.size();
    r.e_kin.resize(n);
    for (std::size_t k = 0; k < n; ++k) r.e_kin[k] = kinetic_energy(series.states[k], p);

    // trailing-window maximum (monotone deque)
    r.envelope.resize(n);
    std::deque<std::size_t> dq;
    std::size_t lo = 0;
    for (std::size_t k = 0; k < n; ++k) {
        while (!dq.empty() && r.e_kin[dq.back()] <= r.e_kin[k]) dq.pop_back();
        dq.push_back(k);
        while (series.times[k] - series.times[lo] > window) ++lo;
        while (dq.front() < lo) dq.pop_front();
        r.envelope[k] = r.e_kin[dq.front()];
    }

    if (n > 0) {
        const double x0 = series.states.front().x;
        for (const auto& s : series.states) r.max_excursion = std::max(r.max_excursion, std::abs(s.x - x0));
        const double half = 0.5 * r.e_kin.front();
        for (std::size_t k = 0; k < n; ++k) {
            if (r.envelope[k] <= half) {
                r.half_energy_time = series.times[k];
                break;
            }
        }
    }
    r.series = std::move(series);
    return r;
}

ComparisonSummary compare_geometries(const SystemParams<double>& p, const ClassicalState& s0,
                                     double t_max, int n_samples, double rtol) {
    if (!(t_max > 0)) throw std::invalid_argument("compare_geometries: t_max must be > 0");
    const auto times = uniform_grid(0, t_max, n_samples);
    ComparisonSummary c;
    c.envelope_window = envelope_window(p, t_max);
    c.ring = analyse_run(integrate_classical(s0, p, Geometry::Ring, times, rtol), p, c.envelope_window);
    c.standing = analyse_run(integrate_classical(s0, p, Geometry::StandingWave, times, rtol), p,
                             c.envelope_window);
    return c;
}

}  // namespace ringcav::classical
