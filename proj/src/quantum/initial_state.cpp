#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "ringcav/quantum.hpp"

namespace ringcav::quantum {

Eigen::MatrixXd trap_hamiltonian(const QuantumModel& m) {
    const int d = m.motional_dim;
    const double depth = m.alpha * m.alpha * m.params.u0;
    const int step = d > 1 ? m.momenta[1] - m.momenta[0] : 2;
    const int shift = 2 / step;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) h(i, i) = m.params.omega_rec * m.momenta[i] * m.momenta[i] - 0.5 * depth;
    for (int i = 0; i + shift < d; ++i) {
        h(i, i + shift) = -0.25 * depth;
        h(i + shift, i) = -0.25 * depth;
    }
    return h;
}

Eigen::VectorXd motional_ground_state(const QuantumModel& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(trap_hamiltonian(m));
    Eigen::VectorXd v = es.eigenvectors().col(0);
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0) v = -v;
    return v;
}

namespace {

Eigen::VectorXcd coherent_state(cplx a, int n_max) {
    Eigen::VectorXcd c(n_max + 1);
    c(0) = std::exp(-0.5 * std::norm(a));
    for (int k = 1; k <= n_max; ++k) c(k) = c(k - 1) * a / std::sqrt(double(k));
    return c.normalized();
}

Eigen::VectorXcd field_state(const QuantumModel& m, int n_sine) {
    if (n_sine < 0 || n_sine > m.space.n_fock_sine)
        throw TruncationError("initial state: sine Fock level " + std::to_string(n_sine) +
                              " exceeds the cutoff " + std::to_string(m.space.n_fock_sine));
    Eigen::VectorXcd sine = Eigen::VectorXcd::Zero(m.space.n_fock_sine + 1);
    sine(n_sine) = 1;
    if (m.treatment == FieldTreatment::CoherentCosine) return sine;
    const auto& p = m.params;
    const cplx a = p.eta / cplx(p.kappa, -p.delta);
    const Eigen::VectorXcd cosine = coherent_state(a, m.space.n_fock_cos);
    Eigen::VectorXcd f(cosine.size() * sine.size());
    for (Eigen::Index c = 0; c < cosine.size(); ++c) f.segment(c * sine.size(), sine.size()) = cosine(c) * sine;
    return f;
}

int momentum_position(const QuantumModel& m, int n) {
    const auto it = std::find(m.momenta.begin(), m.momenta.end(), n);
    if (it == m.momenta.end())
        throw TruncationError("initial state: momentum " + std::to_string(n) +
                              " is not in the truncated basis");
    return int(it - m.momenta.begin());
}

}  // namespace

StateVector product_state(const QuantumModel& m, const Eigen::VectorXcd& motional, int n_sine) {
    if (motional.size() != m.motional_dim)
        throw std::invalid_argument("product_state: motional dimension mismatch");
    const Eigen::VectorXcd f = field_state(m, n_sine);
    StateVector psi(m.dim());
    for (int i = 0; i < m.motional_dim; ++i) psi.segment(i * m.field_dim, m.field_dim) = motional(i) * f;
    return psi.normalized();
}

StateVector momentum_state(const QuantumModel& m, int n, int n_sine) {
    Eigen::VectorXcd mot = Eigen::VectorXcd::Zero(m.motional_dim);
    mot(momentum_position(m, n)) = 1;
    return product_state(m, mot, n_sine);
}

int momentum_for_kinetic_energy(const QuantumModel& m, double e_kin) {
    int best = 0;
    double best_err = INFINITY;
    for (int n : m.momenta) {
        if (n < 0) continue;
        const double err = std::abs(m.params.omega_rec * n * n - e_kin);
        if (err < best_err) {
            best_err = err;
            best = n;
        }
    }
    if (best == m.momenta.back())
        throw TruncationError("initial state: E_kin " + std::to_string(e_kin) + " needs |n| >= " +
                              std::to_string(best) + ", the momentum cutoff");
    return best;
}

Eigen::VectorXd thermal_momentum_weights(const QuantumModel& m, double e_kin) {
    const int d = m.motional_dim;
    Eigen::VectorXd e(d);
    for (int i = 0; i < d; ++i) e(i) = m.params.omega_rec * m.momenta[i] * m.momenta[i];
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    if (e_kin <= 0) {
        w(momentum_position(m, 0)) = 1;
        return w;
    }
    if (e_kin >= e.mean())
        throw TruncationError("thermal state: mean kinetic energy exceeds what the momentum cutoff can hold");
    auto weights = [&](double beta) {
        Eigen::VectorXd v = (-beta * e.array()).exp();
        return Eigen::VectorXd(v / v.sum());
    };
    // mean energy decreases monotonically in beta
    double lo = 0, hi = 1.0 / e_kin;
    while (weights(hi).dot(e) > e_kin) hi *= 2;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (weights(mid).dot(e) > e_kin ? lo : hi) = mid;
    }
    return weights(0.5 * (lo + hi));
}

InitialCondition InitialCondition::from_state(StateVector psi) {
    InitialCondition ic;
    ic.kind = Kind::Pure;
    ic.pure = std::move(psi);
    return ic;
}

InitialCondition InitialCondition::thermal_momentum(double e_kin, int n_sine) {
    InitialCondition ic;
    ic.kind = Kind::ThermalMomentum;
    ic.e_kin = e_kin;
    ic.n_sine = n_sine;
    return ic;
}

StateVector InitialCondition::sample(const QuantumModel& m, Rng& rng) const {
    if (kind == Kind::Pure) {
        if (pure.size() != m.dim()) throw std::invalid_argument("initial state: dimension mismatch");
        return pure.normalized();
    }
    const Eigen::VectorXd w = thermal_momentum_weights(m, e_kin);
    const double r = rng.uniform();
    double acc = 0;
    int pick = int(w.size()) - 1;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        acc += w(i);
        if (r < acc) {
            pick = int(i);
            break;
        }
    }
    return momentum_state(m, m.momenta[pick], n_sine);
}

DensityMatrix InitialCondition::density_matrix(const QuantumModel& m) const {
    if (kind == Kind::Pure) {
        const StateVector psi = pure.normalized();
        return psi * psi.adjoint();
    }
    const Eigen::VectorXd w = thermal_momentum_weights(m, e_kin);
    DensityMatrix rho = DensityMatrix::Zero(m.dim(), m.dim());
    for (int i = 0; i < m.motional_dim; ++i) {
        if (w(i) == 0) continue;
        const StateVector psi = momentum_state(m, m.momenta[i], n_sine);
        rho += w(i) * psi * psi.adjoint();
    }
    return rho;
}

}  // namespace ringcav::quantum
