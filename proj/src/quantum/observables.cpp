#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ringcav/quantum.hpp"

namespace ringcav::quantum {

int observable_index(std::string_view name) {
    for (int i = 0; i < kNumObservables; ++i)
        if (kObservableNames[i] == name) return i;
    throw std::invalid_argument("unknown observable '" + std::string(name) + "'");
}

Eigen::Matrix<double, kNumObservables, 1> ObservableSet::as_vector() const {
    Eigen::Matrix<double, kNumObservables, 1> v;
    v << e_kin, n_sine, n_cos, cos2kx, sin2kx, dx, n_at;
    return v;
}

double position_uncertainty(double mean_cos2kx, double mean_sin2kx) {
    const double r = std::hypot(mean_cos2kx, mean_sin2kx);
    if (r >= 1) return 0;
    if (r <= 0) return std::numeric_limits<double>::infinity();
    return 0.5 * std::sqrt(-2 * std::log(r));
}

namespace {

double expect(const SparseMatrix& op, const StateVector& psi) {
    return psi.dot(op * psi).real();
}

double expect(const SparseMatrix& op, const DensityMatrix& rho) {
    // tr(op rho) = sum_ij op_ij rho_ji
    cplx s = 0;
    for (int i = 0; i < op.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(op, i); it; ++it) s += it.value() * rho(it.col(), i);
    return s.real();
}

double occupancy_pure(const StateVector& psi, const QuantumModel& m) {
    if (!m.occupancy) return std::numeric_limits<double>::quiet_NaN();
    const auto& occ = *m.occupancy;
    // rows: field index, columns: motional index
    Eigen::Map<const Eigen::MatrixXcd> amp(psi.data(), m.field_dim, m.motional_dim);
    const Eigen::MatrixXcd proj = amp * occ.basis.cast<cplx>();
    double n = occ.cutoff_level * psi.squaredNorm();
    for (Eigen::Index c = 0; c < proj.cols(); ++c)
        n -= (occ.cutoff_level - occ.levels(c)) * proj.col(c).squaredNorm();
    return n;
}

Eigen::MatrixXcd motional_reduced(const DensityMatrix& rho, const QuantumModel& m) {
    const int F = m.field_dim;
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(m.motional_dim, m.motional_dim);
    for (int i = 0; i < m.motional_dim; ++i)
        for (int j = 0; j < m.motional_dim; ++j)
            for (int f = 0; f < F; ++f) r(i, j) += rho(i * F + f, j * F + f);
    return r;
}

double occupancy_mixed(const DensityMatrix& rho, const QuantumModel& m) {
    if (!m.occupancy) return std::numeric_limits<double>::quiet_NaN();
    const auto& occ = *m.occupancy;
    const Eigen::MatrixXcd r = motional_reduced(rho, m);
    double n = occ.cutoff_level * r.trace().real();
    for (Eigen::Index c = 0; c < occ.basis.cols(); ++c) {
        const Eigen::VectorXcd v = occ.basis.col(c).cast<cplx>();
        n -= (occ.cutoff_level - occ.levels(c)) * v.dot(r * v).real();
    }
    return n;
}

double n_cos_value(const QuantumModel& m, double expectation) {
    return m.treatment == FieldTreatment::CoherentCosine ? m.alpha * m.alpha : expectation;
}

}  // namespace

ObservableSet observables(const StateVector& psi, const QuantumModel& m) {
    if (psi.size() != m.dim()) throw std::invalid_argument("observables: state dimension mismatch");
    const Eigen::VectorXd prob = psi.cwiseAbs2();
    const double norm = prob.sum();
    ObservableSet o;
    o.e_kin = m.params.omega_rec * prob.dot(m.momentum_sq) / norm;
    o.n_sine = prob.dot(m.n_sine) / norm;
    o.n_cos = n_cos_value(m, prob.dot(m.n_cos) / norm);
    o.cos2kx = expect(m.cos2kx, psi) / norm;
    o.sin2kx = expect(m.sin2kx, psi) / norm;
    o.dx = position_uncertainty(o.cos2kx, o.sin2kx);
    o.n_at = occupancy_pure(psi, m) / norm;
    return o;
}

ObservableSet observables(const DensityMatrix& rho, const QuantumModel& m) {
    if (rho.rows() != m.dim() || rho.cols() != m.dim())
        throw std::invalid_argument("observables: density matrix dimension mismatch");
    const Eigen::VectorXd prob = rho.diagonal().real();
    const double tr = prob.sum();
    ObservableSet o;
    o.e_kin = m.params.omega_rec * prob.dot(m.momentum_sq) / tr;
    o.n_sine = prob.dot(m.n_sine) / tr;
    o.n_cos = n_cos_value(m, prob.dot(m.n_cos) / tr);
    o.cos2kx = expect(m.cos2kx, rho) / tr;
    o.sin2kx = expect(m.sin2kx, rho) / tr;
    o.dx = position_uncertainty(o.cos2kx, o.sin2kx);
    o.n_at = occupancy_mixed(rho, m) / tr;
    return o;
}

TruncationDiagnostics truncation_diagnostics(const StateVector& psi, const QuantumModel& m) {
    TruncationDiagnostics d;
    const double norm = psi.squaredNorm();
    const double n_edge = double(m.momenta.back()) * m.momenta.back();
    const int top_s = m.space.n_fock_sine;
    const int top_c = m.space.n_fock_cos;
    for (int i = 0; i < m.dim(); ++i) {
        const double w = std::norm(psi(i)) / norm;
        if (m.momentum_sq(i) == n_edge) d.momentum_edge += w;
        const bool top = m.n_sine(i) == top_s ||
                         (m.treatment == FieldTreatment::FullTwoMode && m.n_cos(i) == top_c);
        if (top) d.top_fock += w;
    }
    return d;
}

}  // namespace ringcav::quantum
