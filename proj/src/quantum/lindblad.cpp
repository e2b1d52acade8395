#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "ringcav/ode.hpp"
#include "ringcav/quantum.hpp"

namespace ringcav::quantum {

std::vector<double> DensitySeries::column(std::string_view name) const {
    const int c = observable_index(name);
    return {values.col(c).data(), values.col(c).data() + values.rows()};
}

namespace {

struct DenseJump {
    Eigen::MatrixXcd op;
    double rate;
};

DensityMatrix rhs_dense(const Eigen::MatrixXcd& heff, const std::vector<DenseJump>& jumps,
                        const DensityMatrix& rho) {
    const Eigen::MatrixXcd hr = heff * rho;
    DensityMatrix d = cplx(0, -1) * hr + cplx(0, 1) * rho * heff.adjoint();
    for (const auto& j : jumps) d.noalias() += j.rate * (j.op * rho * j.op.adjoint());
    return d;
}

std::vector<DenseJump> dense_jumps(const QuantumModel& m) {
    std::vector<DenseJump> out;
    for (const auto& j : m.jumps) out.push_back({Eigen::MatrixXcd(j.op), j.rate});
    return out;
}

}  // namespace

DensityMatrix lindblad_rhs(const QuantumModel& m, const DensityMatrix& rho) {
    return rhs_dense(Eigen::MatrixXcd(m.h_eff), dense_jumps(m), rho);
}

DensitySeries lindblad_evolve(const QuantumModel& m, const DensityMatrix& rho0,
                              const std::vector<double>& sample_times, const LindbladOptions& opt) {
    if (m.dim() > opt.max_dim)
        throw GuardError("lindblad: dimension " + std::to_string(m.dim()) + " exceeds the dense limit " +
                         std::to_string(opt.max_dim));
    if (rho0.rows() != m.dim() || rho0.cols() != m.dim())
        throw std::invalid_argument("lindblad: density matrix dimension mismatch");
    if (std::abs(rho0.trace() - cplx(1)) > 1e-8) throw std::invalid_argument("lindblad: trace of rho0 must be 1");
    if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("lindblad: rho0 must be hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho0, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) throw std::invalid_argument("lindblad: rho0 must be positive");
    if (!std::is_sorted(sample_times.begin(), sample_times.end()) ||
        (!sample_times.empty() && sample_times.front() < 0))
        throw std::invalid_argument("lindblad: sample times must be sorted and >= 0");

    DensitySeries out;
    out.times = sample_times;
    out.values.resize(Eigen::Index(sample_times.size()), kNumObservables);
    if (sample_times.empty()) return out;

    const Eigen::MatrixXcd heff(m.h_eff);
    const auto jumps = dense_jumps(m);
    auto rhs = [&](double, const DensityMatrix& r, DensityMatrix& d) { d = rhs_dense(heff, jumps, r); };
    ode::Tolerances tol;
    tol.rtol = opt.rtol;
    tol.atol = opt.atol;
    ode::DormandPrince5<DensityMatrix> solver(rhs, tol);

    auto record = [&](std::size_t i, const DensityMatrix& r) {
        out.values.row(Eigen::Index(i)) = observables(r, m).as_vector().transpose();
        out.trace.push_back(r.trace().real());
    };

    DensityMatrix rho = rho0;
    solver.reset(0, rho);
    std::size_t next = 0;
    while (next < sample_times.size() && sample_times[next] <= 0) record(next++, rho);
    while (next < sample_times.size()) {
        solver.step(sample_times.back());
        while (next < sample_times.size() && sample_times[next] <= solver.t()) {
            const double ts = sample_times[next];
            record(next++, ts == solver.t() ? solver.y() : solver.dense(ts));
        }
        // remove the antihermitian drift left by the integrator
        rho = 0.5 * (solver.y() + solver.y().adjoint());
        solver.reset(solver.t(), rho);
    }
    return out;
}

}  // namespace ringcav::quantum
