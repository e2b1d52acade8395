#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ringcav/ode.hpp"
#include "ringcav/quantum.hpp"

namespace ringcav::quantum {

std::vector<double> TrajectoryRecord::column(std::string_view name) const {
    const int c = observable_index(name);
    return {values.col(c).data(), values.col(c).data() + values.rows()};
}

namespace {

void record_sample(TrajectoryRecord& rec, Eigen::Index row, const StateVector& psi, const QuantumModel& m) {
    const StateVector n = psi.normalized();
    rec.values.row(row) = observables(n, m).as_vector().transpose();
    const auto d = truncation_diagnostics(n, m);
    rec.truncation.momentum_edge = std::max(rec.truncation.momentum_edge, d.momentum_edge);
    rec.truncation.top_fock = std::max(rec.truncation.top_fock, d.top_fock);
}

}  // namespace

TrajectoryRecord mcwf_trajectory(const QuantumModel& m, const StateVector& psi0, std::uint64_t seed,
                                 const std::vector<double>& sample_times, const McwfOptions& opt) {
    if (psi0.size() != m.dim()) throw std::invalid_argument("mcwf: initial state dimension mismatch");
    if (!std::is_sorted(sample_times.begin(), sample_times.end()) ||
        (!sample_times.empty() && sample_times.front() < 0))
        throw std::invalid_argument("mcwf: sample times must be sorted and >= 0");

    TrajectoryRecord rec;
    rec.seed = seed;
    rec.times = sample_times;
    rec.values.resize(Eigen::Index(sample_times.size()), kNumObservables);
    if (sample_times.empty()) return rec;

    Rng rng(seed);
    const SparseMatrix& H = m.h_eff;
    auto rhs = [&H](double, const StateVector& y, StateVector& dy) { dy.noalias() = cplx(0, -1) * (H * y); };
    auto check = [&](const StateVector& before, const StateVector& after) {
        return after.squaredNorm() <= before.squaredNorm() * (1 + opt.norm_growth_tol);
    };
    ode::Tolerances tol;
    tol.rtol = opt.rtol;
    tol.atol = opt.atol;
    ode::DormandPrince5<StateVector> solver(rhs, tol, check);

    StateVector psi = psi0.normalized();
    double t = 0;
    double r = rng.uniform_open0();
    solver.reset(t, psi);

    std::size_t next = 0;
    while (next < sample_times.size() && sample_times[next] <= t) record_sample(rec, Eigen::Index(next++), psi, m);
    const double t_end = sample_times.back();

    while (next < sample_times.size()) {
        const double norm_before = solver.y().squaredNorm();
        solver.step(t_end);
        const double norm_after = solver.y().squaredNorm();
        rec.max_norm_growth = std::max(rec.max_norm_growth, norm_after / norm_before - 1);

        if (norm_after > r) {
            while (next < sample_times.size() && sample_times[next] <= solver.t()) {
                const double ts = sample_times[next];
                record_sample(rec, Eigen::Index(next++), ts == solver.t() ? solver.y() : solver.dense(ts), m);
            }
            if (norm_after < 1e-2) {
                // renormalize to keep the absolute tolerance meaningful
                psi = solver.y() / std::sqrt(norm_after);
                r /= norm_after;
                solver.reset(solver.t(), psi);
            }
            continue;
        }

        // norm crossed r inside the last step: locate the jump time
        double lo = solver.last_step_start(), hi = solver.t();
        while (hi - lo > opt.jump_time_tol) {
            const double mid = 0.5 * (lo + hi);
            (solver.dense(mid).squaredNorm() > r ? lo : hi) = mid;
        }
        const double tj = hi;
        while (next < sample_times.size() && sample_times[next] < tj) {
            const double ts = sample_times[next];
            record_sample(rec, Eigen::Index(next++), solver.dense(ts), m);
        }
        psi = tj == solver.t() ? solver.y() : solver.dense(tj);

        Eigen::VectorXd w(Eigen::Index(m.jumps.size()));
        std::vector<StateVector> jumped(m.jumps.size());
        for (std::size_t c = 0; c < m.jumps.size(); ++c) {
            jumped[c] = m.jumps[c].op * psi;
            w(Eigen::Index(c)) = m.jumps[c].rate * jumped[c].squaredNorm();
        }
        const double total = w.sum();
        if (!(total > 0)) throw IntegrationError("mcwf: norm decayed with no active jump channel", tj);
        const double u = rng.uniform() * total;
        std::size_t ch = 0;
        double acc = w(0);
        while (acc <= u && ch + 1 < m.jumps.size()) acc += w(Eigen::Index(++ch));
        psi = jumped[ch].normalized();
        rec.jumps.push_back({tj, int(ch)});
        r = rng.uniform_open0();
        t = tj;
        solver.reset(t, psi);
        while (next < sample_times.size() && sample_times[next] <= t) record_sample(rec, Eigen::Index(next++), psi, m);
    }
    const StateVector last = solver.y().normalized();
    rec.final_norm_error = std::abs(last.norm() - 1);
    return rec;
}

}  // namespace ringcav::quantum
