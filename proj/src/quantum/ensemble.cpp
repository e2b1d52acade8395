#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "ringcav/quantum.hpp"

namespace ringcav::quantum {

std::vector<double> EnsembleStats::mean_of(std::string_view name) const {
    const int c = observable_index(name);
    return {mean.col(c).data(), mean.col(c).data() + mean.rows()};
}

std::vector<double> EnsembleStats::std_error_of(std::string_view name) const {
    const int c = observable_index(name);
    return {std_error.col(c).data(), std_error.col(c).data() + std_error.rows()};
}

int resolve_worker_count(std::optional<int> requested) {
    if (requested) {
        if (*requested < 1) throw std::invalid_argument("thread count must be >= 1");
        return *requested;
    }
    if (const char* env = std::getenv("RINGCAV_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return int(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

EnsembleStats run_ensemble(const QuantumModel& m, const InitialCondition& ic,
                           const std::vector<double>& sample_times, const EnsembleOptions& opt) {
    if (opt.n_traj < 1) throw std::invalid_argument("run_ensemble: n_traj must be >= 1");
    const int n = opt.n_traj;
    std::vector<TrajectoryRecord> results(static_cast<std::size_t>(n));
    std::atomic<int> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const int i = cursor.fetch_add(1);
            if (i >= n) return;
            try {
                const std::uint64_t seed = split_seed(opt.master_seed, std::uint64_t(i));
                Rng init_rng(split_seed(seed, kInitialStateStream));
                const StateVector psi0 = ic.sample(m, init_rng);
                results[std::size_t(i)] = mcwf_trajectory(m, psi0, seed, sample_times, opt.mcwf);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                cursor.store(n);
                return;
            }
        }
    };

    const int workers = std::min(resolve_worker_count(opt.threads), n);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    // reduction in trajectory order, independent of scheduling
    EnsembleStats s;
    s.n_traj = n;
    s.master_seed = opt.master_seed;
    s.times = sample_times;
    const Eigen::Index rows = Eigen::Index(sample_times.size());
    s.mean = Eigen::MatrixXd::Zero(rows, kNumObservables);
    for (const auto& r : results) s.mean += r.values;
    s.mean /= n;
    Eigen::MatrixXd ss = Eigen::MatrixXd::Zero(rows, kNumObservables);
    for (const auto& r : results) ss += (r.values - s.mean).array().square().matrix();
    s.std_error = n > 1 ? Eigen::MatrixXd((ss / (n - 1)).array().sqrt() / std::sqrt(double(n)))
                        : Eigen::MatrixXd::Zero(rows, kNumObservables);
    for (const auto& r : results) {
        s.seeds.push_back(r.seed);
        s.total_jumps += long(r.jumps.size());
        s.truncation.momentum_edge = std::max(s.truncation.momentum_edge, r.truncation.momentum_edge);
        s.truncation.top_fock = std::max(s.truncation.top_fock, r.truncation.top_fock);
    }
    const int keep = std::clamp(opt.keep_records, 0, n);
    s.records.assign(std::make_move_iterator(results.begin()), std::make_move_iterator(results.begin() + keep));
    return s;
}

}  // namespace ringcav::quantum
