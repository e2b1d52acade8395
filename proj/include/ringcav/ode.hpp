// Adaptive Dormand-Prince 5(4) integrator with dense output.
//
// Works for any plain Eigen dense object (real or complex vectors, matrices).
// Tableau and continuous extension follow Hairer, Norsett & Wanner, DOPRI5.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ringcav/errors.hpp"

namespace ringcav::ode {

struct Tolerances {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_init = 0;  // 0 selects the step automatically
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 100'000'000;
};

template <typename State>
class DormandPrince5 {
public:
    using Rhs = std::function<void(double, const State&, State&)>;
    // Optional veto on an accepted-by-error-control step; false halves the step.
    using StepCheck = std::function<bool(const State& before, const State& after)>;

    DormandPrince5(Rhs rhs, Tolerances tol, StepCheck check = {})
        : rhs_(std::move(rhs)), tol_(tol), check_(std::move(check)) {}

    void reset(double t0, const State& y0) {
        t_ = t0;
        t_old_ = t0;
        h_last_ = 0;
        y_ = y0;
        k1_.resizeLike(y0);
        rhs_(t_, y_, k1_);
        if (h_ <= 0) h_ = tol_.h_init > 0 ? tol_.h_init : initial_step();
    }

    double t() const { return t_; }
    const State& y() const { return y_; }
    double step_size() const { return h_; }
    long steps() const { return n_steps_; }
    long rejected() const { return n_rejected_; }
    double last_step_start() const { return t_old_; }

    /// Advance by one accepted step without passing t_limit.
    void step(double t_limit) {
        constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        constexpr double a21 = 1.0 / 5;
        constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                         a54 = -212.0 / 729;
        constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                         a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                         a75 = -2187.0 / 6784, a76 = 11.0 / 84;
        constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                         e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        bool last_rejected = false;
        for (;;) {
            if (++n_steps_ > tol_.max_steps)
                throw IntegrationError("ode: maximum number of steps exceeded", t_);
            const double h_floor = 16 * std::numeric_limits<double>::epsilon() *
                                   std::max(1.0, std::abs(t_));
            const double remaining = t_limit - t_;
            if (!(remaining > 0)) throw IntegrationError("ode: non-positive step requested", t_);
            if (remaining <= h_floor) {
                // rounding-level gap to t_limit: close it with an Euler step
                r1_ = y_;
                y_ += remaining * k1_;
                r2_ = y_ - r1_;
                r3_.setZero(y_.rows(), y_.cols());
                r4_ = r3_;
                r5_ = r3_;
                t_old_ = t_;
                h_last_ = remaining;
                t_ = t_limit;
                rhs_(t_, y_, k1_);
                return;
            }
            if (h_ < h_floor) throw IntegrationError("ode: step size underflow", t_);
            const double h = std::min({h_, tol_.h_max, remaining});
            const bool clipped = h < h_;

            tmp_ = y_ + h * a21 * k1_;
            rhs_(t_ + c2 * h, tmp_, k2_);
            tmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
            rhs_(t_ + c3 * h, tmp_, k3_);
            tmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
            rhs_(t_ + c4 * h, tmp_, k4_);
            tmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
            rhs_(t_ + c5 * h, tmp_, k5_);
            tmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
            rhs_(t_ + h, tmp_, k6_);
            y_new_ = y_ + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
            rhs_(t_ + h, y_new_, k7_);

            err_vec_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
            const auto scale = (tol_.atol + tol_.rtol * y_.cwiseAbs().cwiseMax(y_new_.cwiseAbs()).array());
            const double err =
                std::sqrt((err_vec_.cwiseAbs().array() / scale).square().sum() /
                          double(err_vec_.size()));

            if (!std::isfinite(err)) {
                h_ = 0.1 * h;
                last_rejected = true;
                ++n_rejected_;
                continue;
            }
            if (err <= 1.0 && (!check_ || check_(y_, y_new_))) {
                // continuous extension coefficients
                constexpr double d1 = -12715105075.0 / 11282082432.0,
                                 d3 = 87487479700.0 / 32700410799.0,
                                 d4 = -10690763975.0 / 1880347072.0,
                                 d5 = 701980252875.0 / 199316789632.0,
                                 d6 = -1453857185.0 / 822651844.0,
                                 d7 = 69997945.0 / 29380423.0;
                r1_ = y_;
                r2_ = y_new_ - y_;
                r3_ = h * k1_ - r2_;
                r4_ = r2_ - h * k7_ - r3_;
                r5_ = h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k7_);

                t_old_ = t_;
                h_last_ = h;
                t_ = h == remaining ? t_limit : t_ + h;
                y_.swap(y_new_);
                k1_.swap(k7_);
                double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 10.0;
                fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
                h_ = clipped ? std::max(h_, h * fac) : h * fac;
                return;
            }
            ++n_rejected_;
            last_rejected = true;
            const double fac = err <= 1.0 ? 0.5 : std::max(0.2, 0.9 * std::pow(err, -0.2));
            h_ = h * fac;
        }
    }

    /// Dense output inside the last accepted step.
    State dense(double t) const {
        const double theta = h_last_ > 0 ? (t - t_old_) / h_last_ : 1.0;
        const double theta1 = 1.0 - theta;
        return r1_ + theta * (r2_ + theta1 * (r3_ + theta * (r4_ + theta1 * r5_)));
    }

private:
    double initial_step() {
        const auto sc = (tol_.atol + tol_.rtol * y_.cwiseAbs().array());
        const double n = double(y_.size());
        const double d0 = std::sqrt((y_.cwiseAbs().array() / sc).square().sum() / n);
        const double d1 = std::sqrt((k1_.cwiseAbs().array() / sc).square().sum() / n);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, tol_.h_max);
        State y1 = y_ + h0 * k1_;
        State f1;
        f1.resizeLike(y_);
        rhs_(t_ + h0, y1, f1);
        const double d2 = std::sqrt(((f1 - k1_).cwiseAbs().array() / sc).square().sum() / n) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        return std::min({100 * h0, h1, tol_.h_max});
    }

    Rhs rhs_;
    Tolerances tol_;
    StepCheck check_;
    double t_ = 0, t_old_ = 0, h_ = 0, h_last_ = 0;
    long n_steps_ = 0, n_rejected_ = 0;
    State y_, y_new_, tmp_, err_vec_;
    State k1_, k2_, k3_, k4_, k5_, k6_, k7_;
    State r1_, r2_, r3_, r4_, r5_;
};

/// Integrate from (t0, y0) and return the state at each sample time
/// (sorted, all >= t0) using dense output.
template <typename State>
std::vector<State> integrate(typename DormandPrince5<State>::Rhs rhs, const State& y0, double t0,
                             const std::vector<double>& sample_times, Tolerances tol = {}) {
    std::vector<State> out;
    out.reserve(sample_times.size());
    if (sample_times.empty()) return out;
    if (!std::is_sorted(sample_times.begin(), sample_times.end()) || sample_times.front() < t0)
        throw std::invalid_argument("integrate: sample times must be sorted and >= t0");
    DormandPrince5<State> solver(std::move(rhs), tol);
    solver.reset(t0, y0);
    std::size_t next = 0;
    while (next < sample_times.size() && sample_times[next] == t0) {
        out.push_back(y0);
        ++next;
    }
    const double t_end = sample_times.back();
    while (next < sample_times.size()) {
        solver.step(t_end);
        while (next < sample_times.size() && sample_times[next] <= solver.t()) {
            out.push_back(sample_times[next] == solver.t() ? solver.y()
                                                           : solver.dense(sample_times[next]));
            ++next;
        }
    }
    return out;
}

}  // namespace ringcav::ode
