#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "ringcav/analysis.hpp"
#include "ringcav/errors.hpp"

namespace ringcav::analysis {

namespace {

struct Model {
    const Eigen::VectorXd& t;
    const Eigen::VectorXd& y;

    Eigen::VectorXd residual(const Eigen::Vector3d& q) const {
        return (q(0) * (-q(1) * t.array()).exp() + q(2)).matrix() - y;
    }

    Eigen::MatrixX3d jacobian(const Eigen::Vector3d& q) const {
        Eigen::MatrixX3d J(t.size(), 3);
        const Eigen::ArrayXd e = (-q(1) * t.array()).exp();
        J.col(0) = e.matrix();
        J.col(1) = (-q(0) * t.array() * e).matrix();
        J.col(2).setOnes();
        return J;
    }
};

Eigen::Vector3d initial_guess(const Eigen::VectorXd& t, const Eigen::VectorXd& y) {
    const Eigen::Index n = y.size();
    const Eigen::Index tail = std::max<Eigen::Index>(1, n / 10);
    const double c = y.tail(tail).mean();
    const double a = y(0) - c;
    // log-linear regression over the part that is clearly above the offset
    std::vector<double> ts, ls;
    for (Eigen::Index i = 0; i < n - tail; ++i) {
        const double r = (y(i) - c) / a;
        if (r > 0.05) {
            ts.push_back(t(i));
            ls.push_back(std::log(r));
        }
    }
    double gamma = 1.0 / std::max(t(n - 1) - t(0), 1e-300);
    if (ts.size() >= 2) {
        const double tm = std::accumulate(ts.begin(), ts.end(), 0.0) / double(ts.size());
        const double lm = std::accumulate(ls.begin(), ls.end(), 0.0) / double(ls.size());
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            sxy += (ts[i] - tm) * (ls[i] - lm);
            sxx += (ts[i] - tm) * (ts[i] - tm);
        }
        if (sxx > 0 && sxy < 0) gamma = -sxy / sxx;
    }
    return {a, gamma, c};
}

}  // namespace

FitResult fit_exponential(const std::vector<double>& t_in, const std::vector<double>& y_in, const FitOptions& opt) {
    if (t_in.size() != y_in.size()) throw std::invalid_argument("fit_exponential: t and y differ in length");
    std::vector<double> tv, yv;
    const double t_start = t_in.empty() ? 0 : t_in.front() + opt.skip_transient;
    for (std::size_t i = 0; i < t_in.size(); ++i)
        if (t_in[i] >= t_start) {
            tv.push_back(t_in[i]);
            yv.push_back(y_in[i]);
        }
    if (tv.size() < 8) throw FitError("fit_exponential: at least 8 samples are required after the transient window");
    const Eigen::Index n = Eigen::Index(tv.size());
    // shift time so the amplitude refers to the first fitted sample
    const double t0 = tv.front();
    Eigen::VectorXd t = Eigen::Map<Eigen::VectorXd>(tv.data(), n).array() - t0;
    Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(yv.data(), n);
    const double span = y.maxCoeff() - y.minCoeff();
    if (!(span > 1e-14 * std::max(1.0, y.cwiseAbs().maxCoeff()))) throw FitError("degenerate fit");

    const Model model{t, y};
    const Eigen::Vector3d q0 = initial_guess(t, y);
    Eigen::Vector3d q = q0;
    double cost = model.residual(q).squaredNorm();
    double lambda = 1e-3;
    bool converged = false;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        const Eigen::MatrixX3d J = model.jacobian(q);
        const Eigen::VectorXd r = model.residual(q);
        const Eigen::Matrix3d JtJ = J.transpose() * J;
        const Eigen::Vector3d g = J.transpose() * r;
        bool improved = false;
        while (lambda < 1e16) {
            Eigen::Matrix3d A = JtJ;
            A.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-300);
            const Eigen::Vector3d dq = A.ldlt().solve(-g);
            const Eigen::Vector3d trial = q + dq;
            const double c = model.residual(trial).squaredNorm();
            if (std::isfinite(c) && c <= cost) {
                const double drop = cost - c;
                const bool small_step = dq.cwiseAbs().maxCoeff() <= 1e-13 * (q.cwiseAbs().maxCoeff() + 1e-300);
                q = trial;
                lambda = std::max(lambda * 0.3, 1e-12);
                improved = true;
                if (drop <= opt.tolerance * cost || small_step || c == 0) converged = true;
                cost = c;
                break;
            }
            lambda *= 10;
        }
        if (!improved) {
            // no descent direction left: the current point is a minimum to working precision
            converged = true;
            break;
        }
        if (converged) break;
    }

    FitResult res;
    res.iterations = it;
    res.n_samples = int(n);
    res.converged = converged && std::isfinite(q(1));
    if (!res.converged) q = q0;
    // report the amplitude at the original time origin of the fitted window
    res.rate = q(1);
    res.amplitude = q(0) * std::exp(q(1) * t0);
    res.offset = q(2);
    res.residual_norm = model.residual(q).norm();
    if (n > 3) {
        const Eigen::MatrixX3d J = model.jacobian(q);
        const double s2 = res.residual_norm * res.residual_norm / double(n - 3);
        Eigen::Matrix3d cov = s2 * (J.transpose() * J).inverse();
        // covariance transforms with the amplitude shift A = A' exp(gamma t0)
        Eigen::Matrix3d T = Eigen::Matrix3d::Identity();
        T(0, 0) = std::exp(q(1) * t0);
        T(0, 1) = q(0) * t0 * std::exp(q(1) * t0);
        res.covariance = T * cov * T.transpose();
    }
    return res;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
    double mx = 0, my = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0 && y[i] > 0)) throw std::invalid_argument("loglog_slope: values must be positive");
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

}  // namespace ringcav::analysis
