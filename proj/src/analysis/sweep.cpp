#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "ringcav/analysis.hpp"
#include "ringcav/classical.hpp"
#include "ringcav/linear.hpp"
#include "ringcav/moments.hpp"

namespace ringcav::analysis {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::map<std::string, Tier>& quantity_table() {
    static const std::map<std::string, Tier> table = {
        {"params.omega_m", Tier::Params},          {"params.alpha", Tier::Params},
        {"params.u0_bar", Tier::Params},           {"params.lamb_dicke", Tier::Params},
        {"params.delta", Tier::Params},            {"params.eta", Tier::Params},
        {"linear.n_at", Tier::Linear},             {"linear.gamma", Tier::Linear},
        {"linear.n_a", Tier::Linear},              {"moments.n_at", Tier::Moments},
        {"moments.n_a", Tier::Moments},            {"moments.relaxation_rate", Tier::Moments},
        {"quantum.e_kin", Tier::Quantum},          {"quantum.n_at", Tier::Quantum},
        {"quantum.n_sine", Tier::Quantum},         {"quantum.gamma_fit", Tier::Quantum},
    };
    return table;
}

struct QuantumCell {
    double e_kin, n_at, n_sine, gamma_fit;
    std::string fit_error;
};

QuantumCell run_quantum(const SystemParams<double>& p, const QuantumSweepOptions& q) {
    const auto m = quantum::build_model(p, q.space, q.treatment);
    const int n0 = quantum::momentum_for_kinetic_energy(m, q.initial_e_kin);
    const auto ic = quantum::InitialCondition::from_state(quantum::momentum_state(m, n0));
    const auto times = classical::uniform_grid(0, q.t_max, q.n_samples);
    const auto stats = quantum::run_ensemble(m, ic, times, q.ensemble);
    const double window = q.average_window * q.t_max;
    QuantumCell c{};
    const auto e = stats.mean_of("e_kin");
    c.e_kin = tail_average(times, e, window);
    c.n_at = tail_average(times, stats.mean_of("n_at"), window);
    c.n_sine = tail_average(times, stats.mean_of("n_sine"), window);
    try {
        c.gamma_fit = fit_exponential(times, e, q.fit).rate;
    } catch (const Error& ex) {
        c.gamma_fit = kNaN;
        c.fit_error = ex.what();
    }
    return c;
}

void check_monotone(const std::vector<double>& g) {
    if (g.empty()) throw std::invalid_argument("sweep: empty grid");
    bool up = true, down = true;
    for (std::size_t i = 1; i < g.size(); ++i) {
        up = up && g[i] > g[i - 1];
        down = down && g[i] < g[i - 1];
    }
    for (double v : g)
        if (!std::isfinite(v)) throw std::invalid_argument("sweep: grid values must be finite");
    if (g.size() > 1 && !up && !down) throw std::invalid_argument("sweep: grid must be strictly monotone");
}

}  // namespace

const char* axis_name(SweepAxis a) {
    switch (a) {
        case SweepAxis::Eta: return "eta";
        case SweepAxis::Delta: return "delta";
        case SweepAxis::U0: return "u0";
        case SweepAxis::OmegaRec: return "omega_rec";
        case SweepAxis::Kappa: return "kappa";
    }
    return "?";
}

SweepAxis parse_axis(const std::string& name) {
    for (auto a : {SweepAxis::Eta, SweepAxis::Delta, SweepAxis::U0, SweepAxis::OmegaRec, SweepAxis::Kappa})
        if (name == axis_name(a)) return a;
    throw std::invalid_argument("unknown sweep axis '" + name + "'");
}

const char* tier_name(Tier t) {
    switch (t) {
        case Tier::Params: return "params";
        case Tier::Classical: return "classical";
        case Tier::Linear: return "linear";
        case Tier::Moments: return "moments";
        case Tier::Quantum: return "quantum";
    }
    return "?";
}

Tier quantity_tier(const std::string& quantity) {
    const auto it = quantity_table().find(quantity);
    if (it == quantity_table().end()) throw std::invalid_argument("unknown sweep quantity '" + quantity + "'");
    return it->second;
}

const std::vector<std::string>& sweep_quantities() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, t] : quantity_table()) v.push_back(k);
        return v;
    }();
    return names;
}

std::vector<double> SweepTable::column(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
        if (columns[c].name == name) {
            const auto col = values.col(Eigen::Index(c));
            return {col.data(), col.data() + col.size()};
        }
    throw std::invalid_argument("SweepTable: no column '" + name + "'");
}

int SweepTable::failed_cells() const {
    int n = 0;
    for (const auto& row : errors)
        for (const auto& e : row) n += !e.empty();
    return n;
}

SystemParams<double> sweep_point(const SweepSpec& spec, double value) {
    SystemParams<double> p = spec.base;
    switch (spec.axis) {
        case SweepAxis::Eta: p.eta = value; break;
        case SweepAxis::Delta: p.delta = value; break;
        case SweepAxis::U0: p.u0 = value; break;
        case SweepAxis::OmegaRec: p.omega_rec = value; break;
        case SweepAxis::Kappa: p.kappa = value; break;
    }
    if (spec.optimal_detuning) p = with_optimal_detuning(p);
    return p;
}

SweepTable sweep(const SweepSpec& spec) {
    check_monotone(spec.grid);
    if (spec.optimal_detuning && spec.axis == SweepAxis::Delta)
        throw std::invalid_argument("sweep: the detuning axis cannot be combined with optimal_detuning");
    if (spec.quantities.empty()) throw std::invalid_argument("sweep: no quantities requested");

    SweepTable table;
    table.axis = spec.axis;
    table.grid = spec.grid;
    for (const auto& q : spec.quantities) table.columns.push_back({q, quantity_tier(q)});
    const Eigen::Index rows = Eigen::Index(spec.grid.size()), cols = Eigen::Index(spec.quantities.size());
    table.values = Eigen::MatrixXd::Constant(rows, cols, kNaN);
    table.errors.assign(spec.grid.size(), std::vector<std::string>(spec.quantities.size()));

    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto p = sweep_point(spec, spec.grid[std::size_t(r)]);
        table.points.push_back(p);
        std::optional<QuantumCell> qcell;
        std::string qerror;
        for (Eigen::Index c = 0; c < cols; ++c) {
            const std::string& q = spec.quantities[std::size_t(c)];
            try {
                double v = kNaN;
                if (q == "params.delta") v = p.delta;
                else if (q == "params.eta") v = p.eta;
                else if (q == "params.alpha") v = cavity_amplitude(p);
                else if (q == "params.omega_m") v = trap_frequency(p);
                else if (q == "params.u0_bar") v = derive_params(p).u0_bar;
                else if (q == "params.lamb_dicke") v = derive_params(p).lamb_dicke;
                else if (q.rfind("linear.", 0) == 0) {
                    const auto s = cooling_summary(p);
                    v = q == "linear.n_at" ? s.n_at : q == "linear.gamma" ? s.gamma_cool : s.n_a;
                } else if (q == "moments.relaxation_rate") {
                    v = relaxation_rate(linearize(p));
                } else if (q.rfind("moments.", 0) == 0) {
                    const auto m = steady_state_moments(p);
                    v = q == "moments.n_at" ? occupancy_from_moments(m) : m.n_a;
                } else {
                    if (!qcell && qerror.empty()) {
                        try {
                            qcell = run_quantum(p, spec.quantum);
                        } catch (const std::exception& ex) {
                            qerror = ex.what();
                        }
                    }
                    if (!qcell) throw std::runtime_error(qerror);
                    if (q == "quantum.e_kin") v = qcell->e_kin;
                    else if (q == "quantum.n_at") v = qcell->n_at;
                    else if (q == "quantum.n_sine") v = qcell->n_sine;
                    else {
                        if (!qcell->fit_error.empty()) throw std::runtime_error(qcell->fit_error);
                        v = qcell->gamma_fit;
                    }
                }
                table.values(r, c) = v;
            } catch (const std::exception& ex) {
                table.errors[std::size_t(r)][std::size_t(c)] = ex.what();
            }
        }
    }
    return table;
}

std::vector<double> linear_grid(double a, double b, int n) {
    if (n < 1) throw std::invalid_argument("linear_grid: n must be >= 1");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[std::size_t(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return g;
}

std::vector<double> log_grid(double a, double b, int n) {
    if (!(a > 0 && b > 0)) throw std::invalid_argument("log_grid: endpoints must be positive");
    auto g = linear_grid(std::log(a), std::log(b), n);
    for (auto& v : g) v = std::exp(v);
    if (n > 1) {
        g.front() = a;
        g.back() = b;
    }
    return g;
}

double tail_average(const std::vector<double>& t, const std::vector<double>& y, double window) {
    if (t.empty() || t.size() != y.size()) throw std::invalid_argument("tail_average: bad series");
    const double from = t.back() - window;
    double s = 0;
    int n = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= from) {
            s += y[i];
            ++n;
        }
    return s / n;
}

}  // namespace ringcav::analysis
