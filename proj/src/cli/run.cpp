#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>

#include "ringcav/analysis.hpp"
#include "ringcav/classical.hpp"
#include "ringcav/cli.hpp"
#include "ringcav/errors.hpp"
#include "ringcav/io.hpp"
#include "ringcav/linear.hpp"
#include "ringcav/moments.hpp"
#include "ringcav/quantum.hpp"

namespace ringcav::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(io::format_double(v)); }

json params_json(const SystemParams<double>& p) {
    json j = {{"kappa", p.kappa}, {"delta", p.delta}, {"u0", p.u0}, {"eta", p.eta}, {"omega_rec", p.omega_rec}};
    if (p.u0 > 0 && p.eta > 0) {
        const auto d = derive_params(p);
        j["alpha"] = d.alpha;
        j["omega_m"] = d.omega_m;
        j["lamb_dicke"] = d.lamb_dicke;
        j["u0_bar"] = d.u0_bar;
    }
    const auto v = validity_report(p);
    j["validity"] = {{"localization_ok", v.localization_ok},
                     {"detuning_ok", v.detuning_ok},
                     {"perturbative_ok", v.perturbative_ok},
                     {"sidebands_resolved", v.sidebands_resolved},
                     {"rec_over_trap", number(v.ratios.rec_over_trap)},
                     {"rec_over_detuning", number(v.ratios.rec_over_detuning)},
                     {"coupling_over_kappa", number(v.ratios.coupling_over_kappa)},
                     {"sideband_parameter", number(v.ratios.sideband_parameter)}};
    return j;
}

std::vector<std::pair<std::string, std::string>> params_preamble(const SystemParams<double>& p) {
    return {{"kappa", io::format_double(p.kappa)},
            {"delta", io::format_double(p.delta)},
            {"u0", io::format_double(p.u0)},
            {"eta", io::format_double(p.eta)},
            {"omega_rec", io::format_double(p.omega_rec)}};
}

void write_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

json fit_json(const std::vector<double>& t, const std::vector<double>& y, double skip) {
    analysis::FitOptions fo;
    fo.skip_transient = skip;
    try {
        const auto f = analysis::fit_exponential(t, y, fo);
        return {{"rate", f.rate},
                {"amplitude", f.amplitude},
                {"offset", f.offset},
                {"residual_norm", f.residual_norm},
                {"rate_std_error", number(std::sqrt(f.covariance(1, 1)))},
                {"converged", f.converged}};
    } catch (const Error& e) {
        return {{"error", e.what()}};
    }
}

json run_classical(const RunConfig& c, const fs::path& out) {
    const auto p = c.params.resolve();
    const auto& b = c.classical;
    classical::ClassicalState s0;
    s0.x = b.x0;
    s0.p = b.p0;
    s0.alpha_c = classical::steady_cosine_amplitude(p, b.x0);
    const auto cmp = classical::compare_geometries(p, s0, b.t_max, b.n_samples, b.rtol);

    io::CsvTable t;
    t.preamble = params_preamble(p);
    t.header = {"t"};
    for (const char* g : {"ring", "standing"})
        for (const char* col : {"re_alpha_c", "im_alpha_c", "re_alpha_s", "im_alpha_s", "x", "p", "e_kin", "envelope"})
            t.header.push_back(std::string(g) + "_" + col);
    const auto& r = cmp.ring;
    const auto& s = cmp.standing;
    for (std::size_t i = 0; i < r.series.times.size(); ++i) {
        std::vector<double> row{r.series.times[i]};
        for (const auto* g : {&r, &s}) {
            const auto& z = g->series.states[i];
            for (double v : {z.alpha_c.real(), z.alpha_c.imag(), z.alpha_s.real(), z.alpha_s.imag(), z.x, z.p,
                             g->e_kin[i], g->envelope[i]})
                row.push_back(v);
        }
        t.add_row(row);
    }
    io::write_csv(out / "classical.csv", t);

    auto geometry = [](const classical::GeometryRun& g) {
        json j = {{"e_kin_initial", g.e_kin.front()},
                  {"e_kin_final", g.e_kin.back()},
                  {"envelope_final", g.envelope.back()},
                  {"envelope_ratio", g.envelope.back() / g.e_kin.front()},
                  {"max_excursion", g.max_excursion}};
        j["half_energy_time"] = g.half_energy_time ? json(*g.half_energy_time) : json(nullptr);
        return j;
    };
    return {{"params", params_json(p)},
            {"envelope_window", cmp.envelope_window},
            {"ring", geometry(r)},
            {"standing_wave", geometry(s)}};
}

json run_linear(const RunConfig& c, const fs::path& out) {
    const auto p = c.params.resolve();
    const auto s = cooling_summary(p);
    io::CsvTable t;
    t.preamble = params_preamble(p);
    t.header = {"omega_m", "a_plus", "a_minus", "gamma", "n_at", "n_a"};
    t.add_row({linearize(p).omega_m, s.a_plus, s.a_minus, s.gamma_cool, s.n_at, s.n_a});
    io::write_csv(out / "linear.csv", t);
    return {{"params", params_json(p)},
            {"a_plus", s.a_plus},
            {"a_minus", s.a_minus},
            {"gamma", s.gamma_cool},
            {"n_at", s.n_at},
            {"n_a", s.n_a},
            {"divergence_warning", s.divergence_warning}};
}

json run_moments(const RunConfig& c, const fs::path& out) {
    const auto p = c.params.resolve();
    const auto lp = linearize(p);
    const auto& b = c.moments;
    MomentState<double> m0 = MomentState<double>::vacuum();
    m0.q2 = m0.p2 = b.initial_occupancy + 0.5;
    ode::Tolerances tol;
    tol.rtol = b.rtol;
    tol.atol = b.rtol * 1e-2;
    const auto times = classical::uniform_grid(0, b.t_max, b.n_samples);
    const auto series = integrate_moments(m0, lp, times, tol);

    io::CsvTable t;
    t.preamble = params_preamble(p);
    t.header = {"t", "n_at", "n_a", "q2", "p2", "qp_sym"};
    std::vector<double> n_at;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto& s = series.states[i];
        n_at.push_back(occupancy_from_moments(s));
        t.add_row({times[i], n_at.back(), s.n_a, s.q2, s.p2, s.acorr});
    }
    io::write_csv(out / "moments.csv", t);

    json j = {{"params", params_json(p)}, {"relaxation_rate", relaxation_rate(lp)}};
    const auto ss = steady_state_moments(lp);
    const auto cf = closed_form_steady_state(lp);
    j["steady_state"] = {{"n_at", occupancy_from_moments(ss)}, {"n_a", ss.n_a}, {"q2", ss.q2}, {"p2", ss.p2}};
    j["closed_form"] = {{"n_a", cf.n_a}, {"q2", cf.q2}, {"p2", cf.p2}};
    j["linear_gamma"] = cooling_summary(lp).gamma_cool;
    j["fit_n_at"] = fit_json(times, n_at, 5.0 / p.kappa);
    return j;
}

quantum::QuantumModel build(const RunConfig& c) {
    const auto& b = c.quantum;
    quantum::HilbertSpace h;
    h.n_mom = b.n_mom;
    h.n_fock_sine = b.n_fock_sine;
    h.n_fock_cos = b.n_fock_cos;
    h.sector = b.sector == "full" ? quantum::MomentumSector::Full : quantum::MomentumSector::Even;
    const auto t = b.treatment == "full_two_mode" ? quantum::FieldTreatment::FullTwoMode
                                                  : quantum::FieldTreatment::CoherentCosine;
    return quantum::build_model(c.params.resolve(), h, t);
}

quantum::InitialCondition initial(const RunConfig& c, const quantum::QuantumModel& m) {
    const auto& i = c.quantum.initial;
    if (i.kind == "thermal") return quantum::InitialCondition::thermal_momentum(i.e_kin, i.n_sine);
    if (i.kind == "ground")
        return quantum::InitialCondition::from_state(
            quantum::product_state(m, quantum::motional_ground_state(m).cast<quantum::cplx>(), i.n_sine));
    const int n = quantum::momentum_for_kinetic_energy(m, i.e_kin);
    return quantum::InitialCondition::from_state(quantum::momentum_state(m, n, i.n_sine));
}

std::vector<std::pair<std::string, std::string>> quantum_preamble(const RunConfig& c, const quantum::QuantumModel& m) {
    auto pre = params_preamble(m.params);
    const auto& b = c.quantum;
    pre.emplace_back("treatment", b.treatment);
    pre.emplace_back("sector", b.sector);
    pre.emplace_back("n_mom", std::to_string(b.n_mom));
    pre.emplace_back("n_fock_sine", std::to_string(b.n_fock_sine));
    pre.emplace_back("n_fock_cos", std::to_string(b.n_fock_cos));
    pre.emplace_back("energy_offset", io::format_double(m.energy_offset));
    return pre;
}

std::vector<std::string> observable_header() {
    std::vector<std::string> h{"t"};
    for (auto n : quantum::kObservableNames) h.emplace_back(n);
    return h;
}

json tail_json(const std::vector<double>& times, const Eigen::MatrixXd& values, double window) {
    json j;
    for (int k = 0; k < quantum::kNumObservables; ++k) {
        const auto col = values.col(k);
        j[std::string(quantum::kObservableNames[std::size_t(k)])] =
            number(analysis::tail_average(times, {col.data(), col.data() + col.size()}, window));
    }
    return j;
}

json reference_json(const SystemParams<double>& p) {
    json j;
    try {
        const auto s = cooling_summary(p);
        j["linear_n_at"] = s.n_at;
        j["linear_gamma"] = s.gamma_cool;
        j["moments_n_at"] = occupancy_from_moments(steady_state_moments(p));
        j["ground_e_kin"] = trap_frequency(p) / 4;
    } catch (const Error& e) {
        j["error"] = e.what();
    }
    return j;
}

json run_mcwf(const RunConfig& c, const fs::path& out, std::optional<int> threads) {
    const auto& b = c.quantum;
    const auto m = build(c);
    const auto ic = initial(c, m);
    quantum::EnsembleOptions eo;
    eo.n_traj = b.n_traj;
    eo.master_seed = b.seed;
    eo.threads = threads;
    eo.keep_records = b.keep_records;
    eo.mcwf.rtol = b.rtol;
    eo.mcwf.atol = b.atol;
    const auto times = classical::uniform_grid(0, b.t_max, b.n_samples);
    const auto st = quantum::run_ensemble(m, ic, times, eo);

    io::CsvTable t;
    t.preamble = quantum_preamble(c, m);
    t.preamble.emplace_back("n_traj", std::to_string(b.n_traj));
    t.preamble.emplace_back("master_seed", std::to_string(b.seed));
    t.preamble.emplace_back("trajectory_seed", "split_seed(master_seed, index)");
    t.header = {"t"};
    for (auto n : quantum::kObservableNames) t.header.push_back("mean_" + std::string(n));
    for (auto n : quantum::kObservableNames) t.header.push_back("se_" + std::string(n));
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<double> row{times[i]};
        for (int k = 0; k < quantum::kNumObservables; ++k) row.push_back(st.mean(Eigen::Index(i), k));
        for (int k = 0; k < quantum::kNumObservables; ++k) row.push_back(st.std_error(Eigen::Index(i), k));
        t.add_row(row);
    }
    io::write_csv(out / "ensemble.csv", t);

    io::CsvTable jumps;
    jumps.header = {"trajectory", "seed", "time", "channel"};
    json records = json::array();
    for (std::size_t r = 0; r < st.records.size(); ++r) {
        const auto& rec = st.records[r];
        io::CsvTable tr;
        tr.preamble = quantum_preamble(c, m);
        tr.preamble.emplace_back("trajectory", std::to_string(r));
        tr.preamble.emplace_back("seed", std::to_string(rec.seed));
        tr.header = observable_header();
        for (std::size_t i = 0; i < times.size(); ++i) {
            std::vector<double> row{times[i]};
            for (int k = 0; k < quantum::kNumObservables; ++k) row.push_back(rec.values(Eigen::Index(i), k));
            tr.add_row(row);
        }
        char name[32];
        std::snprintf(name, sizeof name, "trajectory_%03zu.csv", r);
        io::write_csv(out / name, tr);
        for (const auto& jv : rec.jumps)
            jumps.rows.push_back({std::to_string(r), std::to_string(rec.seed), io::format_double(jv.time),
                                  m.jumps[std::size_t(jv.channel)].name});

        json jr = {{"seed", rec.seed}, {"jumps", rec.jumps.size()}, {"max_norm_growth", rec.max_norm_growth}};
        if (m.occupancy) {
            analysis::JumpOptions jo;
            jo.threshold = b.jump_threshold;
            jo.min_dwell_samples = b.min_dwell_samples;
            const auto js = analysis::jump_statistics(rec, jo);
            json dwell = json::array();
            for (std::size_t l = 0; l < js.dwell_times.size(); ++l) dwell.push_back(number(js.mean_dwell(int(l))));
            jr["jump_statistics"] = {{"transitions", js.transitions.size()},
                                     {"transition_counts", js.transition_counts},
                                     {"mean_dwell", dwell},
                                     {"correlation_n_at_n_sine", number(js.correlation)},
                                     {"low_confidence", js.low_confidence}};
        }
        records.push_back(jr);
    }
    if (!st.records.empty()) io::write_csv(out / "jumps.csv", jumps);

    return {{"params", params_json(m.params)},
            {"dimension", m.dim()},
            {"energy_offset", m.energy_offset},
            {"n_traj", st.n_traj},
            {"master_seed", st.master_seed},
            {"total_jumps", st.total_jumps},
            {"truncation", {{"momentum_edge", st.truncation.momentum_edge}, {"top_fock", st.truncation.top_fock}}},
            {"long_time_mean", tail_json(times, st.mean, b.average_window * b.t_max)},
            {"fit_e_kin", fit_json(times, st.mean_of("e_kin"), b.fit_skip)},
            {"reference", reference_json(m.params)},
            {"records", records}};
}

json run_lindblad(const RunConfig& c, const fs::path& out) {
    const auto& b = c.quantum;
    const auto m = build(c);
    const auto rho0 = initial(c, m).density_matrix(m);
    quantum::LindbladOptions lo;
    lo.rtol = c.lindblad.rtol;
    lo.atol = c.lindblad.atol;
    lo.max_dim = c.lindblad.max_dim;
    const auto times = classical::uniform_grid(0, b.t_max, b.n_samples);
    const auto ds = quantum::lindblad_evolve(m, rho0, times, lo);

    io::CsvTable t;
    t.preamble = quantum_preamble(c, m);
    t.header = observable_header();
    t.header.push_back("trace");
    double trace_err = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<double> row{times[i]};
        for (int k = 0; k < quantum::kNumObservables; ++k) row.push_back(ds.values(Eigen::Index(i), k));
        row.push_back(ds.trace[i]);
        trace_err = std::max(trace_err, std::abs(ds.trace[i] - 1));
        t.add_row(row);
    }
    io::write_csv(out / "lindblad.csv", t);
    return {{"params", params_json(m.params)},
            {"dimension", m.dim()},
            {"energy_offset", m.energy_offset},
            {"max_trace_error", trace_err},
            {"long_time_mean", tail_json(times, ds.values, b.average_window * b.t_max)},
            {"reference", reference_json(m.params)}};
}

json run_sweep(const RunConfig& c, const fs::path& out, std::optional<int> threads) {
    analysis::SweepSpec spec;
    spec.base = c.params.resolve();
    spec.axis = analysis::parse_axis(c.sweep.axis);
    spec.grid = c.sweep.grid();
    spec.optimal_detuning = c.params.optimal_detuning;
    spec.quantities = c.sweep.quantities;
    const auto& b = c.quantum;
    auto& q = spec.quantum;
    q.space.n_mom = b.n_mom;
    q.space.n_fock_sine = b.n_fock_sine;
    q.space.n_fock_cos = b.n_fock_cos;
    q.space.sector = b.sector == "full" ? quantum::MomentumSector::Full : quantum::MomentumSector::Even;
    q.treatment = b.treatment == "full_two_mode" ? quantum::FieldTreatment::FullTwoMode
                                                 : quantum::FieldTreatment::CoherentCosine;
    q.ensemble.n_traj = b.n_traj;
    q.ensemble.master_seed = b.seed;
    q.ensemble.threads = threads;
    q.ensemble.mcwf.rtol = b.rtol;
    q.ensemble.mcwf.atol = b.atol;
    q.t_max = b.t_max;
    q.n_samples = b.n_samples;
    q.initial_e_kin = b.initial.e_kin;
    q.average_window = b.average_window;
    q.fit.skip_transient = b.fit_skip;

    const auto table = analysis::sweep(spec);
    io::CsvTable t;
    t.preamble = {{"axis", c.sweep.axis}, {"optimal_detuning", c.params.optimal_detuning ? "true" : "false"}};
    t.header = {"grid", "kappa", "delta", "u0", "eta", "omega_rec"};
    for (const auto& col : table.columns) t.header.push_back(col.name);
    for (const auto& col : table.columns) t.header.push_back(col.name + ".error");
    json columns = json::array();
    for (const auto& col : table.columns) columns.push_back({{"name", col.name}, {"tier", analysis::tier_name(col.tier)}});
    for (std::size_t r = 0; r < table.grid.size(); ++r) {
        const auto& p = table.points[r];
        std::vector<std::string> row;
        for (double v : {table.grid[r], p.kappa, p.delta, p.u0, p.eta, p.omega_rec}) row.push_back(io::format_double(v));
        for (Eigen::Index k = 0; k < table.values.cols(); ++k) row.push_back(io::format_double(table.values(Eigen::Index(r), k)));
        for (const auto& e : table.errors[r]) row.push_back(e);
        t.rows.push_back(row);
    }
    io::write_csv(out / "sweep.csv", t);
    return {{"axis", c.sweep.axis},
            {"points", table.grid.size()},
            {"columns", columns},
            {"failed_cells", table.failed_cells()}};
}

struct Failure {
    int code;
    std::string kind;
    std::string message;
    std::optional<double> time;
};

Failure classify(std::exception_ptr e) {
    try {
        std::rethrow_exception(e);
    } catch (const ConfigError& x) {
        return {kExitConfig, "config", x.what(), {}};
    } catch (const nlohmann::json::exception& x) {
        return {kExitConfig, "config", x.what(), {}};
    } catch (const TruncationError& x) {
        return {kExitRefused, "truncation", x.what(), {}};
    } catch (const GuardError& x) {
        return {kExitRefused, "guard", x.what(), {}};
    } catch (const IntegrationError& x) {
        return {kExitNumeric, "numeric", x.what(), x.time};
    } catch (const Error& x) {
        return {kExitNumeric, "numeric", x.what(), {}};
    } catch (const std::invalid_argument& x) {
        return {kExitConfig, "config", x.what(), {}};
    } catch (const std::exception& x) {
        return {kExitUnexpected, "unexpected", x.what(), {}};
    } catch (...) {
        return {kExitUnexpected, "unexpected", "unknown exception", {}};
    }
}

json failure_json(const Failure& f) {
    json j = {{"status", "error"}, {"kind", f.kind}, {"exit_code", f.code}, {"message", f.message}};
    if (f.time) j["time"] = *f.time;
    return j;
}

}  // namespace

void execute(const RunConfig& c, const fs::path& out, std::optional<int> threads) {
    fs::create_directories(out);
    json summary;
    switch (c.tier) {
        case RunTier::Classical: summary = run_classical(c, out); break;
        case RunTier::Linear: summary = run_linear(c, out); break;
        case RunTier::Moments: summary = run_moments(c, out); break;
        case RunTier::Mcwf: summary = run_mcwf(c, out, threads); break;
        case RunTier::Lindblad: summary = run_lindblad(c, out); break;
        case RunTier::Sweep: summary = run_sweep(c, out, threads); break;
    }
    summary["status"] = "ok";
    summary["tier"] = tier_name(c.tier);
    write_json(out / "summary.json", summary);
    write_json(out / "manifest.json", manifest(c));
}

int run(const fs::path& config_path, const Overrides& o) {
    fs::path out = o.out.value_or("out");
    RunConfig c;
    try {
        json raw = read_config_json(config_path);
        if (o.tier) raw["tier"] = *o.tier;
        c = parse_config(raw);
        if (o.seed) c.quantum.seed = *o.seed;
        if (o.threads && *o.threads < 1) throw ConfigError("--threads must be >= 1");
        out = o.out.value_or(c.out_dir);
    } catch (...) {
        const auto f = classify(std::current_exception());
        std::cerr << "ringcav: " << f.message << "\n";
        try {
            fs::create_directories(out);
            write_json(out / "error.json", failure_json(f));
        } catch (...) {
        }
        return f.code;
    }

    try {
        execute(c, out, o.threads);
        return kExitOk;
    } catch (...) {
        const auto f = classify(std::current_exception());
        std::cerr << "ringcav: " << f.message << "\n";
        try {
            fs::create_directories(out);
            write_json(out / "summary.json", failure_json(f));
            write_json(out / "manifest.json", manifest(c));
        } catch (...) {
        }
        return f.code;
    }
}

}  // namespace ringcav::cli
