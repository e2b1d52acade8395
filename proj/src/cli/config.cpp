#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ringcav/analysis.hpp"
#include "ringcav/cli.hpp"
#include "ringcav/errors.hpp"

namespace ringcav::cli {

using nlohmann::json;

namespace {

// Reads typed fields from one JSON object and rejects keys it was not asked about.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (j_.contains(key)) out = convert<T>(j_.at(key), path_ + "." + key);
    }

    template <typename T>
    void get(const char* key, std::optional<T>& out) {
        seen_.insert(key);
        if (j_.contains(key) && !j_.at(key).is_null()) out = convert<T>(j_.at(key), path_ + "." + key);
    }

    bool has(const char* key) const { return j_.contains(key); }

    std::optional<Reader> child(const char* key) {
        seen_.insert(key);
        if (!j_.contains(key)) return std::nullopt;
        return Reader(j_.at(key), path_ + "." + key);
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) fail(path_ + "." + k, "unknown key");
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& msg) {
        throw ConfigError("config " + path + ": " + msg);
    }

private:
    template <typename T>
    static T convert(const json& v, const std::string& path) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) fail(path, "expected a boolean");
            return v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) fail(path, "expected a string");
            return v.get<std::string>();
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
            if (!v.is_number_unsigned()) fail(path, "expected a non-negative integer");
            return v.get<std::uint64_t>();
        } else if constexpr (std::is_same_v<T, int>) {
            if (!v.is_number_integer()) fail(path, "expected an integer");
            const auto x = v.get<std::int64_t>();
            if (x < INT32_MIN || x > INT32_MAX) fail(path, "integer out of range");
            return int(x);
        } else if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) fail(path, "expected a number");
            const double x = v.get<double>();
            if (!std::isfinite(x)) fail(path, "expected a finite number");
            return x;
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
            if (!v.is_array()) fail(path, "expected an array of numbers");
            std::vector<double> out;
            for (std::size_t i = 0; i < v.size(); ++i)
                out.push_back(convert<double>(v[i], path + "[" + std::to_string(i) + "]"));
            return out;
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
            if (!v.is_array()) fail(path, "expected an array of strings");
            std::vector<std::string> out;
            for (std::size_t i = 0; i < v.size(); ++i)
                out.push_back(convert<std::string>(v[i], path + "[" + std::to_string(i) + "]"));
            return out;
        }
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& msg) {
    if (!ok) Reader::fail(path, msg);
}

void read(Reader r, ParamsBlock& b) {
    r.get("kappa", b.kappa);
    r.get("delta", b.delta);
    r.get("u0", b.u0);
    r.get("omega_rec", b.omega_rec);
    r.get("eta", b.eta);
    r.get("omega_m", b.omega_m);
    r.get("optimal_detuning", b.optimal_detuning);
    r.finish();
}

void read(Reader r, ClassicalBlock& b) {
    r.get("t_max", b.t_max);
    r.get("n_samples", b.n_samples);
    r.get("rtol", b.rtol);
    r.get("x0", b.x0);
    r.get("p0", b.p0);
    r.finish();
}

void read(Reader r, MomentsBlock& b) {
    r.get("t_max", b.t_max);
    r.get("n_samples", b.n_samples);
    r.get("rtol", b.rtol);
    r.get("initial_occupancy", b.initial_occupancy);
    r.finish();
}

void read(Reader r, QuantumBlock& b) {
    r.get("treatment", b.treatment);
    r.get("sector", b.sector);
    r.get("n_mom", b.n_mom);
    r.get("n_fock_sine", b.n_fock_sine);
    r.get("n_fock_cos", b.n_fock_cos);
    r.get("t_max", b.t_max);
    r.get("n_samples", b.n_samples);
    if (auto c = r.child("initial")) {
        c->get("kind", b.initial.kind);
        c->get("e_kin", b.initial.e_kin);
        c->get("n_sine", b.initial.n_sine);
        c->finish();
    }
    r.get("n_traj", b.n_traj);
    r.get("seed", b.seed);
    r.get("keep_records", b.keep_records);
    r.get("rtol", b.rtol);
    r.get("atol", b.atol);
    r.get("average_window", b.average_window);
    r.get("fit_skip", b.fit_skip);
    r.get("jump_threshold", b.jump_threshold);
    r.get("min_dwell_samples", b.min_dwell_samples);
    r.finish();
}

void read(Reader r, LindbladBlock& b) {
    r.get("rtol", b.rtol);
    r.get("atol", b.atol);
    r.get("max_dim", b.max_dim);
    r.finish();
}

void read(Reader r, SweepBlock& b) {
    r.get("axis", b.axis);
    r.get("values", b.values);
    r.get("start", b.start);
    r.get("stop", b.stop);
    r.get("n", b.n);
    r.get("spacing", b.spacing);
    r.get("quantities", b.quantities);
    r.finish();
}

bool uses_quantum(const RunConfig& c) {
    if (c.tier == RunTier::Mcwf || c.tier == RunTier::Lindblad) return true;
    if (c.tier != RunTier::Sweep) return false;
    for (const auto& q : c.sweep.quantities)
        if (q.rfind("quantum.", 0) == 0) return true;
    return false;
}

void validate(const RunConfig& c) {
    try {
        validate(c.params.resolve());
    } catch (const std::invalid_argument& e) {
        Reader::fail("params", e.what());
    }
    const auto& p = c.params;
    require(!(p.eta && p.omega_m), "params", "give either eta or omega_m, not both");
    if (p.omega_m) require(*p.omega_m > 0, "params.omega_m", "must be > 0");

    const auto& cl = c.classical;
    require(cl.t_max > 0, "classical.t_max", "must be > 0");
    require(cl.n_samples >= 2, "classical.n_samples", "must be >= 2");
    require(cl.rtol > 0 && cl.rtol <= 1e-3, "classical.rtol", "must be in (0, 1e-3]");

    const auto& m = c.moments;
    require(m.t_max > 0, "moments.t_max", "must be > 0");
    require(m.n_samples >= 2, "moments.n_samples", "must be >= 2");
    require(m.rtol > 0 && m.rtol <= 1e-3, "moments.rtol", "must be in (0, 1e-3]");
    require(m.initial_occupancy >= 0, "moments.initial_occupancy", "must be >= 0");

    const auto& q = c.quantum;
    require(q.treatment == "coherent_cosine" || q.treatment == "full_two_mode", "quantum.treatment",
            "must be coherent_cosine or full_two_mode");
    require(q.sector == "even" || q.sector == "full", "quantum.sector", "must be even or full");
    require(q.n_mom >= 4, "quantum.n_mom", "must be >= 4");
    require(q.n_fock_sine >= 2, "quantum.n_fock_sine", "must be >= 2");
    if (q.treatment == "full_two_mode") require(q.n_fock_cos >= 2, "quantum.n_fock_cos", "must be >= 2");
    require(q.t_max > 0, "quantum.t_max", "must be > 0");
    require(q.n_samples >= 2, "quantum.n_samples", "must be >= 2");
    require(q.initial.kind == "momentum" || q.initial.kind == "thermal" || q.initial.kind == "ground",
            "quantum.initial.kind", "must be momentum, thermal or ground");
    require(q.initial.e_kin >= 0, "quantum.initial.e_kin", "must be >= 0");
    require(q.initial.n_sine >= 0, "quantum.initial.n_sine", "must be >= 0");
    require(q.n_traj >= 1, "quantum.n_traj", "must be >= 1");
    require(q.keep_records >= 0, "quantum.keep_records", "must be >= 0");
    require(q.rtol > 0 && q.atol > 0, "quantum", "rtol and atol must be > 0");
    require(q.average_window > 0 && q.average_window <= 1, "quantum.average_window", "must be in (0, 1]");
    require(q.fit_skip >= 0, "quantum.fit_skip", "must be >= 0");
    require(q.min_dwell_samples >= 1, "quantum.min_dwell_samples", "must be >= 1");

    const auto& l = c.lindblad;
    require(l.rtol > 0 && l.atol > 0, "lindblad", "rtol and atol must be > 0");
    require(l.max_dim >= 1, "lindblad.max_dim", "must be >= 1");

    if (c.tier == RunTier::Sweep) {
        const auto& s = c.sweep;
        try {
            const auto axis = analysis::parse_axis(s.axis);
            require(!(p.optimal_detuning && axis == analysis::SweepAxis::Delta), "sweep.axis",
                    "delta cannot be swept with params.optimal_detuning");
        } catch (const std::invalid_argument& e) {
            Reader::fail("sweep.axis", e.what());
        }
        require(s.spacing == "log" || s.spacing == "linear", "sweep.spacing", "must be log or linear");
        require(s.n >= 1, "sweep.n", "must be >= 1");
        if (s.spacing == "log" && !s.values) require(s.start > 0 && s.stop > 0, "sweep", "log grid needs positive ends");
        const auto g = s.grid();
        require(!g.empty(), "sweep.values", "grid is empty");
        for (std::size_t i = 1; i < g.size(); ++i)
            require((g[i] - g[i - 1]) * (g[1] - g[0]) > 0, "sweep.values", "grid must be strictly monotone");
        require(!s.quantities.empty(), "sweep.quantities", "must not be empty");
        for (const auto& name : s.quantities) {
            try {
                analysis::quantity_tier(name);
            } catch (const std::invalid_argument& e) {
                Reader::fail("sweep.quantities", e.what());
            }
        }
    }
}

}  // namespace

const char* tier_name(RunTier t) {
    switch (t) {
        case RunTier::Classical: return "classical";
        case RunTier::Linear: return "linear";
        case RunTier::Moments: return "moments";
        case RunTier::Mcwf: return "mcwf";
        case RunTier::Lindblad: return "lindblad";
        case RunTier::Sweep: return "sweep";
    }
    return "?";
}

RunTier parse_tier(const std::string& name) {
    for (auto t : {RunTier::Classical, RunTier::Linear, RunTier::Moments, RunTier::Mcwf, RunTier::Lindblad,
                   RunTier::Sweep})
        if (name == tier_name(t)) return t;
    throw ConfigError("config tier: unknown tier '" + name + "'");
}

SystemParams<double> ParamsBlock::resolve() const {
    SystemParams<double> p{kappa, delta, u0, eta.value_or(0), omega_rec};
    if (omega_m) {
        if (optimal_detuning) {
            p.delta = -*omega_m;
            p.eta = eta_for_optimal_trap(*omega_m, p);
        } else {
            p.eta = eta_for_trap(*omega_m, p);
        }
    } else if (optimal_detuning) {
        p = with_optimal_detuning(p);
    }
    return p;
}

std::vector<double> SweepBlock::grid() const {
    if (values) return *values;
    return spacing == "log" ? analysis::log_grid(start, stop, n) : analysis::linear_grid(start, stop, n);
}

RunConfig parse_config(const json& j) {
    RunConfig c;
    Reader r(j, "$");
    require(r.has("schema_version"), "$.schema_version", "missing");
    r.get("schema_version", c.schema_version);
    require(c.schema_version == kSchemaVersion, "$.schema_version",
            "unsupported version " + std::to_string(c.schema_version));
    require(r.has("tier"), "$.tier", "missing");
    std::string tier;
    r.get("tier", tier);
    c.tier = parse_tier(tier);
    if (auto b = r.child("params")) read(*b, c.params);
    if (auto b = r.child("classical")) read(*b, c.classical);
    if (auto b = r.child("moments")) read(*b, c.moments);
    if (auto b = r.child("quantum")) read(*b, c.quantum);
    if (auto b = r.child("lindblad")) read(*b, c.lindblad);
    if (auto b = r.child("sweep")) read(*b, c.sweep);
    if (auto b = r.child("output")) {
        b->get("dir", c.out_dir);
        b->finish();
    }
    r.finish();
    validate(c);
    return c;
}

json read_config_json(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path.string());
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_config_json(path)); }

json manifest(const RunConfig& c) {
    json j;
    j["schema_version"] = c.schema_version;
    j["tier"] = tier_name(c.tier);
    const auto& p = c.params;
    json& jp = j["params"];
    jp["kappa"] = p.kappa;
    jp["delta"] = p.delta;
    jp["u0"] = p.u0;
    jp["omega_rec"] = p.omega_rec;
    if (p.eta) jp["eta"] = *p.eta;
    if (p.omega_m) jp["omega_m"] = *p.omega_m;
    jp["optimal_detuning"] = p.optimal_detuning;

    if (c.tier == RunTier::Classical) {
        const auto& b = c.classical;
        j["classical"] = {{"t_max", b.t_max}, {"n_samples", b.n_samples}, {"rtol", b.rtol}, {"x0", b.x0}, {"p0", b.p0}};
    }
    if (c.tier == RunTier::Moments) {
        const auto& b = c.moments;
        j["moments"] = {{"t_max", b.t_max},
                        {"n_samples", b.n_samples},
                        {"rtol", b.rtol},
                        {"initial_occupancy", b.initial_occupancy}};
    }
    if (uses_quantum(c)) {
        const auto& b = c.quantum;
        j["quantum"] = {{"treatment", b.treatment},
                        {"sector", b.sector},
                        {"n_mom", b.n_mom},
                        {"n_fock_sine", b.n_fock_sine},
                        {"n_fock_cos", b.n_fock_cos},
                        {"t_max", b.t_max},
                        {"n_samples", b.n_samples},
                        {"initial", {{"kind", b.initial.kind}, {"e_kin", b.initial.e_kin}, {"n_sine", b.initial.n_sine}}},
                        {"n_traj", b.n_traj},
                        {"seed", b.seed},
                        {"keep_records", b.keep_records},
                        {"rtol", b.rtol},
                        {"atol", b.atol},
                        {"average_window", b.average_window},
                        {"fit_skip", b.fit_skip},
                        {"jump_threshold", b.jump_threshold},
                        {"min_dwell_samples", b.min_dwell_samples}};
    }
    if (c.tier == RunTier::Lindblad) {
        const auto& b = c.lindblad;
        j["lindblad"] = {{"rtol", b.rtol}, {"atol", b.atol}, {"max_dim", b.max_dim}};
    }
    if (c.tier == RunTier::Sweep) {
        const auto& b = c.sweep;
        j["sweep"] = {{"axis", b.axis}, {"values", b.grid()}, {"quantities", b.quantities}};
    }
    return j;
}

}  // namespace ringcav::cli
