#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "ringcav/cli.hpp"
#include "ringcav/errors.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using namespace ringcav::cli;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("ringcav_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_config(const fs::path& dir, const json& j) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

int invoke(const std::string& args) {
    const std::string cmd = std::string(RINGCAV_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> listing(const fs::path& dir) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

json linear_config() {
    return {{"schema_version", 1},
            {"tier", "linear"},
            {"params", {{"kappa", 1}, {"delta", -6}, {"u0", 0.01}, {"omega_rec", 0.01}, {"omega_m", 6}}}};
}

json mcwf_config() {
    return {{"schema_version", 1},
            {"tier", "mcwf"},
            {"params", {{"kappa", 1}, {"delta", -6}, {"u0", 0.01}, {"omega_rec", 0.5}, {"omega_m", 6}}},
            {"quantum",
             {{"n_mom", 6},
              {"n_fock_sine", 3},
              {"t_max", 10},
              {"n_samples", 21},
              {"n_traj", 12},
              {"keep_records", 2},
              {"seed", 3},
              {"initial", {{"kind", "momentum"}, {"e_kin", 8}}}}}};
}

}  // namespace

TEST_CASE("linear tier reports the closed-form occupancy") {
    const auto d = scratch("linear");
    const auto out = d / "out";
    REQUIRE(invoke("--config " + write_config(d, linear_config()).string() + " --out " + out.string()) == 0);
    const json s = json::parse(slurp(out / "summary.json"));
    CHECK(s["status"] == "ok");
    CHECK(s["n_at"].get<double>() == doctest::Approx(1.0 / 144).epsilon(1e-14));
    CHECK(listing(out) == std::vector<std::string>{"linear.csv", "manifest.json", "summary.json"});
}

TEST_CASE("unknown keys are config errors with only an error report") {
    const auto d = scratch("unknown");
    json c = linear_config();
    c["params"]["omega_trap"] = 6;
    const auto out = d / "out";
    CHECK(invoke("--config " + write_config(d, c).string() + " --out " + out.string()) == kExitConfig);
    CHECK(listing(out) == std::vector<std::string>{"error.json"});
    const json e = json::parse(slurp(out / "error.json"));
    CHECK(e["kind"] == "config");
    CHECK(e["message"].get<std::string>().find("params.omega_trap") != std::string::npos);

    CHECK_THROWS_AS(parse_config(json{{"schema_version", 2}, {"tier", "linear"}}), ringcav::ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"tier", "linear"}}), ringcav::ConfigError);
    json bad = mcwf_config();
    bad["quantum"]["initial"]["kind"] = "hot";
    CHECK_THROWS_AS(parse_config(bad), ringcav::ConfigError);
    bad = linear_config();
    bad["params"]["eta"] = 3;
    CHECK_THROWS_AS(parse_config(bad), ringcav::ConfigError);
    CHECK(invoke("--config " + (d / "missing.json").string() + " --out " + (d / "o2").string()) == kExitConfig);
    CHECK(invoke("--bogus-flag") == kExitConfig);
}

TEST_CASE("trajectory artifacts are byte-identical across reruns and worker counts") {
    const auto d = scratch("determinism");
    const auto cfg = write_config(d, mcwf_config()).string();
    REQUIRE(invoke("--config " + cfg + " --out " + (d / "a").string() + " --threads 1") == 0);
    REQUIRE(invoke("--config " + cfg + " --out " + (d / "b").string() + " --threads 3") == 0);
    const auto files = listing(d / "a");
    CHECK(files == listing(d / "b"));
    CHECK(std::find(files.begin(), files.end(), "trajectory_001.csv") != files.end());
    for (const auto& f : files) {
        INFO(f);
        CHECK(slurp(d / "a" / f) == slurp(d / "b" / f));
    }
    REQUIRE(invoke("--config " + cfg + " --out " + (d / "c").string() + " --seed 4") == 0);
    CHECK(slurp(d / "a" / "ensemble.csv") != slurp(d / "c" / "ensemble.csv"));
}

TEST_CASE("the manifest reproduces the run") {
    const auto d = scratch("manifest");
    const auto cfg = write_config(d, mcwf_config()).string();
    REQUIRE(invoke("--config " + cfg + " --out " + (d / "a").string()) == 0);
    REQUIRE(invoke("--config " + (d / "a" / "manifest.json").string() + " --out " + (d / "b").string()) == 0);
    CHECK(slurp(d / "a" / "ensemble.csv") == slurp(d / "b" / "ensemble.csv"));
    CHECK(slurp(d / "a" / "manifest.json") == slurp(d / "b" / "manifest.json"));
    const json m = json::parse(slurp(d / "a" / "manifest.json"));
    CHECK(m["quantum"]["seed"] == 3);
    CHECK(m["quantum"]["rtol"] == 1e-7);
    CHECK(!m.contains("sweep"));
    CHECK(!m.contains("output"));
}

TEST_CASE("tier override") {
    const auto d = scratch("tier");
    const auto out = d / "out";
    REQUIRE(invoke("--config " + write_config(d, linear_config()).string() + " --out " + out.string() +
                   " --tier moments") == 0);
    CHECK(fs::exists(out / "moments.csv"));
    const json s = json::parse(slurp(out / "summary.json"));
    CHECK(s["tier"] == "moments");
}

TEST_CASE("truncation and size guards refuse to run") {
    const auto d = scratch("guards");
    json c = mcwf_config();
    c["quantum"]["initial"]["e_kin"] = 500;  // needs n = 32 > n_mom
    const auto cfg = write_config(d, c).string();
    CHECK(invoke("--config " + cfg + " --out " + (d / "a").string()) == kExitRefused);
    const json s = json::parse(slurp(d / "a" / "summary.json"));
    CHECK(s["status"] == "error");
    CHECK(s["kind"] == "truncation");

    c = mcwf_config();
    c["tier"] = "lindblad";
    c["quantum"]["n_mom"] = 40;
    c["quantum"]["n_fock_sine"] = 9;
    CHECK(invoke("--config " + write_config(d, c).string() + " --out " + (d / "b").string()) == kExitRefused);
    CHECK(json::parse(slurp(d / "b" / "summary.json"))["kind"] == "guard");
}

TEST_CASE("numeric failures") {
    const auto d = scratch("numeric");
    json c = linear_config();
    c["params"] = {{"kappa", 1}, {"delta", 0.5}, {"u0", 0.01}, {"omega_rec", 0.01}, {"eta", 30}};
    CHECK(invoke("--config " + write_config(d, c).string() + " --out " + (d / "a").string()) == kExitNumeric);
}

TEST_CASE("shipped example configs are valid") {
    int n = 0;
    for (const auto& e : fs::directory_iterator(RINGCAV_CONFIG_DIR)) {
        if (e.path().extension() != ".json") continue;
        INFO(e.path().string());
        const auto c = load_config(e.path());
        CHECK(parse_config(manifest(c)).tier == c.tier);
        ++n;
    }
    CHECK(n == 6);
}
