#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ringcav/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ringcav: cavity cooling of a polarizable particle in a pumped ring cavity"};
    std::string config;
    std::string out, tier;
    std::uint64_t seed = 0;
    int threads = 0;
    app.add_option("--config", config, "JSON run configuration")->required();
    auto* out_opt = app.add_option("--out", out, "output directory (overrides output.dir)");
    auto* seed_opt = app.add_option("--seed", seed, "master seed for quantum trajectories");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads (overrides RINGCAV_THREADS)");
    auto* tier_opt = app.add_option("--tier", tier, "classical|linear|moments|mcwf|lindblad|sweep");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : ringcav::cli::kExitConfig;
    }

    ringcav::cli::Overrides o;
    if (*out_opt) o.out = out;
    if (*seed_opt) o.seed = seed;
    if (*threads_opt) o.threads = threads;
    if (*tier_opt) o.tier = tier;
    return ringcav::cli::run(config, o);
}
