#include "qmlab/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

namespace {

int resolveThreads(int flag_value) {
    if (flag_value > 0) {
        return flag_value;
    }
    if (const char* env = std::getenv("QML_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) {
            return n;
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "qmlab: slowed irrational torus flows, their time-t maps, and conjugated rotations; "
        "orbit density scans, integer-relation oracles, and recurrence experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 12345;
    int threads = 0;
    app.add_option("--config", config_path, "JSON config file (defaults used when omitted)");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", seed, "RNG seed; all randomness derives from it")
        ->capture_default_str();
    app.add_option("--threads", threads,
                   "worker threads (0 = QML_THREADS env or hardware concurrency)")
        ->capture_default_str();

    app.add_subcommand("construct",
                       "build the punctured field; exit 2 with a witness when two punctures "
                       "share an orbit line");
    app.add_subcommand("orbit", "integrate one orbit and write its samples as CSV");
    app.add_subcommand("density",
                       "forward/backward grid-coverage scan over starts; CSV, PGM rasters, and "
                       "a JSON summary with the empirical exceptional set");
    app.add_subcommand("scan-t",
                       "density of time-t map orbits over a list of t values, with the "
                       "integer-relation oracle on the unslowed field");
    app.add_subcommand("recurrence",
                       "first-return scan and nested-ball certificates for conjugated rotations");
    app.add_subcommand("oracle", "integer-relation scan for a single (beta, gamma) pair");

    CLI11_PARSE(app, argc, argv);

    qmlab::CommandContext ctx;
    try {
        if (!config_path.empty()) {
            ctx.cfg = qmlab::ExperimentConfig::fromFile(config_path);
        } else {
            ctx.cfg = qmlab::ExperimentConfig{};
        }
    } catch (const qmlab::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return qmlab::kExitConfigError;
    }
    ctx.out = out_dir;
    ctx.seed = seed;
    ctx.threads = resolveThreads(threads);

    return qmlab::runCommand(app.get_subcommands().front()->get_name().c_str(), ctx);
}
