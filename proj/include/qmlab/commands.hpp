#pragma once

#include "qmlab/config.hpp"

#include <cstdint>
#include <filesystem>

namespace qmlab {

/// Exit codes shared by the CLI and the command layer.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitConstructionRejected = 2;
inline constexpr int kExitNumericFailure = 3;

struct CommandContext {
    ExperimentConfig cfg;
    std::filesystem::path out = "out";
    std::uint64_t seed = 12345;
    int threads = 1;
};

int cmdConstruct(const CommandContext& ctx);
int cmdOrbit(const CommandContext& ctx);
int cmdDensity(const CommandContext& ctx);
int cmdScanT(const CommandContext& ctx);
int cmdRecurrence(const CommandContext& ctx);
int cmdOracle(const CommandContext& ctx);

/// Maps exceptions from a command body to the exit-code contract.
int runCommand(const char* name, const CommandContext& ctx);

}  // namespace qmlab
