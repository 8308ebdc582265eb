#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace geoflow::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitIdentityFailure = 2,
    kExitBlowUp = 3,
    kExitUsage = 4,
};

/// Everything one invocation needs. Manifest keys are the long flag names,
/// so a saved manifest and the command line are interchangeable.
struct RunManifest
{
    std::string subcommand;

    std::string input;
    std::string output;
    /// Empty derives <output stem>.csv / .json.
    std::string csv;
    std::string json;

    std::string shape = "icosphere";
    int subdiv = 3;
    double radius = 1.0;
    double noise = 0.0;
    std::uint64_t seed = 0;

    std::string flow = "sdf";
    std::string scheme = "semi-implicit";
    /// "auto" or a positive number.
    std::string dt = "auto";
    std::string safety = "auto";
    long steps = 100;
    std::string boundary = "free";
    std::string solver = "direct";
    double solver_tol = 1e-10;
    /// 0 disables the convergence stop.
    double stop_tol = 0.0;

    double volume_drift_tol = 1e-2;
    double monotone_slack = 1e-9;
    double area_rate_tol = 0.15;

    /// compare horizons; "auto" picks h^4 and 100 h^4 from the input's shortest edge.
    std::string short_time = "auto";
    std::string long_time = "auto";
    long long_steps = 200;
};

/// Defaults for a subcommand (smooth runs WF for 20 steps).
RunManifest defaults_for(const std::string& subcommand);

/// Manifest keys accepted by a subcommand, in serialization order.
const std::vector<std::string>& manifest_keys(const std::string& subcommand);

std::string manifest_to_json(const RunManifest& manifest);
/// Throws ConfigError on unknown keys, wrong types or a subcommand mismatch.
RunManifest manifest_from_json(const std::string& text, const std::string& expected_subcommand = {});

int cmd_gen(const RunManifest& m, std::ostream& out, std::ostream& err);
int cmd_evolve(const RunManifest& m, std::ostream& out, std::ostream& err);
int cmd_smooth(const RunManifest& m, std::ostream& out, std::ostream& err);
int cmd_compare(const RunManifest& m, std::ostream& out, std::ostream& err);
int cmd_validate(const RunManifest& m, std::ostream& out, std::ostream& err);

/// Parses argv, dispatches and maps exceptions to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace geoflow::cli
