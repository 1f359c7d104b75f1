#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "claimsbench/errors.hpp"
#include "claimsbench/vmt.hpp"

namespace claimsbench::pipeline {

inline constexpr const char* kToolName = "claimsbench";
inline constexpr const char* kToolVersion = "1.0.0";

// Command-line values; unset fields fall back to the config file, then to
// built-in defaults.
struct ConfigOverrides {
    std::optional<std::string> inputs;
    std::optional<std::string> out;
    std::optional<double> confidence;
    std::optional<std::string> vmt_selection;  // auto | state | urban
    std::optional<bool> strict;
    std::optional<std::uint64_t> seed;
};

struct RunConfig {
    std::filesystem::path inputs_dir = "inputs";
    std::filesystem::path out_dir = "out";
    double confidence = 0.95;
    vmt::Selection vmt_selection = vmt::Selection::ConservativeAuto;
    bool strict = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> simconfig;  // default: inputs_dir/simconfig.json
};

// Layers, lowest priority first: defaults, the JSON file named by the
// CLAIMSBENCH_CONFIG environment variable (when set), explicit flags.
RunConfig resolve_config(const ConfigOverrides& overrides);

// Subcommand bodies. Each returns ExitCode::Ok on success and throws Error
// otherwise, except run_validate which collects row-level issues and returns
// Invariant when any were found.
ExitCode run_validate(const RunConfig& config, std::ostream& out);
ExitCode run_vmt(const RunConfig& config, std::ostream& out);
ExitCode run_baseline(const RunConfig& config, std::ostream& out);
ExitCode run_compare(const RunConfig& config, std::ostream& out);
ExitCode run_simulate(const RunConfig& config, std::ostream& out);
ExitCode run_report(const RunConfig& config, std::ostream& out);

// FNV-1a 64-bit content digest, rendered as "fnv1a:<16 hex digits>".
std::string fnv1a_hex(std::string_view bytes);

}  // namespace claimsbench::pipeline
