#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "claimsbench/pipeline.hpp"

namespace {

using claimsbench::pipeline::ConfigOverrides;

void add_common_options(CLI::App* sub, ConfigOverrides& overrides) {
    sub->add_option_function<std::string>(
        "--inputs", [&](const std::string& v) { overrides.inputs = v; },
        "Directory holding the five input tables");
    sub->add_option_function<std::string>(
        "--out", [&](const std::string& v) { overrides.out = v; }, "Output directory");
    sub->add_option_function<double>(
        "--confidence", [&](double v) { overrides.confidence = v; },
        "Confidence level in (0, 1), default 0.95");
    sub->add_option_function<std::string>(
           "--vmt-selection", [&](const std::string& v) { overrides.vmt_selection = v; },
           "Per-vehicle VMT estimate to use")
        ->check(CLI::IsMember({"auto", "state", "urban"}));
    sub->add_flag_callback(
        "--strict", [&] { overrides.strict = true; },
        "Abort instead of reporting no-data cells");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { overrides.seed = v; },
        "Simulation seed (overrides the simulation config)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmarks fleet liability claim frequencies against calibrated human-driver "
                 "baselines"};
    app.set_version_flag("--version", std::string(claimsbench::pipeline::kToolName) + " " +
                                          claimsbench::pipeline::kToolVersion);
    app.require_subcommand(1);

    ConfigOverrides overrides;
    struct Command {
        const char* name;
        const char* help;
        claimsbench::ExitCode (*run)(const claimsbench::pipeline::RunConfig&, std::ostream&);
    };
    const Command commands[] = {
        {"validate", "Parse all inputs and report schema or invariant violations",
         claimsbench::pipeline::run_validate},
        {"vmt", "Compute per-vehicle VMT estimates", claimsbench::pipeline::run_vmt},
        {"baseline", "Build mileage-mixed human-driver baselines",
         claimsbench::pipeline::run_baseline},
        {"compare", "Compare fleet rates against the baselines",
         claimsbench::pipeline::run_compare},
        {"simulate", "Generate a synthetic dataset and interval-coverage summary",
         claimsbench::pipeline::run_simulate},
        {"report", "Emit every output table plus the structured report",
         claimsbench::pipeline::run_report},
    };
    for (const auto& command : commands) {
        auto* sub = app.add_subcommand(command.name, command.help);
        add_common_options(sub, overrides);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(claimsbench::ExitCode::Schema);
    }

    try {
        const auto config = claimsbench::pipeline::resolve_config(overrides);
        for (const auto& command : commands) {
            if (app.got_subcommand(command.name)) {
                return static_cast<int>(command.run(config, std::cout));
            }
        }
        return static_cast<int>(claimsbench::ExitCode::Failure);
    } catch (const claimsbench::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(claimsbench::ExitCode::Failure);
    }
}
