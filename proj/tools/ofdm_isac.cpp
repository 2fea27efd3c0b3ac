#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ofdmisac/config.hpp"
#include "ofdmisac/experiments.hpp"

using namespace ofdmisac;

namespace {

struct Command {
    const char* name;
    const char* help;
    ExperimentKind kind;
};

constexpr Command kCommands[] = {
    {"simulate", "Simulate frames and write the averaged range profile / range-Doppler map", ExperimentKind::RangeProfile},
    {"sinr-curve", "Analytic, simulated and sliding-window SINR versus distance", ExperimentKind::SinrCurve},
    {"max-range", "Maximum sensing range versus CP duration", ExperimentKind::MaxRangeSweep},
    {"sliding-window", "Run the sliding-window detector with successive cancellation", ExperimentKind::SlidingWindow},
    {"constellation", "Sample the ICI / ISI terms after data removal", ExperimentKind::Constellation},
    {"validate", "Monte Carlo check of the analytic SINR model", ExperimentKind::Validate},
};

bool compatible(ExperimentKind command, ExperimentKind configured) {
    if (command == ExperimentKind::RangeProfile) {
        return configured == ExperimentKind::RangeProfile || configured == ExperimentKind::RangeDoppler;
    }
    return command == configured;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OFDM integrated sensing and communication simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> trials;
    bool trace = false;

    std::map<CLI::App*, ExperimentKind> kinds;
    for (const auto& c : kCommands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", config_path, "Scenario config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Master RNG seed (overrides [system] rng_seed)");
        sub->add_option("--out", out_dir, "Output directory (overrides [experiment] output_dir)");
        sub->add_option("--trials", trials, "Trial count (overrides [experiment] trials)")->check(CLI::PositiveNumber);
        sub->add_flag("--trace-windows", trace, "Write per-window maps (sliding-window)");
        kinds[sub] = c.kind;
    }

    CLI11_PARSE(app, argc, argv);

    try {
        Scenario sc = config_path.empty() ? parse_config("[system]\n", "defaults") : load_config(config_path);
        ExperimentKind kind = ExperimentKind::RangeProfile;
        for (const auto& [sub, k] : kinds) {
            if (sub->parsed()) kind = k;
        }
        if (sc.experiment.kind) {
            if (!compatible(kind, *sc.experiment.kind)) {
                std::cerr << "error: " << sc.name << " configures experiment '" << to_string(*sc.experiment.kind)
                          << "', which this subcommand does not run\n";
                return 1;
            }
            kind = *sc.experiment.kind;
        }
        RunOptions options{seed, out_dir, trials, trace};
        return run_experiment(sc, kind, options, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
