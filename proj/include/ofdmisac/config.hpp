#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ofdmisac/channel.hpp"
#include "ofdmisac/detect.hpp"
#include "ofdmisac/params.hpp"

namespace ofdmisac {

enum class ExperimentKind {
    RangeProfile,
    RangeDoppler,
    SinrCurve,
    MaxRangeSweep,
    Constellation,
    SlidingWindow,
    Validate,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

struct ExperimentConfig {
    std::optional<ExperimentKind> kind;
    int trials = 1;
    std::string output_dir = "out";
    bool noise = true;
    DopplerMode doppler = DopplerMode::PerSymbol;
    bool dump_frame = false;

    // Distance sweeps (sinr_curve, validate): explicit list, or a linear grid.
    std::vector<double> distances_m;
    double distance_min_m = 50;
    double distance_max_m = 1200;
    int distance_points = 20;

    // Max-range sweep: explicit CP list, or a linear grid; one curve per symbol count.
    std::vector<double> cp_durations_s;
    double cp_min_s = 0;
    double cp_max_s = 5.3e-6;
    int cp_points = 54;
    std::vector<int> symbol_counts{14};
    double rcs_m2 = 3.5;  // analytic sweeps

    // Constellation: delay in taps (CP comes from [system]).
    int n_tau = 174;

    // Monte Carlo SINR estimation (sinr_curve, validate).
    int max_trials = 2000;
    double target_std_error_db = 0.2;
    double max_error_db = 1.0;

    std::vector<double> sweep_distances() const;
    std::vector<double> sweep_cp_durations() const;
};

struct Scenario {
    std::string name;
    SystemParams system;
    std::vector<Target> targets;
    DetectorConfig detector;
    ExperimentConfig experiment;
};

/// Parses the structured config format: sections [system], [[targets]], [detector],
/// [experiment]; `key = value` lines; `#` comments; numbers, booleans, quoted
/// strings and single-line numeric arrays. Unknown keys are errors. Throws ConfigError
/// with the line number and key.
Scenario parse_config(const std::string& text, const std::string& name = "config");
Scenario load_config(const std::string& path);

/// Single-line `key=value` summary of every resolved parameter.
std::string describe(const Scenario& scenario, const DerivedParams& dp);

}  // namespace ofdmisac
