#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "ofdmisac/channel.hpp"
#include "ofdmisac/config.hpp"
#include "ofdmisac/detect.hpp"
#include "ofdmisac/receiver.hpp"
#include "ofdmisac/waveform.hpp"

namespace ofdmisac {

/// Worker count for trial fan-out: OFDMISAC_THREADS if set, else hardware concurrency.
int worker_count();

/// fn(i) for i in [0, count) across worker threads; results come back in index order,
/// so reductions over them are deterministic. The first exception is rethrown.
template <typename Fn>
auto parallel_map(int count, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, int>> {
    using R = std::invoke_result_t<Fn&, int>;
    std::vector<R> results(static_cast<std::size_t>(std::max(count, 0)));
    const int workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    results[i] = fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return results;
}

struct SimulatedFrame {
    DataGrid grid;
    Scene scene;
    ComplexFrame tx;
    ComplexFrame rx;
};

/// Data grid, channel and (optionally) noise for one trial, all driven by `seed`.
/// An empty target list gives an echo-free frame.
SimulatedFrame simulate_frame(const SystemParams& params, const DerivedParams& dp, const std::vector<Target>& targets,
                              std::uint64_t seed, bool noise, DopplerMode doppler = DopplerMode::PerSymbol);

struct SinrEstimateOptions {
    int min_trials = 50;
    int max_trials = 2000;
    double target_std_error_db = 0.2;
    RemovalMode removal = RemovalMode::Divide;
    bool discard_first_symbol = false;
};

struct SinrMeasurement {
    double sinr = 0;          // (mean peak - mean floor) / mean floor
    double peak_w = 0;        // mean power at the target's (range, zero-Doppler) cell
    double floor_w = 0;       // mean power over cells at least 3 range bins from the target
    double std_error_db = 0;
    int trials = 0;
};

/// Monte Carlo SINR of a lone target in window 0. Trials are added in batches until the
/// standard error of the SINR drops to the target or max_trials is reached.
SinrMeasurement measure_sinr(const SystemParams& params, const DerivedParams& dp, const Target& target,
                             std::uint64_t seed, const SinrEstimateOptions& options = {});

/// CSV file whose first line is a `#` comment, followed by the header row.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& comment, const std::string& header);
    void row(const std::string& line);
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
};

/// Fixed-format number for CSV output; NaN and infinities print as `nan`, `inf`, `-inf`.
std::string fmt(double v, int precision = 6);

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<int> trials;
    bool trace_windows = false;
};

Scenario apply_overrides(Scenario scenario, const RunOptions& options);

/// Runs `kind` for the scenario, writing CSVs plus metadata.json to the output directory.
/// Returns 0 on success; validate returns 3 when any distance misses the tolerance.
int run_experiment(const Scenario& scenario, ExperimentKind kind, const RunOptions& options, std::ostream& log);

}  // namespace ofdmisac
