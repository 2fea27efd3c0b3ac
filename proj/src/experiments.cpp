#include "ofdmisac/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "ofdmisac/analysis.hpp"
#include "ofdmisac/rng.hpp"

namespace ofdmisac {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

int worker_count() {
    if (const char* env = std::getenv("OFDMISAC_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SimulatedFrame simulate_frame(const SystemParams& params, const DerivedParams& dp, const std::vector<Target>& targets,
                              std::uint64_t seed, bool noise, DopplerMode doppler) {
    SimulatedFrame f;
    f.grid = gen_data_grid(dp, params.modulation_order, seed);
    f.tx = modulate(f.grid, params, dp);
    if (!targets.empty()) f.scene = scene_from_targets(targets, params, dp, seed);
    f.rx = apply_channel(f.tx, f.scene, dp, doppler);
    if (noise) f.rx = add_noise(f.rx, dp, seed);
    return f;
}

namespace {

struct TrialCells {
    double peak = 0;
    double floor = 0;
};

TrialCells sinr_trial(const SystemParams& params, const DerivedParams& dp, const Target& target, std::uint64_t seed,
                      const SinrEstimateOptions& options) {
    const auto frame = simulate_frame(params, dp, {target}, seed, true);
    const ReceiverOptions ro{options.removal, options.discard_first_symbol};
    const auto map = process_window(frame.rx, frame.grid, dp, 0, ro).map;
    const int n = map.range_bins();
    const int p_t = frame.scene.paths.front().delay_taps % n;
    double sum = 0;
    std::int64_t count = 0;
    for (int q = 0; q < map.doppler_bins(); ++q) {
        for (int p = 0; p < n; ++p) {
            const int d = std::abs(p - p_t);
            if (std::min(d, n - d) <= 2) continue;
            sum += map.at(p, q);
            ++count;
        }
    }
    return {map.at(p_t, 0), sum / static_cast<double>(count)};
}

}  // namespace

SinrMeasurement measure_sinr(const SystemParams& params, const DerivedParams& dp, const Target& target,
                             std::uint64_t seed, const SinrEstimateOptions& options) {
    std::vector<TrialCells> cells;
    const int batch = std::max(1, options.min_trials);
    SinrMeasurement m;
    while (true) {
        const int start = static_cast<int>(cells.size());
        const int count = std::min(batch, options.max_trials - start);
        if (count <= 0) break;
        auto more = parallel_map(count, [&](int i) {
            return sinr_trial(params, dp, target, derive_seed(seed, static_cast<std::uint64_t>(start + i)), options);
        });
        cells.insert(cells.end(), more.begin(), more.end());

        const double n = static_cast<double>(cells.size());
        double peak = 0, floor = 0;
        for (const auto& c : cells) {
            peak += c.peak;
            floor += c.floor;
        }
        peak /= n;
        floor /= n;
        double var = 0;
        for (const auto& c : cells) {
            const double s = (c.peak - c.floor) - (peak - floor);
            var += s * s;
        }
        var /= std::max(1.0, n - 1);
        m.peak_w = peak;
        m.floor_w = floor;
        m.sinr = (peak - floor) / floor;
        m.trials = static_cast<int>(cells.size());
        const double se_linear = std::sqrt(var / n) / floor;
        m.std_error_db = m.sinr > 0 ? 10.0 / std::log(10.0) * se_linear / m.sinr : INFINITY;
        if (m.std_error_db <= options.target_std_error_db) break;
    }
    return m;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& comment, const std::string& header)
    : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IsacError("cannot write '" + path + "'");
    out_ << "# " << comment << '\n' << header << '\n';
}

void CsvWriter::row(const std::string& line) { out_ << line << '\n'; }

std::string fmt(double v, int precision) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

Scenario apply_overrides(Scenario scenario, const RunOptions& options) {
    if (options.seed) scenario.system.rng_seed = *options.seed;
    if (options.output_dir) scenario.experiment.output_dir = *options.output_dir;
    if (options.trials) {
        if (*options.trials < 1) throw ConfigError("--trials must be >= 1");
        scenario.experiment.trials = *options.trials;
        scenario.experiment.max_trials = std::max(scenario.experiment.max_trials, *options.trials);
    }
    return scenario;
}

namespace {

std::string join(std::initializer_list<std::string> parts) {
    std::string s;
    for (const auto& p : parts) {
        if (!s.empty()) s += ',';
        s += p;
    }
    return s;
}

double power_dbm(double w) { return w > 0 ? watts_to_dbm(w) : -INFINITY; }

class Run {
public:
    Run(const Scenario& sc, ExperimentKind kind, const RunOptions& options, std::ostream& log)
        : sc_(sc), kind_(kind), options_(options), log_(log), dp_(derive(sc.system)),
          dir_(sc.experiment.output_dir), comment_(describe(sc, dp_)) {
        fs::create_directories(dir_);
    }

    int execute() {
        int status = 0;
        switch (kind_) {
            case ExperimentKind::RangeProfile:
            case ExperimentKind::RangeDoppler: simulate(); break;
            case ExperimentKind::SinrCurve: status = sinr_sweep(false); break;
            case ExperimentKind::Validate: status = sinr_sweep(true); break;
            case ExperimentKind::MaxRangeSweep: max_range_sweep(); break;
            case ExperimentKind::Constellation: constellation_samples(); break;
            case ExperimentKind::SlidingWindow: sliding(); break;
        }
        write_metadata(status);
        return status;
    }

private:
    CsvWriter csv(const std::string& file, const std::string& header) {
        const std::string path = (dir_ / file).string();
        files_.push_back(file);
        return CsvWriter(path, comment_, header);
    }

    std::uint64_t seed() const { return sc_.system.rng_seed; }

    void write_range_csvs(const RangeDopplerMap& map, const std::string& prefix, const std::string& suffix, int window) {
        // Profile along the Doppler bin holding the strongest cell.
        int best_q = 0;
        double best = -1;
        for (int q = 0; q < map.doppler_bins(); ++q) {
            for (int p = 0; p < map.range_bins(); ++p) {
                if (map.at(p, q) > best) {
                    best = map.at(p, q);
                    best_q = q;
                }
            }
        }
        auto profile = csv(prefix + "range_profile" + suffix + ".csv", "bin,distance_m,power_dbm");
        for (int p = 0; p < map.range_bins(); ++p) {
            const double d = (p + static_cast<double>(window) * dp_.cp_taps) * kSpeedOfLight / (2 * dp_.bandwidth_hz);
            profile.row(join({std::to_string(p), fmt(d), fmt(power_dbm(map.at(p, best_q)), 4)}));
        }
        auto rd = csv(prefix + "range_doppler" + suffix + ".csv", "range_bin,doppler_bin,power_dbm");
        for (int q = 0; q < map.doppler_bins(); ++q) {
            for (int p = 0; p < map.range_bins(); ++p) {
                rd.row(join({std::to_string(p), std::to_string(q), fmt(power_dbm(map.at(p, q)), 4)}));
            }
        }
    }

    void write_detections(const std::string& file, const std::vector<Detection>& dets) {
        auto out = csv(file, "window,range_bin,distance_m,velocity_mps,power_dbm");
        for (const auto& d : dets) {
            out.row(join({std::to_string(d.window_index), std::to_string(d.range_bin), fmt(d.distance_m),
                          fmt(d.velocity_mps), fmt(power_dbm(d.power_w), 4)}));
        }
    }

    void dump_frame(const ComplexFrame& frame) {
        auto out = csv("frame.csv", "tap,re,im");
        for (std::size_t i = 0; i < frame.samples.size(); ++i) {
            out.row(join({std::to_string(frame.start_index + static_cast<std::int64_t>(i)),
                          fmt(frame.samples[i].real(), 12), fmt(frame.samples[i].imag(), 12)}));
        }
    }

    void simulate() {
        const auto& ex = sc_.experiment;
        const auto det = sc_.detector.resolved(dp_);
        const ReceiverOptions ro{det.removal, det.discard_first_symbol};
        auto maps = parallel_map(ex.trials, [&](int t) {
            const auto f = simulate_frame(sc_.system, dp_, sc_.targets, derive_seed(seed(), t), ex.noise, ex.doppler);
            return process_window(f.rx, f.grid, dp_, 0, ro).map;
        });
        RangeDopplerMap mean = maps.front();
        for (std::size_t t = 1; t < maps.size(); ++t) {
            for (std::size_t i = 0; i < mean.power().size(); ++i) mean.power()[i] += maps[t].power()[i];
        }
        for (auto& v : mean.power()) v /= ex.trials;

        write_range_csvs(mean, "", "", 0);
        const double floor = noise_floor(mean, det.p_max, det.q_max);
        std::vector<Detection> dets;
        for (const auto& pk : detect_window(mean, floor, det.rho, dp_.num_subcarriers)) {
            dets.push_back(to_detection(pk.range_bin, pk.doppler_bin, pk.power_w, 0, dp_, sc_.system));
        }
        write_detections("detections.csv", dets);
        if (ex.dump_frame) dump_frame(simulate_frame(sc_.system, dp_, sc_.targets, derive_seed(seed(), 0), ex.noise, ex.doppler).rx);

        summary_["noise_floor_dbm"] = power_dbm(floor);
        summary_["analytic_noise_floor_dbm"] = watts_to_dbm(dp_.noise_power_w);
        summary_["detections"] = dets.size();
        log_ << "noise floor " << fmt(power_dbm(floor), 2) << " dBm (analytic " << fmt(watts_to_dbm(dp_.noise_power_w), 2)
             << " dBm), " << dets.size() << " detection(s)\n";
        for (const auto& d : dets) {
            log_ << "  bin " << d.range_bin << " q " << d.doppler_bin << "  " << fmt(d.distance_m, 2) << " m  "
                 << fmt(power_dbm(d.power_w), 2) << " dBm\n";
        }
    }

    int sinr_sweep(bool validate) {
        const auto& ex = sc_.experiment;
        const auto det = sc_.detector.resolved(dp_);
        const double rcs = ex.rcs_m2;
        SinrEstimateOptions opt;
        opt.min_trials = validate ? std::max(ex.trials, 50) : ex.trials;
        opt.max_trials = std::max(opt.min_trials, ex.max_trials);
        opt.target_std_error_db = ex.target_std_error_db;
        opt.removal = det.removal;
        opt.discard_first_symbol = det.discard_first_symbol;

        std::optional<CsvWriter> curve;
        std::optional<CsvWriter> report;
        if (validate) report.emplace(csv("validate_report.csv", "distance_m,abs_error_db"));
        else curve.emplace(csv("sinr_curve.csv", "distance_m,gamma_analytic_db,gamma_simulated_db,gamma_sliding_db"));

        double worst = 0;
        json rows = json::array();
        const auto distances = ex.sweep_distances();
        for (std::size_t i = 0; i < distances.size(); ++i) {
            const double d = distances[i];
            const Target target{d, 0.0, rcs};
            const double analytic = linear_to_db(sinr_single(d, rcs, sc_.system, dp_).sinr);
            Scene lone = scene_from_targets({target}, sc_.system, dp_, seed());
            const double sliding = linear_to_db(sinr_sliding(d, rcs, lone, sc_.system, dp_).sinr);
            const auto m = measure_sinr(sc_.system, dp_, target, derive_seed(seed(), 1000003 + i), opt);
            const double simulated = m.sinr > 0 ? linear_to_db(m.sinr) : NAN;
            const double err = std::isnan(simulated) ? INFINITY : std::abs(simulated - analytic);
            worst = std::max(worst, err);
            if (validate) report->row(join({fmt(d), fmt(err, 4)}));
            else curve->row(join({fmt(d), fmt(analytic, 4), fmt(simulated, 4), fmt(sliding, 4)}));
            rows.push_back({{"distance_m", d}, {"trials", m.trials}, {"std_error_db", m.std_error_db}});
            log_ << fmt(d, 1) << " m  analytic " << fmt(analytic, 2) << " dB  simulated " << fmt(simulated, 2)
                 << " dB (" << m.trials << " trials, se " << fmt(m.std_error_db, 2) << " dB)\n";
        }
        summary_["max_abs_error_db"] = worst;
        summary_["points"] = rows;
        if (validate) {
            const bool ok = worst < ex.max_error_db;
            summary_["pass"] = ok;
            log_ << "max |error| " << fmt(worst, 3) << " dB -> " << (ok ? "PASS" : "FAIL") << '\n';
            return ok ? 0 : 3;
        }
        return 0;
    }

    void max_range_sweep() {
        const auto& ex = sc_.experiment;
        const double rho = sc_.detector.rho;
        auto conv = csv("max_range.csv", "cp_duration_s,m_symbols,max_range_m");
        auto slid = csv("max_range_sliding.csv", "cp_duration_s,m_symbols,max_range_m");
        for (int m : ex.symbol_counts) {
            for (double cp : ex.sweep_cp_durations()) {
                SystemParams p = with_quantized_cp(sc_.system, cp);
                p.num_symbols = m;
                const DerivedParams dp = derive(p);
                auto solve = [&](RangeModel model) {
                    try {
                        return max_range(rho, model, ex.rcs_m2, p, dp);
                    } catch (const NoRange&) {
                        return 0.0;
                    }
                };
                conv.row(join({fmt(dp.cp_duration_s, 12), std::to_string(m), fmt(solve(RangeModel::Conventional), 4)}));
                slid.row(join({fmt(dp.cp_duration_s, 12), std::to_string(m), fmt(solve(RangeModel::Sliding), 4)}));
            }
        }
        const double here = max_range(rho, RangeModel::Conventional, ex.rcs_m2, sc_.system, dp_);
        summary_["max_range_m"] = here;
        log_ << "max range at the configured CP: " << fmt(here, 2) << " m\n";
    }

    void constellation_samples() {
        const auto& ex = sc_.experiment;
        const auto s = interference_samples(ex.n_tau, dp_.cp_taps, dp_.num_subcarriers, sc_.system.modulation_order,
                                            seed(), ex.trials);
        auto out = csv("constellation.csv", "kind,re,im");
        for (const auto& z : s.ici) out.row(join({"ici", fmt(z.real(), 8), fmt(z.imag(), 8)}));
        for (const auto& z : s.isi) out.row(join({"isi", fmt(z.real(), 8), fmt(z.imag(), 8)}));
        auto stats = [](const SampleStats& st) {
            return json{{"mean_re", st.mean.real()}, {"mean_im", st.mean.imag()}, {"variance", st.variance},
                        {"kurtosis", st.kurtosis}, {"circularity", st.circularity}};
        };
        summary_["p_ici"] = s.split.p_ici;
        summary_["p_isi"] = s.split.p_isi;
        summary_["ici"] = stats(s.ici_stats);
        summary_["isi"] = stats(s.isi_stats);
        log_ << "ICI variance " << fmt(s.ici_stats.variance, 5) << " (P_ICI " << fmt(s.split.p_ici, 5) << "), ISI variance "
             << fmt(s.isi_stats.variance, 5) << " (P_ISI " << fmt(s.split.p_isi, 5) << ")\n";
    }

    void sliding() {
        const auto& ex = sc_.experiment;
        const auto trace = options_.trace_windows;
        auto results = parallel_map(ex.trials, [&](int t) {
            const auto f = simulate_frame(sc_.system, dp_, sc_.targets, derive_seed(seed(), t), ex.noise, ex.doppler);
            return sliding_window_detect(f.rx, f.grid, sc_.system, dp_, sc_.detector, trace && t == 0);
        });
        const auto& first = results.front();
        write_detections("detections.csv", first.detections);
        if (trace) {
            fs::create_directories(dir_ / "windows");
            for (const auto& w : first.windows) {
                write_range_csvs(w.map, "windows/", "_w" + std::to_string(w.window), w.window);
            }
        }
        json windows = json::array();
        for (const auto& w : first.windows) {
            windows.push_back({{"window", w.window},
                               {"noise_floor_dbm", power_dbm(w.noise_floor_w)},
                               {"detections", w.detections.size()},
                               {"cancelled", w.cancelled},
                               {"averaged_filter", w.averaged_filter}});
        }
        std::vector<int> counts;
        for (const auto& r : results) counts.push_back(static_cast<int>(r.detections.size()));
        summary_["windows"] = windows;
        summary_["detections_per_trial"] = counts;
        log_ << first.windows.size() << " window(s), " << first.detections.size() << " detection(s)\n";
        for (const auto& d : first.detections) {
            log_ << "  window " << d.window_index << " bin " << d.range_bin << "  " << fmt(d.distance_m, 2) << " m  "
                 << fmt(power_dbm(d.power_w), 2) << " dBm\n";
        }
    }

    void write_metadata(int status) const {
        const auto det = sc_.detector.resolved(dp_);
        const auto& s = sc_.system;
        json meta;
        meta["scenario"] = sc_.name;
        meta["experiment"] = to_string(kind_);
        meta["seed"] = s.rng_seed;
        meta["trials"] = sc_.experiment.trials;
        meta["status"] = status;
        meta["system"] = {{"carrier_frequency_hz", s.carrier_frequency_hz},
                          {"subcarrier_spacing_hz", s.subcarrier_spacing_hz},
                          {"num_subcarriers", s.num_subcarriers},
                          {"num_symbols", s.num_symbols},
                          {"cp_taps", dp_.cp_taps},
                          {"cp_duration_s", dp_.cp_duration_s},
                          {"tx_power_w", s.tx_power_w},
                          {"tx_gain_db", s.tx_gain_db},
                          {"rx_gain_db", s.rx_gain_db},
                          {"noise_figure_db", s.noise_figure_db},
                          {"temperature_k", s.temperature_k},
                          {"modulation_order", s.modulation_order}};
        meta["derived"] = {{"bandwidth_hz", dp_.bandwidth_hz},
                           {"noise_power_dbm", watts_to_dbm(dp_.noise_power_w)},
                           {"isi_free_range_m", dp_.isi_free_range_m},
                           {"unambiguous_range_m", dp_.unambiguous_range_m},
                           {"spectral_efficiency", dp_.spectral_efficiency}};
        meta["detector"] = {{"rho", det.rho},
                            {"d_max_m", det.d_max_m},
                            {"n_lag", det.n_lag},
                            {"p_max", det.p_max},
                            {"q_max", det.q_max},
                            {"discard_first_symbol", det.discard_first_symbol},
                            {"gate_taps", det.gate_taps},
                            {"removal", det.removal == RemovalMode::Divide ? "divide" : "conjugate"}};
        json targets = json::array();
        for (const auto& t : sc_.targets) {
            targets.push_back({{"distance_m", t.distance_m}, {"velocity_mps", t.velocity_mps}, {"rcs_m2", t.rcs_m2}});
        }
        meta["targets"] = targets;
        meta["files"] = files_;
        meta["summary"] = summary_;
        std::ofstream out(dir_ / "metadata.json", std::ios::binary);
        out << meta.dump(2) << '\n';
    }

    const Scenario& sc_;
    ExperimentKind kind_;
    RunOptions options_;
    std::ostream& log_;
    DerivedParams dp_;
    fs::path dir_;
    std::string comment_;
    std::vector<std::string> files_;
    json summary_ = json::object();
};

}  // namespace

int run_experiment(const Scenario& scenario, ExperimentKind kind, const RunOptions& options, std::ostream& log) {
    const Scenario sc = apply_overrides(scenario, options);
    try {
        return Run(sc, kind, options, log).execute();
    } catch (const IsacError& e) {
        throw IsacError(sc.name + ": " + e.what());
    }
}

}  // namespace ofdmisac
