#include "ofdmisac/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

namespace ofdmisac {

namespace {

const std::map<std::string, ExperimentKind>& kind_names() {
    static const std::map<std::string, ExperimentKind> names{
        {"range_profile", ExperimentKind::RangeProfile},   {"range_doppler", ExperimentKind::RangeDoppler},
        {"sinr_curve", ExperimentKind::SinrCurve},         {"max_range_sweep", ExperimentKind::MaxRangeSweep},
        {"constellation", ExperimentKind::Constellation},  {"sliding_window", ExperimentKind::SlidingWindow},
        {"validate", ExperimentKind::Validate},
    };
    return names;
}

using Array = std::vector<double>;
using Value = std::variant<double, bool, std::string, Array>;

struct Entry {
    Value value;
    bool is_integer = false;
    int line = 0;
};

struct Table {
    std::string section;
    int line = 0;
    std::map<std::string, Entry> entries;
};

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
    throw ConfigError(name + ":" + std::to_string(line) + ": " + msg);
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

bool parse_number(const std::string& text, double& out, bool& is_integer) {
    std::string s;
    for (char c : text) {
        if (c != '_') s.push_back(c);
    }
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || !std::isfinite(out)) return false;
    is_integer = s.find_first_of(".eE") == std::string::npos;
    return true;
}

Entry parse_value(const std::string& raw, const std::string& name, int line) {
    Entry e;
    e.line = line;
    if (raw.empty()) fail(name, line, "missing value");
    if (raw == "true" || raw == "false") {
        e.value = raw == "true";
        return e;
    }
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"') fail(name, line, "unterminated string");
        const std::string body = raw.substr(1, raw.size() - 2);
        if (body.find('"') != std::string::npos) fail(name, line, "embedded quote in string");
        e.value = body;
        return e;
    }
    if (raw.front() == '[') {
        if (raw.back() != ']') fail(name, line, "arrays must close on the same line");
        Array items;
        bool all_integer = true;
        std::stringstream ss(raw.substr(1, raw.size() - 2));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) {
                if (ss.eof()) break;  // trailing comma
                fail(name, line, "empty array element");
            }
            double v = 0;
            bool is_int = false;
            if (!parse_number(item, v, is_int)) fail(name, line, "array elements must be numbers: '" + item + "'");
            all_integer = all_integer && is_int;
            items.push_back(v);
        }
        e.value = items;
        e.is_integer = all_integer;
        return e;
    }
    double v = 0;
    if (!parse_number(raw, v, e.is_integer)) fail(name, line, "cannot parse value '" + raw + "'");
    e.value = v;
    return e;
}

std::vector<Table> tokenize(const std::string& text, const std::string& name) {
    std::vector<Table> tables;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            Table t;
            t.line = number;
            if (body.rfind("[[", 0) == 0) {
                if (body.size() < 4 || body.compare(body.size() - 2, 2, "]]") != 0) fail(name, number, "bad table header");
                t.section = "[[" + trim(body.substr(2, body.size() - 4)) + "]]";
            } else {
                if (body.back() != ']') fail(name, number, "bad section header");
                t.section = trim(body.substr(1, body.size() - 2));
            }
            tables.push_back(std::move(t));
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) fail(name, number, "expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        if (key.empty()) fail(name, number, "missing key");
        for (char c : key) {
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) fail(name, number, "invalid key '" + key + "'");
        }
        if (tables.empty()) fail(name, number, "key '" + key + "' outside of any section");
        auto& entries = tables.back().entries;
        if (entries.count(key)) fail(name, number, "duplicate key '" + key + "'");
        entries.emplace(key, parse_value(trim(body.substr(eq + 1)), name, number));
    }
    return tables;
}

// Typed, consumed reads; anything left over afterwards is an unknown key.
class Reader {
public:
    Reader(Table& table, const std::string& name) : table_(table), name_(name) {}

    bool has(const std::string& key) const { return table_.entries.count(key) > 0; }

    template <typename T>
    void read(const std::string& key, T& out) {
        auto it = table_.entries.find(key);
        if (it == table_.entries.end()) return;
        const Entry e = it->second;
        table_.entries.erase(it);
        assign(key, e, out);
    }

    void finish() const {
        if (!table_.entries.empty()) {
            const auto& [key, e] = *table_.entries.begin();
            fail(name_, e.line, "unknown key '" + key + "' in [" + table_.section + "]");
        }
    }

private:
    void assign(const std::string& key, const Entry& e, double& out) {
        if (!std::holds_alternative<double>(e.value)) fail(name_, e.line, "'" + key + "' must be a number");
        out = std::get<double>(e.value);
    }
    void assign(const std::string& key, const Entry& e, int& out) {
        if (!std::holds_alternative<double>(e.value) || !e.is_integer) {
            fail(name_, e.line, "'" + key + "' must be an integer");
        }
        const double v = std::get<double>(e.value);
        if (std::abs(v) > 2147483647.0) fail(name_, e.line, "'" + key + "' is out of range");
        out = static_cast<int>(v);
    }
    void assign(const std::string& key, const Entry& e, std::uint64_t& out) {
        if (!std::holds_alternative<double>(e.value) || !e.is_integer || std::get<double>(e.value) < 0 ||
            std::get<double>(e.value) > 9007199254740992.0) {
            fail(name_, e.line, "'" + key + "' must be a non-negative integer");
        }
        out = static_cast<std::uint64_t>(std::get<double>(e.value));
    }
    void assign(const std::string& key, const Entry& e, std::optional<double>& out) {
        double v = 0;
        assign(key, e, v);
        out = v;
    }
    void assign(const std::string& key, const Entry& e, std::optional<int>& out) {
        int v = 0;
        assign(key, e, v);
        out = v;
    }
    void assign(const std::string& key, const Entry& e, bool& out) {
        if (!std::holds_alternative<bool>(e.value)) fail(name_, e.line, "'" + key + "' must be true or false");
        out = std::get<bool>(e.value);
    }
    void assign(const std::string& key, const Entry& e, std::string& out) {
        if (!std::holds_alternative<std::string>(e.value)) fail(name_, e.line, "'" + key + "' must be a string");
        out = std::get<std::string>(e.value);
    }
    void assign(const std::string& key, const Entry& e, std::vector<double>& out) {
        if (!std::holds_alternative<Array>(e.value)) fail(name_, e.line, "'" + key + "' must be an array");
        out = std::get<Array>(e.value);
    }
    void assign(const std::string& key, const Entry& e, std::vector<int>& out) {
        if (!std::holds_alternative<Array>(e.value) || !e.is_integer) {
            fail(name_, e.line, "'" + key + "' must be an array of integers");
        }
        out.clear();
        for (double v : std::get<Array>(e.value)) out.push_back(static_cast<int>(v));
    }

    Table& table_;
    const std::string& name_;
};

void read_system(Table& t, SystemParams& s, const std::string& name) {
    Reader r(t, name);
    const bool has_seconds = r.has("cp_duration_s");
    const bool has_taps = r.has("cp_taps");
    if (has_seconds && has_taps) {
        fail(name, t.entries.at("cp_taps").line, "give either cp_duration_s or cp_taps, not both");
    }
    if (has_seconds) s.cp_taps.reset();
    r.read("carrier_frequency_hz", s.carrier_frequency_hz);
    r.read("subcarrier_spacing_hz", s.subcarrier_spacing_hz);
    r.read("num_subcarriers", s.num_subcarriers);
    r.read("num_symbols", s.num_symbols);
    r.read("cp_duration_s", s.cp_duration_s);
    r.read("cp_taps", s.cp_taps);
    r.read("tx_power_w", s.tx_power_w);
    r.read("tx_gain_db", s.tx_gain_db);
    r.read("rx_gain_db", s.rx_gain_db);
    r.read("noise_figure_db", s.noise_figure_db);
    r.read("temperature_k", s.temperature_k);
    r.read("modulation_order", s.modulation_order);
    r.read("rng_seed", s.rng_seed);
    r.finish();
}

Target read_target(Table& t, const std::string& name) {
    Reader r(t, name);
    Target target;
    if (!r.has("distance_m")) fail(name, t.line, "[[targets]] entry needs distance_m");
    r.read("distance_m", target.distance_m);
    r.read("velocity_mps", target.velocity_mps);
    r.read("rcs_m2", target.rcs_m2);
    r.finish();
    if (!(target.distance_m > 0)) fail(name, t.line, "distance_m must be > 0");
    if (!(target.rcs_m2 > 0)) fail(name, t.line, "rcs_m2 must be > 0");
    return target;
}

void read_detector(Table& t, DetectorConfig& d, const std::string& name) {
    Reader r(t, name);
    r.read("rho", d.rho);
    r.read("d_max_m", d.d_max_m);
    r.read("n_lag", d.n_lag);
    r.read("p_max", d.p_max);
    r.read("q_max", d.q_max);
    r.read("discard_first_symbol", d.discard_first_symbol);
    r.read("gate_taps", d.gate_taps);
    std::string removal;
    const int line = r.has("removal") ? t.entries.at("removal").line : t.line;
    r.read("removal", removal);
    if (removal == "divide") d.removal = RemovalMode::Divide;
    else if (removal == "conjugate") d.removal = RemovalMode::Conjugate;
    else if (!removal.empty()) fail(name, line, "removal must be \"divide\" or \"conjugate\"");
    r.finish();
}

void read_experiment(Table& t, ExperimentConfig& e, const std::string& name) {
    Reader r(t, name);
    if (r.has("kind")) {
        const int line = t.entries.at("kind").line;
        std::string kind;
        r.read("kind", kind);
        const auto it = kind_names().find(kind);
        if (it == kind_names().end()) fail(name, line, "unknown experiment kind '" + kind + "'");
        e.kind = it->second;
    }
    if (r.has("doppler_mode")) {
        const int line = t.entries.at("doppler_mode").line;
        std::string mode;
        r.read("doppler_mode", mode);
        if (mode == "per_symbol") e.doppler = DopplerMode::PerSymbol;
        else if (mode == "per_sample") e.doppler = DopplerMode::PerSample;
        else fail(name, line, "doppler_mode must be \"per_symbol\" or \"per_sample\"");
    }
    r.read("trials", e.trials);
    r.read("output_dir", e.output_dir);
    r.read("noise", e.noise);
    r.read("dump_frame", e.dump_frame);
    r.read("distances_m", e.distances_m);
    r.read("distance_min_m", e.distance_min_m);
    r.read("distance_max_m", e.distance_max_m);
    r.read("distance_points", e.distance_points);
    r.read("cp_durations_s", e.cp_durations_s);
    r.read("cp_min_s", e.cp_min_s);
    r.read("cp_max_s", e.cp_max_s);
    r.read("cp_points", e.cp_points);
    r.read("symbol_counts", e.symbol_counts);
    r.read("rcs_m2", e.rcs_m2);
    r.read("n_tau", e.n_tau);
    r.read("max_trials", e.max_trials);
    r.read("target_std_error_db", e.target_std_error_db);
    r.read("max_error_db", e.max_error_db);
    r.finish();
    if (e.trials < 1) fail(name, t.line, "trials must be >= 1");
    if (e.distance_points < 1 || e.cp_points < 1) fail(name, t.line, "sweep point counts must be >= 1");
    if (e.symbol_counts.empty()) fail(name, t.line, "symbol_counts must not be empty");
    if (e.max_trials < e.trials) e.max_trials = e.trials;
}

std::vector<double> linspace(double lo, double hi, int points) {
    std::vector<double> v(points);
    for (int i = 0; i < points; ++i) v[i] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    return v;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    for (const auto& [name, k] : kind_names()) {
        if (k == kind) return name;
    }
    return "unknown";
}

ExperimentKind experiment_from_string(const std::string& name) {
    const auto it = kind_names().find(name);
    if (it == kind_names().end()) throw ConfigError("unknown experiment kind '" + name + "'");
    return it->second;
}

std::vector<double> ExperimentConfig::sweep_distances() const {
    return distances_m.empty() ? linspace(distance_min_m, distance_max_m, distance_points) : distances_m;
}

std::vector<double> ExperimentConfig::sweep_cp_durations() const {
    return cp_durations_s.empty() ? linspace(cp_min_s, cp_max_s, cp_points) : cp_durations_s;
}

Scenario parse_config(const std::string& text, const std::string& name) {
    Scenario sc;
    sc.name = name;
    std::set<std::string> seen;
    for (Table& t : tokenize(text, name)) {
        if (t.section == "[[targets]]") {
            sc.targets.push_back(read_target(t, name));
            continue;
        }
        if (!seen.insert(t.section).second) fail(name, t.line, "section [" + t.section + "] appears twice");
        if (t.section == "system") read_system(t, sc.system, name);
        else if (t.section == "detector") read_detector(t, sc.detector, name);
        else if (t.section == "experiment") read_experiment(t, sc.experiment, name);
        else fail(name, t.line, "unknown section '" + t.section + "'");
    }
    try {
        const DerivedParams dp = derive(sc.system);
        sc.detector.resolved(dp);
    } catch (const IsacError& e) {
        throw ConfigError(name + ": " + e.what());
    }
    return sc;
}

Scenario load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string describe(const Scenario& sc, const DerivedParams& dp) {
    const auto& s = sc.system;
    const auto det = sc.detector.resolved(dp);
    char buf[1024];
    std::snprintf(buf, sizeof buf,
                  "seed=%llu fc_hz=%.9g df_hz=%.9g n=%d m=%d cp_taps=%d cp_s=%.9g b_hz=%.9g pt_w=%.9g gt_db=%.9g "
                  "gr_db=%.9g nf_db=%.9g temp_k=%.9g order=%d rho=%.9g d_max_m=%.9g n_lag=%d p_max=%d q_max=%d "
                  "discard_first=%d gate_taps=%d removal=%s targets=%zu",
                  static_cast<unsigned long long>(s.rng_seed), s.carrier_frequency_hz, s.subcarrier_spacing_hz,
                  dp.num_subcarriers, dp.num_symbols, dp.cp_taps, dp.cp_duration_s, dp.bandwidth_hz, s.tx_power_w,
                  s.tx_gain_db, s.rx_gain_db, s.noise_figure_db, s.temperature_k, s.modulation_order, det.rho,
                  det.d_max_m, det.n_lag, det.p_max, det.q_max, det.discard_first_symbol ? 1 : 0, det.gate_taps ? 1 : 0,
                  det.removal == RemovalMode::Divide ? "divide" : "conjugate", sc.targets.size());
    std::string out = buf;
    for (const auto& t : sc.targets) {
        std::snprintf(buf, sizeof buf, " target=%.9g/%.9g/%.9g", t.distance_m, t.velocity_mps, t.rcs_m2);
        out += buf;
    }
    return out;
}

}  // namespace ofdmisac
