#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pumpsim/inflow.hpp"
#include "pumpsim/sample_data.hpp"
#include "pumpsim/station.hpp"
#include "pumpsim/telemetry.hpp"

namespace pumpsim {

enum class ScenarioKind { station, degradation_fixture };

/// Everything a batch run needs: station parameters, inflow model, fault
/// profiles, seed, and horizon.
struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::station;
    StationConfig station;
    InflowSpec inflow;
    std::string inflow_source = "builtin:scada"; ///< ecdf sample source, echoed on dump
    std::vector<FaultProfile> faults;
    std::uint64_t seed = 1;
    std::int64_t horizon_s = 172800;
    bool noiseless = false;
    int fixture_m = 50; ///< sample count for the degradation-fixture kind
};

inline void validate(const ScenarioConfig& c) {
    if (c.horizon_s < 1) throw std::invalid_argument("scenario.horizon_s must be >= 1");
    if (c.kind == ScenarioKind::station) {
        validate(c.station);
        validate(c.inflow);
        for (const auto& f : c.faults) validate(f);
    }
}

// ---------------------------------------------------------------------------
// Flat dotted-key config format:  `station.area_m2 = 8.0`, lists as
// comma-separated values, comments with '#'. Unknown keys are errors.
// ---------------------------------------------------------------------------

namespace cfgdetail {

inline std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

class KeyValues {
public:
    void insert(std::string key, std::string value, std::size_t line_no) {
        if (map_.count(key))
            throw std::invalid_argument("duplicate config key '" + key + "' on line " +
                                        std::to_string(line_no));
        map_[std::move(key)] = std::move(value);
    }

    std::optional<std::string> take(const std::string& key) {
        auto it = map_.find(key);
        if (it == map_.end()) return std::nullopt;
        consumed_.insert(*it);
        std::string v = it->second;
        map_.erase(it);
        return v;
    }

    double take_double(const std::string& key, double fallback) {
        const auto v = take(key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            const double d = std::stod(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
            return d;
        } catch (...) {
            throw std::invalid_argument("config key '" + key + "': not a number: " + *v);
        }
    }

    std::int64_t take_int(const std::string& key, std::int64_t fallback) {
        const auto v = take(key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            const long long d = std::stoll(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
            return d;
        } catch (...) {
            throw std::invalid_argument("config key '" + key + "': not an integer: " + *v);
        }
    }

    bool take_bool(const std::string& key, bool fallback) {
        const auto v = take(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1") return true;
        if (*v == "false" || *v == "0") return false;
        throw std::invalid_argument("config key '" + key + "': not a bool: " + *v);
    }

    std::optional<std::vector<double>> take_list(const std::string& key) {
        const auto v = take(key);
        if (!v) return std::nullopt;
        std::vector<double> out;
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            out.push_back(std::stod(item));
        }
        return out;
    }

    void expect_empty() const {
        if (map_.empty()) return;
        throw std::invalid_argument("unknown config key '" + map_.begin()->first + "'");
    }

    bool contains_prefix(const std::string& prefix) const {
        for (const auto& [k, v] : map_)
            if (k.rfind(prefix, 0) == 0) return true;
        return false;
    }

private:
    std::map<std::string, std::string> map_;
    std::map<std::string, std::string> consumed_;
};

inline KeyValues parse_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        kv.insert(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no);
    }
    return kv;
}

inline std::vector<double> load_sample_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("inflow.samples: cannot open " + path);
    std::vector<double> out;
    std::string line;
    while (std::getline(f, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        out.push_back(std::stod(line));
    }
    return out;
}

}  // namespace cfgdetail

/// Parse a scenario config. Relative sample-file paths resolve against
/// base_dir (normally the config file's directory).
inline ScenarioConfig parse_scenario_config(std::istream& in, const std::string& base_dir = ".") {
    using namespace cfgdetail;
    KeyValues kv = parse_key_values(in);
    ScenarioConfig c;

    const auto kind = kv.take("scenario.kind").value_or("station");
    if (kind == "station")
        c.kind = ScenarioKind::station;
    else if (kind == "degradation_fixture")
        c.kind = ScenarioKind::degradation_fixture;
    else
        throw std::invalid_argument("scenario.kind: unknown value " + kind);

    c.seed = static_cast<std::uint64_t>(kv.take_int("scenario.seed", 1));
    c.horizon_s = kv.take_int("scenario.horizon_s", 172800);
    c.noiseless = kv.take_bool("scenario.noiseless", false);
    c.fixture_m = static_cast<int>(kv.take_int("fixture.m", 50));

    auto& s = c.station;
    s.area_m2 = kv.take_double("station.area_m2", s.area_m2);
    s.n_pumps = static_cast<int>(kv.take_int("station.n_pumps", s.n_pumps));
    if (const auto l = kv.take_list("station.start_levels")) s.start_levels = *l;
    if (const auto l = kv.take_list("station.stop_levels")) s.stop_levels = *l;
    s.pump.c0 = kv.take_double("station.pump.c0", s.pump.c0);
    s.pump.c1 = kv.take_double("station.pump.c1", s.pump.c1);
    s.pump.c2 = kv.take_double("station.pump.c2", s.pump.c2);
    s.pump.f_nominal = kv.take_double("station.pump.f_nominal_hz", s.pump.f_nominal);
    s.system.h_static = kv.take_double("station.system.h_static_m", s.system.h_static);
    s.system.k = kv.take_double("station.system.k", s.system.k);
    s.f_min_hz = kv.take_double("station.f_min_hz", s.f_min_hz);
    s.f_max_hz = kv.take_double("station.f_max_hz", s.f_max_hz);
    s.t_ramp_s = kv.take_double("station.t_ramp_s", s.t_ramp_s);
    s.t_dwell_s = kv.take_double("station.t_dwell_s", s.t_dwell_s);
    s.nominal_speed_rpm = kv.take_double("station.nominal_speed_rpm", s.nominal_speed_rpm);
    s.dt_s = kv.take_double("station.dt_s", s.dt_s);
    s.initial_level_m = kv.take_double("station.initial_level_m", s.initial_level_m);
    s.noise.level = kv.take_double("station.noise.level", s.noise.level);
    s.noise.flow = kv.take_double("station.noise.flow", s.noise.flow);
    s.noise.head = kv.take_double("station.noise.head", s.noise.head);
    s.noise.power = kv.take_double("station.noise.power", s.noise.power);
    s.electrical.voltage = kv.take_double("station.electrical.voltage_v", s.electrical.voltage);
    s.electrical.i_nominal = kv.take_double("station.electrical.i_nominal_a", s.electrical.i_nominal);
    s.electrical.cos_phi = kv.take_double("station.electrical.cos_phi", s.electrical.cos_phi);
    s.electrical.inrush_cap = kv.take_double("station.electrical.inrush_cap", s.electrical.inrush_cap);
    s.electrical.rho = kv.take_double("station.electrical.rho", s.electrical.rho);
    s.electrical.g = kv.take_double("station.electrical.g", s.electrical.g);
    s.electrical.eta = kv.take_double("station.electrical.eta", s.electrical.eta);

    const auto inflow_kind = kv.take("inflow.kind").value_or("ecdf");
    if (inflow_kind == "ecdf") {
        c.inflow_source = kv.take("inflow.samples").value_or("builtin:scada");
        std::vector<double> samples;
        if (c.inflow_source == "builtin:scada")
            samples = scada_inflow_samples();
        else if (c.inflow_source == "builtin:light")
            samples = light_inflow_samples();
        else {
            std::string path = c.inflow_source;
            if (!path.empty() && path.front() != '/') path = base_dir + "/" + path;
            samples = cfgdetail::load_sample_file(path);
        }
        c.inflow.base = build_ecdf(std::move(samples));
    } else if (inflow_kind == "sinusoid") {
        SinusoidSpec sin;
        sin.mean = kv.take_double("inflow.mean_m3h", 60.0);
        sin.amplitude = kv.take_double("inflow.amplitude_m3h", 20.0);
        sin.period = kv.take_double("inflow.period_s", 86400.0);
        sin.noise_sigma = kv.take_double("inflow.noise_sigma_m3h", 5.0);
        c.inflow.base = sin;
    } else {
        throw std::invalid_argument("inflow.kind: unknown value " + inflow_kind);
    }
    if (kv.contains_prefix("inflow.peaks.")) {
        PeakProcess p;
        p.rate = kv.take_double("inflow.peaks.rate_per_s", 0.0005);
        p.magnitude = kv.take_double("inflow.peaks.magnitude_m3h", 30.0);
        p.duration = kv.take_double("inflow.peaks.duration_s", 900.0);
        c.inflow.peaks = p;
    }
    c.inflow.horizon = c.horizon_s;
    c.inflow.seed = c.seed;

    for (int i = 1;; ++i) {
        const std::string prefix = "fault." + std::to_string(i) + ".";
        const auto kindv = kv.take(prefix + "kind");
        if (!kindv) break;
        if (*kindv == "blockage") {
            BlockageFault b;
            b.pump_id = static_cast<int>(kv.take_int(prefix + "pump", 1));
            b.s_max = kv.take_double(prefix + "severity", 0.4);
            b.tau0 = kv.take_double(prefix + "tau0_s", 0.0);
            b.tau1 = kv.take_double(prefix + "tau1_s", 0.0);
            c.faults.emplace_back(b);
        } else if (*kindv == "clogging") {
            CloggingFault cl;
            cl.dk_rel = kv.take_double(prefix + "dk_rel", 1.0);
            cl.dh_static = kv.take_double(prefix + "dh_static_m", 0.5);
            cl.tau0 = kv.take_double(prefix + "tau0_s", 0.0);
            cl.tau1 = kv.take_double(prefix + "tau1_s", 0.0);
            c.faults.emplace_back(cl);
        } else {
            throw std::invalid_argument(prefix + "kind: unknown value " + *kindv);
        }
    }

    kv.expect_empty();
    if (c.noiseless) c.station.noise = NoiseSpec{0.0, 0.0, 0.0, 0.0};
    validate(c);
    return c;
}

inline ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    std::string dir = ".";
    if (const auto slash = path.find_last_of('/'); slash != std::string::npos)
        dir = path.substr(0, slash);
    return parse_scenario_config(f, dir);
}

/// Effective-config echo; re-parsing the dump reproduces the configuration.
inline std::string dump_scenario_config(const ScenarioConfig& c) {
    std::ostringstream o;
    o << "scenario.kind = "
      << (c.kind == ScenarioKind::station ? "station" : "degradation_fixture") << '\n';
    o << "scenario.seed = " << c.seed << '\n';
    o << "scenario.horizon_s = " << c.horizon_s << '\n';
    o << "scenario.noiseless = " << (c.noiseless ? "true" : "false") << '\n';
    if (c.kind == ScenarioKind::degradation_fixture) o << "fixture.m = " << c.fixture_m << '\n';
    const auto& s = c.station;
    o << "station.area_m2 = " << format_double(s.area_m2) << '\n';
    o << "station.n_pumps = " << s.n_pumps << '\n';
    auto list = [&](const std::vector<double>& v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out += (i ? ", " : "") + format_double(v[i]);
        return out;
    };
    o << "station.start_levels = " << list(s.start_levels) << '\n';
    o << "station.stop_levels = " << list(s.stop_levels) << '\n';
    o << "station.pump.c0 = " << format_double(s.pump.c0) << '\n';
    o << "station.pump.c1 = " << format_double(s.pump.c1) << '\n';
    o << "station.pump.c2 = " << format_double(s.pump.c2) << '\n';
    o << "station.pump.f_nominal_hz = " << format_double(s.pump.f_nominal) << '\n';
    o << "station.system.h_static_m = " << format_double(s.system.h_static) << '\n';
    o << "station.system.k = " << format_double(s.system.k) << '\n';
    o << "station.f_min_hz = " << format_double(s.f_min_hz) << '\n';
    o << "station.f_max_hz = " << format_double(s.f_max_hz) << '\n';
    o << "station.t_ramp_s = " << format_double(s.t_ramp_s) << '\n';
    o << "station.t_dwell_s = " << format_double(s.t_dwell_s) << '\n';
    o << "station.nominal_speed_rpm = " << format_double(s.nominal_speed_rpm) << '\n';
    o << "station.dt_s = " << format_double(s.dt_s) << '\n';
    o << "station.initial_level_m = " << format_double(s.initial_level_m) << '\n';
    o << "station.noise.level = " << format_double(s.noise.level) << '\n';
    o << "station.noise.flow = " << format_double(s.noise.flow) << '\n';
    o << "station.noise.head = " << format_double(s.noise.head) << '\n';
    o << "station.noise.power = " << format_double(s.noise.power) << '\n';
    o << "station.electrical.voltage_v = " << format_double(s.electrical.voltage) << '\n';
    o << "station.electrical.i_nominal_a = " << format_double(s.electrical.i_nominal) << '\n';
    o << "station.electrical.cos_phi = " << format_double(s.electrical.cos_phi) << '\n';
    o << "station.electrical.inrush_cap = " << format_double(s.electrical.inrush_cap) << '\n';
    o << "station.electrical.rho = " << format_double(s.electrical.rho) << '\n';
    o << "station.electrical.g = " << format_double(s.electrical.g) << '\n';
    o << "station.electrical.eta = " << format_double(s.electrical.eta) << '\n';
    if (std::holds_alternative<EmpiricalCdf>(c.inflow.base)) {
        o << "inflow.kind = ecdf\n";
        o << "inflow.samples = " << c.inflow_source << '\n';
    } else {
        const auto& sin = std::get<SinusoidSpec>(c.inflow.base);
        o << "inflow.kind = sinusoid\n";
        o << "inflow.mean_m3h = " << format_double(sin.mean) << '\n';
        o << "inflow.amplitude_m3h = " << format_double(sin.amplitude) << '\n';
        o << "inflow.period_s = " << format_double(sin.period) << '\n';
        o << "inflow.noise_sigma_m3h = " << format_double(sin.noise_sigma) << '\n';
    }
    if (c.inflow.peaks) {
        o << "inflow.peaks.rate_per_s = " << format_double(c.inflow.peaks->rate) << '\n';
        o << "inflow.peaks.magnitude_m3h = " << format_double(c.inflow.peaks->magnitude) << '\n';
        o << "inflow.peaks.duration_s = " << format_double(c.inflow.peaks->duration) << '\n';
    }
    int idx = 0;
    for (const auto& f : c.faults) {
        ++idx;
        const std::string p = "fault." + std::to_string(idx) + ".";
        if (const auto* b = std::get_if<BlockageFault>(&f)) {
            o << p << "kind = blockage\n";
            o << p << "pump = " << b->pump_id << '\n';
            o << p << "severity = " << format_double(b->s_max) << '\n';
            o << p << "tau0_s = " << format_double(b->tau0) << '\n';
            o << p << "tau1_s = " << format_double(b->tau1) << '\n';
        } else {
            const auto& cl = std::get<CloggingFault>(f);
            o << p << "kind = clogging\n";
            o << p << "dk_rel = " << format_double(cl.dk_rel) << '\n';
            o << p << "dh_static_m = " << format_double(cl.dh_static) << '\n';
            o << p << "tau0_s = " << format_double(cl.tau0) << '\n';
            o << p << "tau1_s = " << format_double(cl.tau1) << '\n';
        }
    }
    return o.str();
}

/// Run a station scenario end to end: inflow generation plus simulation.
inline TimeSeries run_scenario(const ScenarioConfig& c) {
    validate(c);
    const auto inflow = generate_inflow(c.inflow);
    return simulate_scenario(c.station, inflow, c.faults, c.seed);
}

}  // namespace pumpsim
