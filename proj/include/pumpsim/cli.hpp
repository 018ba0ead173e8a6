#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pumpsim/ingestion.hpp"
#include "pumpsim/pipeline.hpp"
#include "pumpsim/power.hpp"
#include "pumpsim/scenario.hpp"

namespace pumpsim {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace clidetail {

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 2;
inline constexpr int exit_io = 3;

inline std::optional<std::uint64_t> env_seed() {
    if (const char* v = std::getenv("PUMPSIM_SEED")) {
        try {
            return std::stoull(v);
        } catch (...) {
            throw std::invalid_argument("PUMPSIM_SEED: not an unsigned integer");
        }
    }
    return std::nullopt;
}

inline void apply_seed_override(ScenarioConfig& cfg, std::optional<std::uint64_t> flag_seed) {
    std::optional<std::uint64_t> seed = flag_seed ? flag_seed : env_seed();
    if (seed) {
        cfg.seed = *seed;
        cfg.inflow.seed = *seed;
    }
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << text;
    if (!f) throw IoError("write failed: " + path);
}

/// Pack the 50-step drift fixture into the standard telemetry schema so the
/// diagnose/validate tooling can consume it.
inline TimeSeries fixture_as_timeseries(const ScenarioConfig& cfg) {
    auto spec = degradation_fixture_spec();
    spec.m = cfg.fixture_m;
    const auto samples = gen_drift_fixture(spec, cfg.seed);
    TimeSeries ts;
    ts.n_pumps = 1;
    for (const auto& s : samples) {
        Record r;
        r.t = static_cast<std::int64_t>(s.t);
        r.level_m = 1.0;
        r.q_in_m3h = 0.0;
        PumpSample p;
        p.state = 1;
        p.freq_hz = s.f;
        p.q_m3h = s.q;
        p.head_m = s.h;
        p.p_hyd_w = hydraulic_power(std::max(0.0, s.q), std::max(0.0, s.h), ElectricalSpec{}).output_w;
        p.p_elec_w = electrical_input_power(s.f / spec.f_nominal, ElectricalSpec{});
        r.pumps.push_back(p);
        r.label = GroundTruth{FaultKind::pump, 1};
        ts.records.push_back(std::move(r));
    }
    return ts;
}

}  // namespace clidetail

struct SimulateOptions {
    std::optional<std::uint64_t> seed;
    bool noiseless = false;
};

/// `simulate`: scenario config in, labeled telemetry CSV out, run summary on
/// stdout.
inline int cmd_simulate(const std::string& config_path, const std::string& out_path,
                        const SimulateOptions& opts = {}, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
    using namespace clidetail;
    try {
        if (!std::filesystem::exists(config_path)) throw IoError("no such config: " + config_path);
        ScenarioConfig cfg = load_scenario_config(config_path);
        apply_seed_override(cfg, opts.seed);
        if (opts.noiseless) {
            cfg.noiseless = true;
            cfg.station.noise = NoiseSpec{0.0, 0.0, 0.0, 0.0};
        }
        validate(cfg);

        TimeSeries ts = cfg.kind == ScenarioKind::degradation_fixture ? fixture_as_timeseries(cfg)
                                                                      : run_scenario(cfg);
        serialize_timeseries(ts, out_path);

        const auto daily = aggregate_daily(ts);
        std::vector<int> starts(static_cast<std::size_t>(ts.n_pumps), 0);
        std::vector<double> runtime(static_cast<std::size_t>(ts.n_pumps), 0.0);
        std::vector<double> energy(static_cast<std::size_t>(ts.n_pumps), 0.0);
        for (const auto& d : daily) {
            starts[static_cast<std::size_t>(d.pump_id - 1)] += d.starts;
            runtime[static_cast<std::size_t>(d.pump_id - 1)] += d.runtime_h;
            energy[static_cast<std::size_t>(d.pump_id - 1)] += d.energy_kwh;
        }
        out << "wrote " << out_path << " (" << ts.records.size() << " rows, " << ts.n_pumps
            << " pumps)\n";
        for (int p = 0; p < ts.n_pumps; ++p) {
            out << "pump " << (p + 1) << ": starts=" << starts[static_cast<std::size_t>(p)]
                << " runtime_h=" << format_double(runtime[static_cast<std::size_t>(p)])
                << " energy_kwh=" << format_double(energy[static_cast<std::size_t>(p)]) << '\n';
        }
        return exit_ok;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << '\n';
        return exit_invalid;
    }
}

namespace clidetail {

inline void append_verdict_rows(std::ostringstream& o, const std::vector<CycleVerdict>& verdicts,
                                const std::string& method) {
    for (const auto& v : verdicts) {
        o << format_double(v.start_t) << ',' << format_double(v.end_t) << ',' << method << ',';
        if (v.has_index)
            o << format_double(v.i_w) << ',' << format_double(v.ci.lower) << ','
              << format_double(v.ci.upper) << ',';
        else
            o << ",,,";
        if (v.has_ftest)
            o << format_double(v.f_stat) << ',' << format_double(v.p_value) << ',';
        else
            o << ",,";
        o << to_string(v.label) << '\n';
    }
}

inline void append_metric_rows(std::ostringstream& o, const ConfusionMatrix& cm,
                               const std::string& method) {
    const char* names[3] = {"normal", "pump_fault", "system_fault"};
    const DiagLabel labels[3] = {DiagLabel::normal, DiagLabel::pump_fault,
                                 DiagLabel::system_fault};
    for (int i = 0; i < 3; ++i) {
        const auto m = cm.metrics(labels[i]);
        o << method << ',' << names[i] << ',' << format_double(m.precision) << ','
          << format_double(m.recall) << ',' << format_double(m.f1) << '\n';
    }
    const auto macro = cm.macro();
    o << method << ",macro," << format_double(macro.precision) << ','
      << format_double(macro.recall) << ',' << format_double(macro.f1) << '\n';
}

}  // namespace clidetail

/// `diagnose`: telemetry CSV in, cycle verdicts out (and metrics when the
/// input carries ground-truth labels).
inline int cmd_diagnose(const std::string& timeseries_path, const std::string& method_name,
                        const std::string& out_dir, const DiagnosisConfig& cfg = {},
                        std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    using namespace clidetail;
    try {
        DiagnosisMethod method;
        if (method_name == "ftest")
            method = DiagnosisMethod::ftest;
        else if (method_name == "tangent")
            method = DiagnosisMethod::tangent;
        else if (method_name == "both")
            method = DiagnosisMethod::both;
        else
            throw std::invalid_argument("method must be one of ftest|tangent|both");

        if (!std::filesystem::exists(timeseries_path))
            throw IoError("no such file: " + timeseries_path);
        std::filesystem::create_directories(out_dir);

        TimeSeries ts;
        try {
            ts = parse_timeseries(timeseries_path);
        } catch (const std::exception& e) {
            err << "malformed input: " << e.what() << '\n';
            return exit_invalid;
        }

        DiagnosisResult res;
        try {
            res = diagnose_timeseries(ts, method, cfg);
        } catch (const std::exception& e) {
            // degenerate input (e.g. nothing near nominal speed): empty verdicts
            err << "warning: " << e.what() << "; writing empty verdicts\n";
        }

        std::ostringstream verdicts;
        verdicts << "segment_start_s,segment_end_s,method,i_w,ci_lo,ci_hi,f_stat,p_value,label\n";
        append_verdict_rows(verdicts, res.ftest, "ftest");
        append_verdict_rows(verdicts, res.tangent, "tangent");
        write_text(out_dir + "/verdicts.csv", verdicts.str());

        if (res.ftest_confusion || res.tangent_confusion) {
            std::ostringstream metrics;
            metrics << "method,class,precision,recall,f1\n";
            if (res.ftest_confusion) append_metric_rows(metrics, *res.ftest_confusion, "ftest");
            if (res.tangent_confusion)
                append_metric_rows(metrics, *res.tangent_confusion, "tangent");
            write_text(out_dir + "/metrics.csv", metrics.str());
            out << "wrote " << out_dir << "/verdicts.csv and metrics.csv (" << res.cycles.size()
                << " cycles)\n";
        } else {
            out << "wrote " << out_dir
                << "/verdicts.csv; metrics skipped (no ground-truth labels)\n";
        }
        return exit_ok;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid;
    }
}

/// `validate`: reference vs simulated telemetry. Emits level NMAE plus
/// per-pump daily start-count and runtime deltas; start deltas of 3 or more
/// and runtime deltas over 0.5 h are flagged.
inline int cmd_validate(const std::string& reference_path, const std::string& simulated_path,
                        const std::string& out_path, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
    using namespace clidetail;
    try {
        for (const auto& p : {reference_path, simulated_path})
            if (!std::filesystem::exists(p)) throw IoError("no such file: " + p);
        TimeSeries ref, sim;
        try {
            ref = parse_timeseries(reference_path);
            sim = parse_timeseries(simulated_path);
        } catch (const std::exception& e) {
            err << "malformed input: " << e.what() << '\n';
            return exit_invalid;
        }
        if (ref.records.empty() || sim.records.empty())
            throw std::invalid_argument("validate: empty series");
        const auto r0 = ref.records.front().t, r1 = ref.records.back().t;
        const auto s0 = sim.records.front().t, s1 = sim.records.back().t;
        const auto lo = std::max(r0, s0), hi = std::min(r1, s1);
        if (lo > hi) throw std::invalid_argument("validate: disjoint time ranges");

        std::vector<double> ref_level, sim_level;
        for (const auto& r : ref.records)
            if (r.t >= lo && r.t <= hi) ref_level.push_back(r.level_m);
        for (const auto& r : sim.records)
            if (r.t >= lo && r.t <= hi) sim_level.push_back(r.level_m);
        if (ref_level.size() != sim_level.size())
            throw std::invalid_argument("validate: series do not align on the common range");
        const double level_nmae = nmae(sim_level, ref_level);

        const auto ref_daily = aggregate_daily(ref);
        const auto sim_daily = aggregate_daily(sim);
        std::ostringstream o;
        o << "metric,pump,day,reference,simulated,delta,flag\n";
        o << "level_nmae,,," << ",," << format_double(level_nmae) << ",\n";
        const int n_pumps = std::min(ref.n_pumps, sim.n_pumps);
        for (const auto& rd : ref_daily) {
            if (rd.pump_id > n_pumps) continue;
            const DailyPumpStats* sd = nullptr;
            for (const auto& cand : sim_daily)
                if (cand.day == rd.day && cand.pump_id == rd.pump_id) sd = &cand;
            if (!sd) continue;
            const int dstarts = sd->starts - rd.starts;
            o << "daily_starts," << rd.pump_id << ',' << rd.day << ',' << rd.starts << ','
              << sd->starts << ',' << dstarts << ',' << (std::abs(dstarts) >= 3 ? 1 : 0) << '\n';
            const double druntime = sd->runtime_h - rd.runtime_h;
            o << "daily_runtime_h," << rd.pump_id << ',' << rd.day << ','
              << format_double(rd.runtime_h) << ',' << format_double(sd->runtime_h) << ','
              << format_double(druntime) << ',' << (std::fabs(druntime) > 0.5 ? 1 : 0) << '\n';
        }
        write_text(out_path, o.str());
        out << "wrote " << out_path << " (level NMAE " << format_double(level_nmae) << ")\n";
        return exit_ok;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid;
    }
}

/// `gen-inflow`: inflow series of a scenario config as `t_s,q_in_m3h`.
inline int cmd_gen_inflow(const std::string& config_path, const std::string& out_path,
                          std::optional<std::uint64_t> seed = std::nullopt,
                          std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    using namespace clidetail;
    try {
        if (!std::filesystem::exists(config_path)) throw IoError("no such config: " + config_path);
        ScenarioConfig cfg = load_scenario_config(config_path);
        apply_seed_override(cfg, seed);
        const auto series = generate_inflow(cfg.inflow);
        std::ostringstream o;
        o << "t_s,q_in_m3h\n";
        for (std::size_t i = 0; i < series.size(); ++i)
            o << i << ',' << format_double(series[i]) << '\n';
        write_text(out_path, o.str());
        out << "wrote " << out_path << " (" << series.size() << " rows)\n";
        return exit_ok;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << '\n';
        return exit_invalid;
    }
}

}  // namespace pumpsim
