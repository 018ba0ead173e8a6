#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pumpsim/faults.hpp"
#include "pumpsim/hydraulics.hpp"

namespace pumpsim {

struct PumpSample {
    int state = 0;        ///< 1 while the pump is not off
    double freq_hz = 0.0;
    double q_m3h = 0.0;
    double head_m = 0.0;
    double p_hyd_w = 0.0;  ///< rho*g*Q*H
    double p_elec_w = 0.0; ///< three-phase electrical input
};

struct Record {
    std::int64_t t = 0;     ///< s since simulation start
    double level_m = 0.0;
    double q_in_m3h = 0.0;
    std::vector<PumpSample> pumps;
    GroundTruth label;
};

struct TimeSeries {
    int n_pumps = 0;
    std::vector<Record> records;
};

inline std::string label_to_string(const GroundTruth& g) {
    switch (g.kind) {
        case FaultKind::pump: return "pump_fault:" + std::to_string(g.pump_id);
        case FaultKind::system: return "system_fault";
        default: return "normal";
    }
}

inline GroundTruth label_from_string(std::string_view s) {
    if (s == "normal") return {};
    if (s == "system_fault") return GroundTruth{FaultKind::system, 0};
    if (s.rfind("pump_fault:", 0) == 0) {
        const int id = std::stoi(std::string(s.substr(11)));
        return GroundTruth{FaultKind::pump, id};
    }
    throw std::runtime_error("unknown label: " + std::string(s));
}

// ---------------------------------------------------------------------------
// CSV serialization. Header and float formatting are fixed: floats use the
// shortest representation that round-trips, so parse(serialize(ts)) == ts.
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string timeseries_header(int n_pumps) {
    std::string h = "t_s,level_m,q_in_m3h,";
    for (int i = 1; i <= n_pumps; ++i) {
        const std::string p = "p" + std::to_string(i) + "_";
        h += p + "state," + p + "freq_hz," + p + "q_m3h," + p + "head_m," + p + "p_hyd_w," +
             p + "p_elec_w,";
    }
    h += "label";
    return h;
}

inline void serialize_timeseries(const TimeSeries& ts, std::ostream& out) {
    out << timeseries_header(ts.n_pumps) << '\n';
    for (const auto& r : ts.records) {
        out << r.t << ',' << format_double(r.level_m) << ',' << format_double(r.q_in_m3h) << ',';
        for (const auto& p : r.pumps) {
            out << p.state << ',' << format_double(p.freq_hz) << ',' << format_double(p.q_m3h)
                << ',' << format_double(p.head_m) << ',' << format_double(p.p_hyd_w) << ','
                << format_double(p.p_elec_w) << ',';
        }
        out << label_to_string(r.label) << '\n';
    }
}

inline void serialize_timeseries(const TimeSeries& ts, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    std::ostringstream buf;
    serialize_timeseries(ts, buf);
    f << buf.str();
    if (!f) throw std::runtime_error("write failed: " + path);
}

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline double parse_cell(std::string_view cell, std::size_t line_no) {
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
        throw std::runtime_error("malformed numeric cell on line " + std::to_string(line_no));
    if (!std::isfinite(v))
        throw std::runtime_error("non-finite value on line " + std::to_string(line_no));
    return v;
}

}  // namespace detail

inline TimeSeries parse_timeseries(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("malformed header: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    // Infer pump count from the header, then demand an exact match.
    int n_pumps = 0;
    {
        const auto cols = detail::split_csv(line);
        if (cols.size() < 4 || (cols.size() - 4) % 6 != 0)
            throw std::runtime_error("malformed header: unexpected column count");
        n_pumps = static_cast<int>((cols.size() - 4) / 6);
    }
    if (line != timeseries_header(n_pumps))
        throw std::runtime_error("malformed header: does not match the fixed schema");

    TimeSeries ts;
    ts.n_pumps = n_pumps;
    const std::size_t expect = 4 + 6 * static_cast<std::size_t>(n_pumps);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cols = detail::split_csv(line);
        if (cols.size() != expect)
            throw std::runtime_error("ragged row on line " + std::to_string(line_no) + ": got " +
                                     std::to_string(cols.size()) + " columns, expected " +
                                     std::to_string(expect));
        Record r;
        r.t = static_cast<std::int64_t>(detail::parse_cell(cols[0], line_no));
        r.level_m = detail::parse_cell(cols[1], line_no);
        r.q_in_m3h = detail::parse_cell(cols[2], line_no);
        r.pumps.resize(static_cast<std::size_t>(n_pumps));
        for (int p = 0; p < n_pumps; ++p) {
            const std::size_t base = 3 + 6 * static_cast<std::size_t>(p);
            auto& ps = r.pumps[static_cast<std::size_t>(p)];
            ps.state = static_cast<int>(detail::parse_cell(cols[base], line_no));
            ps.freq_hz = detail::parse_cell(cols[base + 1], line_no);
            ps.q_m3h = detail::parse_cell(cols[base + 2], line_no);
            ps.head_m = detail::parse_cell(cols[base + 3], line_no);
            ps.p_hyd_w = detail::parse_cell(cols[base + 4], line_no);
            ps.p_elec_w = detail::parse_cell(cols[base + 5], line_no);
        }
        r.label = label_from_string(cols.back());
        ts.records.push_back(std::move(r));
    }
    return ts;
}

inline TimeSeries parse_timeseries(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return parse_timeseries(f);
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

struct DailyPumpStats {
    int day = 0;
    int pump_id = 0;      ///< 1-based
    int starts = 0;       ///< off -> on transitions in the day
    double runtime_h = 0.0;
    double energy_kwh = 0.0;
};

/// Per civil day (floor(t/86400) from simulation start) and per pump.
inline std::vector<DailyPumpStats> aggregate_daily(const TimeSeries& ts) {
    std::vector<DailyPumpStats> out;
    if (ts.records.empty()) return out;
    const int n_days = static_cast<int>(ts.records.back().t / 86400) + 1;
    out.resize(static_cast<std::size_t>(n_days * ts.n_pumps));
    for (int d = 0; d < n_days; ++d)
        for (int p = 0; p < ts.n_pumps; ++p)
            out[static_cast<std::size_t>(d * ts.n_pumps + p)] = DailyPumpStats{d, p + 1, 0, 0.0, 0.0};

    std::vector<int> prev_state(static_cast<std::size_t>(ts.n_pumps), 0);
    for (const auto& r : ts.records) {
        const int d = static_cast<int>(r.t / 86400);
        for (int p = 0; p < ts.n_pumps; ++p) {
            auto& s = out[static_cast<std::size_t>(d * ts.n_pumps + p)];
            const auto& ps = r.pumps[static_cast<std::size_t>(p)];
            if (ps.state == 1 && prev_state[static_cast<std::size_t>(p)] == 0) ++s.starts;
            if (ps.state == 1) s.runtime_h += 1.0 / 3600.0;
            s.energy_kwh += ps.p_elec_w / 3.6e6;
            prev_state[static_cast<std::size_t>(p)] = ps.state;
        }
    }
    return out;
}

/// Energy per clock hour for one pump (kWh), indexed by floor(t/3600).
inline std::vector<double> hourly_energy(const TimeSeries& ts, int pump_id) {
    std::vector<double> out;
    if (ts.records.empty()) return out;
    out.assign(static_cast<std::size_t>(ts.records.back().t / 3600) + 1, 0.0);
    for (const auto& r : ts.records)
        out[static_cast<std::size_t>(r.t / 3600)] +=
            r.pumps[static_cast<std::size_t>(pump_id - 1)].p_elec_w / 3.6e6;
    return out;
}

// ---------------------------------------------------------------------------
// Operating cycles
// ---------------------------------------------------------------------------

struct CycleSample {
    double t = 0.0;
    double q = 0.0;      ///< raw flow (m3/h)
    double h = 0.0;      ///< raw head (m)
    double f = 0.0;      ///< drive frequency (Hz)
    double q_star = 0.0; ///< affinity-normalized flow
    double h_star = 0.0; ///< affinity-normalized head
};

struct Cycle {
    int pump_id = 0;
    double start_t = 0.0;
    double end_t = 0.0;
    std::vector<CycleSample> samples; ///< near-nominal samples only
};

/// One cycle per contiguous on-interval of the pump; samples are restricted to
/// |f - f_nominal| <= f_band and affinity-normalized. Cycles with fewer than
/// min_samples near-nominal samples are dropped.
inline std::vector<Cycle> segment_cycles(const TimeSeries& ts, int pump_id, double f_nominal,
                                         double f_band = 1.0, std::size_t min_samples = 25) {
    if (!(f_band > 0.0)) throw std::invalid_argument("segment_cycles: f_band must be > 0");
    std::vector<Cycle> cycles;
    Cycle cur;
    bool open = false;
    auto close = [&]() {
        if (open && cur.samples.size() >= min_samples) cycles.push_back(cur);
        open = false;
    };
    for (const auto& r : ts.records) {
        const auto& ps = r.pumps[static_cast<std::size_t>(pump_id - 1)];
        if (ps.state == 1) {
            if (!open) {
                cur = Cycle{pump_id, static_cast<double>(r.t), static_cast<double>(r.t), {}};
                open = true;
            }
            cur.end_t = static_cast<double>(r.t);
            if (std::fabs(ps.freq_hz - f_nominal) <= f_band && ps.q_m3h > 0.0) {
                const auto np = affinity_normalize(ps.q_m3h, ps.head_m, ps.freq_hz, f_nominal);
                if (np)
                    cur.samples.push_back(CycleSample{static_cast<double>(r.t), ps.q_m3h,
                                                      ps.head_m, ps.freq_hz, np->q_star,
                                                      np->h_star});
            }
        } else {
            close();
        }
    }
    close();
    return cycles;
}

}  // namespace pumpsim
