#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pumpsim/faults.hpp"
#include "pumpsim/hydraulics.hpp"
#include "pumpsim/power.hpp"
#include "pumpsim/rng.hpp"
#include "pumpsim/telemetry.hpp"

namespace pumpsim {

struct NoiseSpec {
    double level = 0.01; ///< relative sigma on the sensed sump level
    double flow = 0.01;
    double head = 0.01;
    double power = 0.01;

    bool silent() const { return level <= 0.0 && flow <= 0.0 && head <= 0.0 && power <= 0.0; }
};

struct StationConfig {
    double area_m2 = 8.0;
    int n_pumps = 3;
    std::vector<double> start_levels = {1.6, 1.8, 2.0}; ///< S_i, lead first
    std::vector<double> stop_levels = {0.5, 0.8, 1.1};  ///< E_i
    PumpCurve pump{45.0, -5e-4, -2.5e-4, 50.0};
    SystemCurve system{2.0, 3e-4};
    double f_min_hz = 0.0;
    double f_max_hz = 50.0;
    double t_ramp_s = 10.0;
    double t_dwell_s = 0.0;
    double nominal_speed_rpm = 1460.0; ///< metadata only; control math is in Hz
    NoiseSpec noise;
    ElectricalSpec electrical;
    double dt_s = 1.0;
    double initial_level_m = -1.0; ///< < 0 means (S_1 + E_1) / 2
    double solver_tol_m = 1e-8;
};

inline void validate(const StationConfig& c) {
    if (!(c.area_m2 > 0.0)) throw std::invalid_argument("station.area_m2 must be > 0");
    if (c.n_pumps < 1) throw std::invalid_argument("station.n_pumps must be >= 1");
    if (c.start_levels.size() != static_cast<std::size_t>(c.n_pumps))
        throw std::invalid_argument("station.start_levels must have n_pumps entries");
    if (c.stop_levels.size() != static_cast<std::size_t>(c.n_pumps))
        throw std::invalid_argument("station.stop_levels must have n_pumps entries");
    for (int i = 0; i < c.n_pumps; ++i) {
        const auto si = c.start_levels[static_cast<std::size_t>(i)];
        const auto ei = c.stop_levels[static_cast<std::size_t>(i)];
        if (!(ei < si))
            throw std::invalid_argument("station.stop_levels[" + std::to_string(i + 1) + "] (" +
                                        std::to_string(ei) + ") must be < station.start_levels[" +
                                        std::to_string(i + 1) + "] (" + std::to_string(si) + ")");
        if (i > 0 && !(c.start_levels[static_cast<std::size_t>(i)] >
                       c.start_levels[static_cast<std::size_t>(i - 1)]))
            throw std::invalid_argument("station.start_levels must be strictly increasing");
    }
    if (!(c.f_min_hz < c.f_max_hz))
        throw std::invalid_argument("station.f_min_hz must be < station.f_max_hz");
    if (!(c.f_max_hz > 0.0)) throw std::invalid_argument("station.f_max_hz must be > 0");
    if (!(c.t_ramp_s > 0.0)) throw std::invalid_argument("station.t_ramp_s must be > 0");
    if (c.t_dwell_s < 0.0) throw std::invalid_argument("station.t_dwell_s must be >= 0");
    if (!(c.dt_s > 0.0)) throw std::invalid_argument("station.dt_s must be > 0");
    if (c.noise.level < 0.0 || c.noise.flow < 0.0 || c.noise.head < 0.0 || c.noise.power < 0.0)
        throw std::invalid_argument("station.noise sigmas must be >= 0");
    validate(c.pump, "station.pump");
    validate(c.system, "station.system");
    validate(c.electrical, "station.electrical");
}

enum class PumpMode { off, ramp_up, running, ramp_down, dwell };

struct PumpState {
    int id = 0; ///< 1-based
    PumpMode mode = PumpMode::off;
    double phase_elapsed = 0.0;      ///< s within the current phase
    double cumulative_runtime = 0.0; ///< s with mode != off
    int start_count = 0;             ///< off -> ramp_up transitions
    std::int64_t last_on_command = -1;

    bool commanded_on() const { return mode == PumpMode::ramp_up || mode == PumpMode::running; }
    bool on() const { return mode != PumpMode::off; }
};

/// Duty-cycle policy: one start when the level reaches the next start
/// threshold, one stop when it falls to the current stop threshold; at most
/// one change per call.
inline int supervisory_transition(double level, int n_running, const StationConfig& c) {
    if (n_running < c.n_pumps && level >= c.start_levels[static_cast<std::size_t>(n_running)])
        return n_running + 1;
    if (n_running > 0 && level <= c.stop_levels[static_cast<std::size_t>(n_running - 1)])
        return n_running - 1;
    return n_running;
}

/// Round-robin selection: first idle pump at or after the cursor in cyclic
/// order; the cursor advances past the selection. Ids and cursor are 1-based.
inline std::optional<int> select_lead(int& rotation_cursor, const std::vector<bool>& idle) {
    const int n = static_cast<int>(idle.size());
    for (int off = 0; off < n; ++off) {
        const int id = (rotation_cursor - 1 + off) % n + 1;
        if (idle[static_cast<std::size_t>(id - 1)]) {
            rotation_cursor = id % n + 1;
            return id;
        }
    }
    return std::nullopt;
}

/// VFD frequency command for the current phase. Piecewise linear with slope
/// +-r = (f_max - f_min)/t_ramp inside the ramps.
inline double ramp_frequency(const PumpState& s, const StationConfig& c) {
    const double r = (c.f_max_hz - c.f_min_hz) / c.t_ramp_s;
    switch (s.mode) {
        case PumpMode::ramp_up: return c.f_min_hz + r * s.phase_elapsed;
        case PumpMode::running: return c.f_max_hz;
        case PumpMode::ramp_down: return c.f_max_hz - r * s.phase_elapsed;
        case PumpMode::dwell: return c.f_min_hz;
        default: return 0.0;
    }
}

/// Discrete-time simulation of the sump, supervisory logic, and pump drives.
class Station {
public:
    Station(StationConfig config, std::vector<FaultProfile> faults, std::uint64_t seed)
        : cfg_(std::move(config)),
          faults_(std::move(faults)),
          level_rng_(derive_stream(seed, "sensor.level")),
          flow_rng_(derive_stream(seed, "sensor.flow")),
          head_rng_(derive_stream(seed, "sensor.head")),
          power_rng_(derive_stream(seed, "sensor.power")) {
        validate(cfg_);
        for (const auto& f : faults_) validate(f);
        pumps_.resize(static_cast<std::size_t>(cfg_.n_pumps));
        for (int i = 0; i < cfg_.n_pumps; ++i) pumps_[static_cast<std::size_t>(i)].id = i + 1;
        level_ = cfg_.initial_level_m >= 0.0 ? cfg_.initial_level_m
                                             : 0.5 * (cfg_.start_levels[0] + cfg_.stop_levels[0]);
    }

    const std::vector<PumpState>& pumps() const { return pumps_; }
    double level() const { return level_; }
    std::uint64_t sensor_draws() const {
        return level_rng_.draw_count() + flow_rng_.draw_count() + head_rng_.draw_count() +
               power_rng_.draw_count();
    }

    /// Advance one step of dt seconds with the given inflow; appends the
    /// sensed record to the series.
    void step(double q_in, TimeSeries& out) {
        const double t = static_cast<double>(t_);
        const double sensed_level = apply_relative_noise(level_, cfg_.noise.level, level_rng_);

        applySupervisory(sensed_level);

        const auto eff = effective_parameters(t, cfg_.system, faults_, cfg_.n_pumps);

        Record rec;
        rec.t = t_;
        rec.q_in_m3h = q_in;
        rec.label = ground_truth_at(t, faults_);
        rec.pumps.resize(static_cast<std::size_t>(cfg_.n_pumps));

        double q_out_total = 0.0;
        for (int i = 0; i < cfg_.n_pumps; ++i) {
            auto& st = pumps_[static_cast<std::size_t>(i)];
            auto& ps = rec.pumps[static_cast<std::size_t>(i)];
            const double f = ramp_frequency(st, cfg_);
            ps.state = st.on() ? 1 : 0;
            ps.freq_hz = f;
            double q = 0.0;
            double h = 0.0;
            if (f > 0.0) {
                const double n_cmd = f / cfg_.pump.f_nominal;
                const double n_eff = eff.speed_factor[static_cast<std::size_t>(i)] * n_cmd;
                if (const auto op = solve_operating_point(cfg_.pump, eff.system, n_eff,
                                                          cfg_.solver_tol_m)) {
                    q = op->q;
                    h = op->h;
                } else {
                    // below static head: deadheading, no flow
                    h = pump_head(cfg_.pump, 0.0, n_eff);
                }
            }
            q_out_total += q;
            const double n_cmd = f / cfg_.pump.f_nominal;
            const double p_hyd = hydraulic_power(q, h, cfg_.electrical).output_w;
            const double p_elec = electrical_input_power(n_cmd, cfg_.electrical);
            ps.q_m3h = apply_relative_noise(q, cfg_.noise.flow, flow_rng_);
            ps.head_m = apply_relative_noise(h, cfg_.noise.head, head_rng_);
            ps.p_hyd_w = apply_relative_noise(p_hyd, cfg_.noise.power, power_rng_);
            ps.p_elec_w = apply_relative_noise(p_elec, cfg_.noise.power, power_rng_);
            if (st.on()) st.cumulative_runtime += cfg_.dt_s;
        }

        level_ += cfg_.dt_s * (q_in - q_out_total) / 3600.0 / cfg_.area_m2;
        level_ = std::max(0.0, level_);
        rec.level_m = sensed_level;

        out.records.push_back(std::move(rec));
        advancePhases();
        ++t_;
    }

private:
    void applySupervisory(double sensed_level) {
        int n_on = 0;
        for (const auto& p : pumps_)
            if (p.commanded_on()) ++n_on;
        const int target = supervisory_transition(sensed_level, n_on, cfg_);
        if (target > n_on)
            startOne();
        else if (target < n_on)
            stopOne();
    }

    void startOne() {
        // A pump still winding down is reversed in place; the frequency trace
        // stays continuous because the timer mirrors the current position.
        PumpState* winding = nullptr;
        for (auto& p : pumps_)
            if (p.mode == PumpMode::ramp_down || p.mode == PumpMode::dwell)
                if (!winding || p.phase_elapsed < winding->phase_elapsed) winding = &p;
        if (winding) {
            winding->phase_elapsed = winding->mode == PumpMode::dwell
                                         ? cfg_.t_ramp_s
                                         : cfg_.t_ramp_s - winding->phase_elapsed;
            winding->mode = PumpMode::ramp_up;
            winding->last_on_command = command_seq_++;
            return;
        }
        std::vector<bool> idle(static_cast<std::size_t>(cfg_.n_pumps), false);
        for (const auto& p : pumps_)
            if (p.mode == PumpMode::off) idle[static_cast<std::size_t>(p.id - 1)] = true;
        if (const auto id = select_lead(rotation_cursor_, idle)) {
            auto& p = pumps_[static_cast<std::size_t>(*id - 1)];
            p.mode = PumpMode::ramp_up;
            p.phase_elapsed = 0.0;
            p.start_count += 1;
            p.last_on_command = command_seq_++;
        }
    }

    void stopOne() {
        // Most recently commanded-on pump stops first; a stop during ramp-up
        // toggles the ramp direction with the timer mirrored.
        PumpState* victim = nullptr;
        for (auto& p : pumps_)
            if (p.commanded_on())
                if (!victim || p.last_on_command > victim->last_on_command) victim = &p;
        if (!victim) return;
        victim->phase_elapsed = victim->mode == PumpMode::ramp_up
                                    ? cfg_.t_ramp_s - victim->phase_elapsed
                                    : 0.0;
        victim->mode = PumpMode::ramp_down;
    }

    void advancePhases() {
        for (auto& p : pumps_) {
            if (p.mode == PumpMode::off) continue;
            p.phase_elapsed += cfg_.dt_s;
            if (p.mode == PumpMode::ramp_up && p.phase_elapsed >= cfg_.t_ramp_s) {
                p.mode = PumpMode::running;
                p.phase_elapsed = 0.0;
            } else if (p.mode == PumpMode::ramp_down && p.phase_elapsed >= cfg_.t_ramp_s) {
                p.mode = cfg_.t_dwell_s > 0.0 ? PumpMode::dwell : PumpMode::off;
                p.phase_elapsed = 0.0;
            } else if (p.mode == PumpMode::dwell && p.phase_elapsed >= cfg_.t_dwell_s) {
                p.mode = PumpMode::off;
                p.phase_elapsed = 0.0;
            }
        }
    }

    StationConfig cfg_;
    std::vector<FaultProfile> faults_;
    std::vector<PumpState> pumps_;
    double level_ = 0.0;
    std::int64_t t_ = 0;
    int rotation_cursor_ = 1;
    std::int64_t command_seq_ = 0;
    Rng level_rng_, flow_rng_, head_rng_, power_rng_;
};

/// Full labeled run over a prepared inflow series. Deterministic for a fixed
/// (config, faults, seed).
inline TimeSeries simulate_scenario(const StationConfig& config,
                                    const std::vector<double>& inflow,
                                    const std::vector<FaultProfile>& faults,
                                    std::uint64_t seed) {
    Station station(config, faults, seed);
    TimeSeries ts;
    ts.n_pumps = config.n_pumps;
    ts.records.reserve(inflow.size());
    for (const double q_in : inflow) station.step(q_in, ts);
    return ts;
}

}  // namespace pumpsim
