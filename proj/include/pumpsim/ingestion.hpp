#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pumpsim/hydraulics.hpp"
#include "pumpsim/telemetry.hpp"

namespace pumpsim {

// ---------------------------------------------------------------------------
// SCADA-style frame preprocessing and inflow inference. The frame carries only
// what a plant historian provides: timestamps, pump on/off states, and level.
// ---------------------------------------------------------------------------

struct ScadaRow {
    double t = 0.0;             ///< s
    std::vector<int> states;    ///< per-pump 0/1
    double level_m = 0.0;
};

struct GapAuditEntry {
    double t_before = 0.0;
    double t_after = 0.0;
    double gap_s = 0.0;
};

struct ScadaFrame {
    std::vector<ScadaRow> rows;
    std::vector<GapAuditEntry> gap_audit; ///< gaps over 10 s, flagged, never imputed
};

/// Apply a constant level offset to rows inside [t_a, t_b], drop exact
/// duplicate rows, and flag gaps over 10 s. Idempotent for offset == 0 windows
/// and repeat-safe otherwise only on already-corrected data, so the caller
/// applies it once; duplicate removal and auditing are idempotent.
inline ScadaFrame preprocess_levels(const ScadaFrame& in, double t_a, double t_b, double offset) {
    if (!(t_a < t_b)) throw std::invalid_argument("preprocess_levels: t_a must be < t_b");
    ScadaFrame out;
    out.rows.reserve(in.rows.size());
    for (const auto& row : in.rows) {
        ScadaRow r = row;
        if (r.t >= t_a && r.t <= t_b) r.level_m += offset;
        if (!out.rows.empty() && out.rows.back().t == r.t &&
            out.rows.back().level_m == r.level_m && out.rows.back().states == r.states)
            continue; // exact duplicate
        out.rows.push_back(std::move(r));
    }
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
        const double gap = out.rows[i].t - out.rows[i - 1].t;
        if (gap > 10.0)
            out.gap_audit.push_back(GapAuditEntry{out.rows[i - 1].t, out.rows[i].t, gap});
    }
    return out;
}

struct InferredInflow {
    std::vector<double> t;
    std::vector<double> q_m3h;
};

/// Reconstruct the inflow from level motion and pump states:
///   Q_in(t_i) = A * dL_i/dt_i (converted to m3/h) + sum_j z_j * Q_j
/// with centered differences in the interior and one-sided differences at the
/// boundaries. Q_j is the nominal-speed operating point of an active pump.
/// Rows with |dt| < 0.1 s are discarded as duplicates, inferred values over
/// 0.4 m3/s as spikes, and negative inflows are removed. A nonzero
/// transient_guard_s additionally drops rows within that window of any pump
/// state transition, where the nominal-speed assumption for Q_j is wrong
/// because the drive is still ramping.
inline InferredInflow infer_inflow(const ScadaFrame& frame, double area_m2,
                                   const PumpCurve& pump, const SystemCurve& system,
                                   double transient_guard_s = 0.0) {
    const auto& rows = frame.rows;
    if (rows.size() < 3) throw std::invalid_argument("infer_inflow: needs at least 3 rows");

    const auto op = solve_operating_point(pump, system, 1.0);
    const double q_pump = op ? op->q : 0.0;

    std::vector<double> transitions;
    if (transient_guard_s > 0.0)
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].states != rows[i - 1].states) transitions.push_back(rows[i].t);
    auto near_transition = [&](double t) {
        const auto it =
            std::lower_bound(transitions.begin(), transitions.end(), t - transient_guard_s);
        return it != transitions.end() && *it <= t + transient_guard_s;
    };

    InferredInflow out;
    out.t.reserve(rows.size());
    out.q_m3h.reserve(rows.size());
    const double spike_m3h = 0.4 * 3600.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!transitions.empty() && near_transition(rows[i].t)) continue;
        double dl = 0.0, dt = 0.0;
        if (i == 0) {
            dl = rows[1].level_m - rows[0].level_m;
            dt = rows[1].t - rows[0].t;
        } else if (i + 1 == rows.size()) {
            dl = rows[i].level_m - rows[i - 1].level_m;
            dt = rows[i].t - rows[i - 1].t;
        } else {
            dl = rows[i + 1].level_m - rows[i - 1].level_m;
            dt = rows[i + 1].t - rows[i - 1].t;
        }
        if (std::fabs(dt) < 0.1) continue;
        double q = area_m2 * (dl / dt) * 3600.0;
        for (int z : rows[i].states)
            if (z == 1) q += q_pump;
        if (std::fabs(q) > spike_m3h) continue;
        if (q < 0.0) continue;
        out.t.push_back(rows[i].t);
        out.q_m3h.push_back(q);
    }
    return out;
}

/// Mean absolute error normalized by the reference range.
inline double nmae(const std::vector<double>& sim, const std::vector<double>& ref) {
    if (sim.size() != ref.size() || sim.empty())
        throw std::invalid_argument("nmae: series must be nonempty and equal-length");
    const auto [lo, hi] = std::minmax_element(ref.begin(), ref.end());
    const double range = *hi - *lo;
    if (range <= 0.0) throw std::invalid_argument("nmae: constant reference series");
    double mae = 0.0;
    for (std::size_t i = 0; i < sim.size(); ++i) mae += std::fabs(sim[i] - ref[i]);
    return mae / static_cast<double>(sim.size()) / range;
}

/// Reduce simulator telemetry to what a SCADA historian records.
inline ScadaFrame frame_from_timeseries(const TimeSeries& ts) {
    ScadaFrame frame;
    frame.rows.reserve(ts.records.size());
    for (const auto& r : ts.records) {
        ScadaRow row;
        row.t = static_cast<double>(r.t);
        row.level_m = r.level_m;
        row.states.reserve(r.pumps.size());
        for (const auto& p : r.pumps) row.states.push_back(p.state);
        frame.rows.push_back(std::move(row));
    }
    return frame;
}

}  // namespace pumpsim
