#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pumpsim/diagnostics.hpp"
#include "pumpsim/telemetry.hpp"

namespace pumpsim {

// ---------------------------------------------------------------------------
// Station-telemetry diagnosis. Only flow, head, and drive frequency are used;
// the nominal curves are fitted from the fault-free learning window, never
// taken from the simulator configuration.
// ---------------------------------------------------------------------------

struct DiagnosisConfig {
    int pump_id = 1;
    double f_band_hz = 1.0;          ///< near-nominal filter half-width
    std::size_t min_cycle_samples = 25;
    int samples_per_segment = 25;    ///< cycle samples aggregated per analysis point
    double learning_s = 21600.0;     ///< baseline-learning window
    double refresh_s = 21600.0;      ///< threshold refresh cadence
    double alpha_ci = 0.05;
    double alpha_test = 0.01;
    int bootstrap_replicates = 1000;
    int bootstrap_block_len = 0;     ///< 0 = max(5, ceil(n^(1/3)))
    std::size_t min_window_points = 6;
    std::uint64_t seed = 0x9d2c5680;
};

/// Modal plateau frequency across all pumps; drives at speed sit at the
/// nominal frequency far longer than anywhere on the ramps.
inline double infer_f_nominal(const TimeSeries& ts) {
    std::map<long, long> histogram;
    for (const auto& r : ts.records)
        for (const auto& p : r.pumps)
            if (p.freq_hz > 0.0) ++histogram[std::lround(p.freq_hz * 10.0)];
    if (histogram.empty()) throw std::runtime_error("infer_f_nominal: no running samples");
    long best_key = 0, best_count = -1;
    for (const auto& [key, count] : histogram)
        if (count > best_count) {
            best_key = key;
            best_count = count;
        }
    return static_cast<double>(best_key) / 10.0;
}

struct NominalCurves {
    PumpCurve pump;
    SystemCurve system;
};

/// Fit the nominal references from the learning window: the pump curve as a
/// quadratic over affinity-normalized samples (soft ramps supply the flow
/// spread), the system curve as h = b0 + b2 q^2 over the raw samples.
inline NominalCurves fit_nominal_curves(const TimeSeries& ts, int pump_id, double f_nominal,
                                        double learning_s) {
    std::vector<QhSample> star;   // normalized (q*, h*)
    double s_1 = 0.0, s_q2 = 0.0, s_q4 = 0.0, s_h = 0.0, s_q2h = 0.0;
    for (const auto& r : ts.records) {
        if (static_cast<double>(r.t) > learning_s) break;
        const auto& p = r.pumps[static_cast<std::size_t>(pump_id - 1)];
        if (p.state != 1 || p.q_m3h <= 0.0) continue;
        if (const auto np = affinity_normalize(p.q_m3h, p.head_m, p.freq_hz, f_nominal))
            star.push_back(QhSample{np->q_star, np->h_star});
        const double q2 = p.q_m3h * p.q_m3h;
        s_1 += 1.0;
        s_q2 += q2;
        s_q4 += q2 * q2;
        s_h += p.head_m;
        s_q2h += q2 * p.head_m;
    }
    if (star.size() < 8 || s_1 < 8.0)
        throw std::runtime_error("fit_nominal_curves: not enough fault-free samples");
    const auto pump_fit = fit_static_quadratic(star);
    if (!pump_fit) throw std::runtime_error("fit_nominal_curves: degenerate pump-curve design");
    const double det = s_1 * s_q4 - s_q2 * s_q2;
    if (std::fabs(det) < 1e-9 * s_1 * s_q4)
        throw std::runtime_error("fit_nominal_curves: degenerate system-curve design");
    const double b0 = (s_h * s_q4 - s_q2h * s_q2) / det;
    const double b2 = (s_1 * s_q2h - s_q2 * s_h) / det;
    NominalCurves nc;
    nc.pump = PumpCurve{pump_fit->theta[0], pump_fit->theta[1], pump_fit->theta[2], f_nominal};
    nc.system = SystemCurve{b0, b2};
    return nc;
}

/// One aggregated analysis point: the mean normalized operating point of a
/// block of consecutive near-nominal cycle samples.
struct SegmentPoint {
    double t = 0.0;
    double q_star = 0.0;
    double h_star = 0.0;
    int cycle = 0; ///< index into the cycle list
};

inline std::vector<SegmentPoint> aggregate_segments(const std::vector<Cycle>& cycles,
                                                    int samples_per_segment) {
    std::vector<SegmentPoint> points;
    for (std::size_t c = 0; c < cycles.size(); ++c) {
        const auto& cs = cycles[c].samples;
        const auto group = static_cast<std::size_t>(samples_per_segment);
        for (std::size_t off = 0; off + group <= cs.size(); off += group) {
            SegmentPoint p;
            p.cycle = static_cast<int>(c);
            for (std::size_t i = off; i < off + group; ++i) {
                p.t += cs[i].t;
                p.q_star += cs[i].q_star;
                p.h_star += cs[i].h_star;
            }
            const auto g = static_cast<double>(group);
            p.t /= g;
            p.q_star /= g;
            p.h_star /= g;
            points.push_back(p);
        }
    }
    return points;
}

struct CycleVerdict {
    int cycle = 0;
    double start_t = 0.0;
    double end_t = 0.0;
    DiagLabel label = DiagLabel::normal;
    // tangent channel
    double i_w = 0.5;
    ConfidenceInterval ci;
    bool has_index = false;
    // f-test channel
    double f_stat = 0.0;
    double p_value = 1.0;
    bool has_ftest = false;
};

/// Tangent-residual verdicts, one per cycle. Residuals are computed across the
/// cycle-segment points (the between-cycle gaps carry the drift signal); each
/// cycle is judged from the trailing window that ends with its own points.
/// Thresholds come from the learning window and refresh periodically from the
/// most recent normal data.
inline std::vector<CycleVerdict> diagnose_tangent(const std::vector<Cycle>& cycles,
                                                  const NominalCurves& nominal,
                                                  const DiagnosisConfig& cfg) {
    std::vector<CycleVerdict> verdicts;
    if (cycles.empty()) return verdicts;

    const auto points = aggregate_segments(cycles, cfg.samples_per_segment);
    std::vector<TqhSample> series;
    series.reserve(points.size());
    for (const auto& p : points) series.push_back(TqhSample{p.t, p.q_star, p.h_star});

    TangentResiduals res;
    if (series.size() >= 3) res = tangent_residuals(series, nominal.pump, nominal.system, 1);

    // residual index ranges per cycle (residuals carry their center's cycle)
    std::vector<std::pair<std::size_t, std::size_t>> span(cycles.size(),
                                                          {res.t.size(), res.t.size()});
    for (std::size_t j = 0; j < res.t.size(); ++j) {
        const auto c = static_cast<std::size_t>(points[j].cycle);
        if (span[c].first == res.t.size()) span[c].first = j;
        span[c].second = j + 1;
    }

    auto window_stats = [&](std::size_t cycle_idx)
        -> std::optional<std::pair<SegmentStats, std::pair<std::size_t, std::size_t>>> {
        if (span[cycle_idx].first == res.t.size()) return std::nullopt;
        std::size_t hi = span[cycle_idx].second;
        std::size_t lo = span[cycle_idx].first;
        std::size_t back = cycle_idx;
        while (hi - lo < cfg.min_window_points && back > 0) {
            --back;
            if (span[back].first != res.t.size()) lo = span[back].first;
        }
        if (hi - lo < 3) return std::nullopt;
        std::vector<double> pp(res.psi_p.begin() + static_cast<std::ptrdiff_t>(lo),
                               res.psi_p.begin() + static_cast<std::ptrdiff_t>(hi));
        std::vector<double> ps(res.psi_s.begin() + static_cast<std::ptrdiff_t>(lo),
                               res.psi_s.begin() + static_cast<std::ptrdiff_t>(hi));
        return std::make_pair(segment_stats(pp, ps), std::make_pair(lo, hi));
    };

    // learning phase: baseline stats from cycles inside the learning window
    std::vector<SegmentStats> baseline;
    for (std::size_t c = 0; c < cycles.size(); ++c) {
        if (cycles[c].end_t > cfg.learning_s) break;
        if (const auto ws = window_stats(c)) baseline.push_back(ws->first);
    }
    Thresholds th; // defaults if the baseline is too thin
    bool learned = false;
    if (baseline.size() >= 5) {
        th = learn_thresholds(baseline);
        learned = true;
    }

    std::vector<SegmentStats> recent_normal;
    double next_refresh = cfg.learning_s + cfg.refresh_s;
    for (std::size_t c = 0; c < cycles.size(); ++c) {
        CycleVerdict v;
        v.cycle = static_cast<int>(c);
        v.start_t = cycles[c].start_t;
        v.end_t = cycles[c].end_t;
        if (learned && cycles[c].start_t >= next_refresh) {
            if (recent_normal.size() >= 5) th = learn_thresholds(recent_normal);
            recent_normal.clear();
            next_refresh += cfg.refresh_s;
        }
        if (const auto ws = window_stats(c)) {
            const auto& [stats, range] = *ws;
            std::vector<double> pp(res.psi_p.begin() + static_cast<std::ptrdiff_t>(range.first),
                                   res.psi_p.begin() + static_cast<std::ptrdiff_t>(range.second));
            std::vector<double> ps(res.psi_s.begin() + static_cast<std::ptrdiff_t>(range.first),
                                   res.psi_s.begin() + static_cast<std::ptrdiff_t>(range.second));
            Rng rng = derive_stream(cfg.seed, "bootstrap." + std::to_string(c));
            v.ci = bootstrap_index_ci(pp, ps, cfg.bootstrap_block_len, cfg.bootstrap_replicates,
                                      cfg.alpha_ci, rng);
            v.i_w = stats.i_w;
            v.has_index = true;
            v.label = classify_segment(stats, v.ci, th);
            if (v.label == DiagLabel::normal && cycles[c].end_t > cfg.learning_s)
                recent_normal.push_back(stats);
        }
        verdicts.push_back(v);
    }
    return verdicts;
}

/// Nested-F-test verdicts, one per cycle, against the fitted nominal curves.
inline std::vector<CycleVerdict> diagnose_ftest(const std::vector<Cycle>& cycles,
                                                const NominalCurves& nominal,
                                                const DiagnosisConfig& cfg) {
    std::vector<CycleVerdict> verdicts;
    verdicts.reserve(cycles.size());
    for (std::size_t c = 0; c < cycles.size(); ++c) {
        CycleVerdict v;
        v.cycle = static_cast<int>(c);
        v.start_t = cycles[c].start_t;
        v.end_t = cycles[c].end_t;
        std::vector<TqhSample> samples;
        samples.reserve(cycles[c].samples.size());
        for (const auto& s : cycles[c].samples)
            samples.push_back(TqhSample{s.t, s.q_star, s.h_star});
        if (samples.size() >= 10) {
            const auto out = classify_by_ftest(samples, nominal.pump, nominal.system,
                                               cfg.alpha_test);
            v.label = out.label;
            if (out.f_pump >= out.f_system) {
                v.f_stat = out.f_pump;
                v.p_value = out.p_pump;
            } else {
                v.f_stat = out.f_system;
                v.p_value = out.p_system;
            }
            v.has_ftest = !out.degenerate;
        }
        verdicts.push_back(v);
    }
    return verdicts;
}

/// Ground-truth label per cycle from the recorded step labels. A cycle owns
/// the interval since the previous cycle of the same pump ended (the verdict
/// attributes any motion observed across that gap), so a fault window touching
/// (prev_end, end] marks the cycle. Ties go to the larger overlap.
inline std::vector<DiagLabel> cycle_truth_labels(const TimeSeries& ts,
                                                 const std::vector<Cycle>& cycles, int pump_id) {
    std::vector<DiagLabel> out;
    out.reserve(cycles.size());
    double prev_end = ts.records.empty() ? 0.0 : static_cast<double>(ts.records.front().t);
    for (const auto& c : cycles) {
        long pump_s = 0, system_s = 0;
        for (const auto& r : ts.records) {
            const auto t = static_cast<double>(r.t);
            if (t <= prev_end) continue;
            if (t > c.end_t) break;
            if (r.label.kind == FaultKind::pump && r.label.pump_id == pump_id) ++pump_s;
            if (r.label.kind == FaultKind::system) ++system_s;
        }
        if (pump_s == 0 && system_s == 0)
            out.push_back(DiagLabel::normal);
        else
            out.push_back(pump_s >= system_s ? DiagLabel::pump_fault : DiagLabel::system_fault);
        prev_end = c.end_t;
    }
    return out;
}

struct DiagnosisResult {
    double f_nominal = 0.0;
    std::vector<Cycle> cycles;
    std::vector<DiagLabel> truth;          ///< empty when the input is unlabeled
    std::vector<CycleVerdict> tangent;     ///< empty unless requested
    std::vector<CycleVerdict> ftest;       ///< empty unless requested
    std::optional<ConfusionMatrix> tangent_confusion;
    std::optional<ConfusionMatrix> ftest_confusion;
};

enum class DiagnosisMethod { ftest, tangent, both };

inline DiagnosisResult diagnose_timeseries(const TimeSeries& ts, DiagnosisMethod method,
                                           const DiagnosisConfig& cfg = {}) {
    DiagnosisResult result;
    result.f_nominal = infer_f_nominal(ts);
    result.cycles = segment_cycles(ts, cfg.pump_id, result.f_nominal, cfg.f_band_hz,
                                   cfg.min_cycle_samples);
    if (result.cycles.empty()) return result;
    const auto nominal = fit_nominal_curves(ts, cfg.pump_id, result.f_nominal, cfg.learning_s);

    bool labeled = false;
    for (const auto& r : ts.records)
        if (r.label.kind != FaultKind::none) {
            labeled = true;
            break;
        }
    if (labeled) result.truth = cycle_truth_labels(ts, result.cycles, cfg.pump_id);

    auto score = [&](const std::vector<CycleVerdict>& verdicts) {
        std::vector<DiagLabel> pred;
        pred.reserve(verdicts.size());
        for (const auto& v : verdicts) pred.push_back(v.label);
        return classification_metrics(pred, result.truth);
    };

    if (method != DiagnosisMethod::ftest) {
        result.tangent = diagnose_tangent(result.cycles, nominal, cfg);
        if (labeled) result.tangent_confusion = score(result.tangent);
    }
    if (method != DiagnosisMethod::tangent) {
        result.ftest = diagnose_ftest(result.cycles, nominal, cfg);
        if (labeled) result.ftest_confusion = score(result.ftest);
    }
    return result;
}

}  // namespace pumpsim
