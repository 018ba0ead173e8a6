#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "pumpsim/rng.hpp"

namespace pumpsim {

/// Empirical distribution of observed inflow values (m3/h).
class EmpiricalCdf {
public:
    EmpiricalCdf() = default;
    explicit EmpiricalCdf(std::vector<double> sorted) : samples_(std::move(sorted)) {}

    const std::vector<double>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }

    /// F(q) = fraction of samples <= q.
    double cdf(double q) const {
        const auto it = std::upper_bound(samples_.begin(), samples_.end(), q);
        return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
    }

    /// Generalized inverse: smallest order statistic q_(j) with j/m > u.
    double quantile(double u) const {
        const auto m = samples_.size();
        auto idx = static_cast<std::size_t>(std::floor(u * static_cast<double>(m)));
        if (idx >= m) idx = m - 1;
        return samples_[idx];
    }

private:
    std::vector<double> samples_;
};

inline EmpiricalCdf build_ecdf(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("build_ecdf: empty sample set");
    for (double v : samples) {
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("build_ecdf: samples must be finite and >= 0");
    }
    std::sort(samples.begin(), samples.end());
    return EmpiricalCdf(std::move(samples));
}

/// Inverse-transform draw from the ECDF; the result is always a member of the
/// sample set.
inline double sample_baseline(const EmpiricalCdf& ecdf, double u) {
    return ecdf.quantile(u);
}

/// Homogeneous Poisson surge train: events of fixed magnitude and duration.
struct PeakProcess {
    double rate = 0.0;      ///< events per second
    double magnitude = 0.0; ///< added flow during an event (m3/h)
    double duration = 0.0;  ///< event length (s), > 0
};

/// Event intervals [start, start+duration] on [0, horizon); inter-arrival
/// times are i.i.d. exponential with mean 1/rate. Overlapping events stack.
inline std::vector<std::pair<double, double>> generate_peak_train(const PeakProcess& p,
                                                                  double horizon, Rng& rng) {
    std::vector<std::pair<double, double>> events;
    if (p.rate <= 0.0) return events;
    double t = rng.exponential(p.rate);
    while (t < horizon) {
        events.emplace_back(t, t + p.duration);
        t += rng.exponential(p.rate);
    }
    return events;
}

struct SinusoidSpec {
    double mean = 0.0;        ///< m3/h
    double amplitude = 0.0;   ///< m3/h, <= mean
    double period = 86400.0;  ///< s
    double noise_sigma = 0.0; ///< absolute noise std dev (m3/h)
};

struct InflowSpec {
    std::variant<EmpiricalCdf, SinusoidSpec> base;
    std::optional<PeakProcess> peaks;
    std::int64_t horizon = 0; ///< series length (s)
    std::uint64_t seed = 0;
};

inline void validate(const InflowSpec& spec) {
    if (spec.horizon < 1) throw std::invalid_argument("inflow.horizon must be >= 1");
    if (const auto* s = std::get_if<SinusoidSpec>(&spec.base)) {
        if (s->amplitude > s->mean)
            throw std::invalid_argument("inflow.amplitude must be <= inflow.mean");
        if (s->period <= 0.0) throw std::invalid_argument("inflow.period must be > 0");
        if (s->noise_sigma < 0.0) throw std::invalid_argument("inflow.noise_sigma must be >= 0");
    }
    if (spec.peaks) {
        if (spec.peaks->rate < 0.0) throw std::invalid_argument("inflow.peaks.rate must be >= 0");
        if (spec.peaks->magnitude < 0.0)
            throw std::invalid_argument("inflow.peaks.magnitude must be >= 0");
        if (spec.peaks->duration <= 0.0)
            throw std::invalid_argument("inflow.peaks.duration must be > 0");
    }
}

/// Per-second inflow series. Baseline, peak arrivals, and noise each use
/// their own stream derived from the spec seed, so toggling one component does
/// not perturb the draws of the others. Values are clamped at zero.
inline std::vector<double> generate_inflow(const InflowSpec& spec) {
    validate(spec);
    const auto n = static_cast<std::size_t>(spec.horizon);
    std::vector<double> series(n, 0.0);

    Rng base_rng = derive_stream(spec.seed, "inflow.baseline");
    Rng noise_rng = derive_stream(spec.seed, "inflow.noise");

    std::vector<std::pair<double, double>> events;
    if (spec.peaks) {
        Rng arrivals = derive_stream(spec.seed, "inflow.arrivals");
        events = generate_peak_train(*spec.peaks, static_cast<double>(spec.horizon), arrivals);
    }

    constexpr double two_pi = 2.0 * 3.14159265358979323846;
    std::size_t next_event = 0;
    std::vector<std::pair<double, double>> active;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i);
        double v;
        if (const auto* ecdf = std::get_if<EmpiricalCdf>(&spec.base)) {
            v = sample_baseline(*ecdf, base_rng.uniform());
        } else {
            const auto& s = std::get<SinusoidSpec>(spec.base);
            v = s.mean + s.amplitude * std::sin(two_pi * t / s.period);
            if (s.noise_sigma > 0.0) v += noise_rng.normal(0.0, s.noise_sigma);
        }
        if (spec.peaks) {
            while (next_event < events.size() && events[next_event].first <= t) {
                active.push_back(events[next_event]);
                ++next_event;
            }
            std::erase_if(active, [&](const auto& e) { return e.second < t; });
            v += spec.peaks->magnitude * static_cast<double>(active.size());
        }
        series[i] = std::max(0.0, v);
    }
    return series;
}

}  // namespace pumpsim
