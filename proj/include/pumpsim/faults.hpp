#pragma once

#include <stdexcept>
#include <variant>
#include <vector>

#include "pumpsim/hydraulics.hpp"

namespace pumpsim {

/// Impeller blockage: derates the speed the water actually experiences on one
/// pump, ramping to severity s_max over [tau0, tau1] and staying there.
struct BlockageFault {
    int pump_id = 1;     ///< 1-based pump index
    double s_max = 0.0;  ///< severity in (0, 1); effective speed factor bottoms at 1 - s_max
    double tau0 = 0.0;   ///< ramp start (s)
    double tau1 = 0.0;   ///< ramp end (s)
};

/// Discharge-side degradation: friction coefficient scaled by (1 + dk_rel*r)
/// and static head offset by dh_static*r, with r the same ramp.
struct CloggingFault {
    double dk_rel = 0.0;    ///< relative friction increment at full development
    double dh_static = 0.0; ///< absolute static-head increase (m)
    double tau0 = 0.0;
    double tau1 = 0.0;
};

using FaultProfile = std::variant<BlockageFault, CloggingFault>;

inline void validate(const FaultProfile& f, const std::string& where = "fault") {
    if (const auto* b = std::get_if<BlockageFault>(&f)) {
        if (!(b->tau0 < b->tau1)) throw std::invalid_argument(where + ": tau0 must be < tau1");
        if (!(b->s_max > 0.0 && b->s_max < 1.0))
            throw std::invalid_argument(where + ": blockage severity must be in (0,1)");
        if (b->pump_id < 1) throw std::invalid_argument(where + ": pump id must be >= 1");
    } else {
        const auto& c = std::get<CloggingFault>(f);
        if (!(c.tau0 < c.tau1)) throw std::invalid_argument(where + ": tau0 must be < tau1");
        if (c.dk_rel < 0.0) throw std::invalid_argument(where + ": dk_rel must be >= 0");
        if (c.dh_static < 0.0) throw std::invalid_argument(where + ": dh_static must be >= 0");
    }
}

/// 0 before tau0, linear within [tau0, tau1], 1 after. Effects never self-heal.
inline double ramp_fraction(double t, double tau0, double tau1) {
    if (t < tau0) return 0.0;
    if (t >= tau1) return 1.0;
    return (t - tau0) / (tau1 - tau0);
}

/// beta(t) = 1 - s_max * ramp; applied as omega_effective = beta * omega_cmd.
inline double blockage_factor(double t, const BlockageFault& b) {
    return 1.0 - b.s_max * ramp_fraction(t, b.tau0, b.tau1);
}

struct EffectiveParameters {
    SystemCurve system;              ///< fault-adjusted system curve
    std::vector<double> speed_factor; ///< per-pump beta, index 0 = pump 1
};

/// Fault-adjusted system curve and per-pump speed derating at time t.
/// Multiple clogging profiles compose multiplicatively on k and additively on
/// the static head; blockage factors on the same pump compose multiplicatively.
inline EffectiveParameters effective_parameters(double t, const SystemCurve& base,
                                                const std::vector<FaultProfile>& profiles,
                                                int n_pumps) {
    EffectiveParameters out;
    out.system = base;
    out.speed_factor.assign(static_cast<std::size_t>(n_pumps), 1.0);
    for (const auto& f : profiles) {
        if (const auto* b = std::get_if<BlockageFault>(&f)) {
            if (b->pump_id >= 1 && b->pump_id <= n_pumps)
                out.speed_factor[static_cast<std::size_t>(b->pump_id - 1)] *= blockage_factor(t, *b);
        } else {
            const auto& c = std::get<CloggingFault>(f);
            const double r = ramp_fraction(t, c.tau0, c.tau1);
            out.system.k *= 1.0 + c.dk_rel * r;
            out.system.h_static += c.dh_static * r;
        }
    }
    return out;
}

enum class FaultKind { none, pump, system };

struct GroundTruth {
    FaultKind kind = FaultKind::none;
    int pump_id = 0; ///< valid when kind == pump
};

/// Ground-truth label at time t. A step is labeled while a fault window
/// [tau0, tau1] covers it; the developed (static) tail after tau1 is labeled
/// normal even though the physical effect persists. When windows overlap, the
/// most recently started one wins.
inline GroundTruth ground_truth_at(double t, const std::vector<FaultProfile>& profiles) {
    GroundTruth g;
    double best_tau0 = -1.0;
    for (const auto& f : profiles) {
        if (const auto* b = std::get_if<BlockageFault>(&f)) {
            if (t >= b->tau0 && t <= b->tau1 && b->tau0 > best_tau0) {
                g = GroundTruth{FaultKind::pump, b->pump_id};
                best_tau0 = b->tau0;
            }
        } else {
            const auto& c = std::get<CloggingFault>(f);
            if (t >= c.tau0 && t <= c.tau1 && c.tau0 > best_tau0) {
                g = GroundTruth{FaultKind::system, 0};
                best_tau0 = c.tau0;
            }
        }
    }
    return g;
}

}  // namespace pumpsim
