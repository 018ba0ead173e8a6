#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pumpsim/rng.hpp"

namespace pumpsim {

struct ElectricalSpec {
    double voltage = 400.0;    ///< phase-to-phase (V)
    double i_nominal = 30.0;   ///< nominal current (A)
    double cos_phi = 0.9;      ///< power factor
    double inrush_cap = 5.0;   ///< current cap as a multiple of i_nominal
    double rho = 1000.0;       ///< fluid density (kg/m3)
    double g = 9.81;           ///< gravity (m/s2)
    double eta = 0.9;          ///< pump efficiency
};

inline void validate(const ElectricalSpec& e, const std::string& where = "electrical") {
    if (!(e.voltage > 0.0)) throw std::invalid_argument(where + ".voltage must be > 0");
    if (!(e.i_nominal > 0.0)) throw std::invalid_argument(where + ".i_nominal must be > 0");
    if (!(e.cos_phi > 0.0 && e.cos_phi <= 1.0))
        throw std::invalid_argument(where + ".cos_phi must be in (0,1]");
    if (!(e.inrush_cap > 0.0)) throw std::invalid_argument(where + ".inrush_cap must be > 0");
    if (!(e.rho > 0.0)) throw std::invalid_argument(where + ".rho must be > 0");
    if (!(e.g > 0.0)) throw std::invalid_argument(where + ".g must be > 0");
    if (!(e.eta > 0.0 && e.eta <= 1.0)) throw std::invalid_argument(where + ".eta must be in (0,1]");
}

struct HydraulicPower {
    double output_w = 0.0; ///< rho*g*Q*H, Q converted to m3/s
    double input_w = 0.0;  ///< output / eta
};

/// Hydraulic power at flow q (m3/h) and head h (m). Flow converts to m3/s
/// here; everything upstream stays in m3/h.
inline HydraulicPower hydraulic_power(double q, double h, const ElectricalSpec& spec) {
    const double p_out = spec.rho * spec.g * (q / 3600.0) * h;
    return HydraulicPower{p_out, p_out / spec.eta};
}

/// Three-phase electrical input power at speed ratio n: current scales with n
/// but is capped at inrush_cap * i_nominal.
inline double electrical_input_power(double n, const ElectricalSpec& spec) {
    const double i = std::min(spec.i_nominal * n, spec.inrush_cap * spec.i_nominal);
    return std::sqrt(3.0) * spec.voltage * i * spec.cos_phi;
}

/// Multiplicative sensor noise x*(1+eps), eps ~ N(0, sigma_rel^2), clamped at
/// zero. sigma_rel == 0 is an exact identity and consumes no draws.
inline double apply_relative_noise(double x, double sigma_rel, Rng& rng) {
    if (sigma_rel <= 0.0) return x;
    return std::max(0.0, x * (1.0 + rng.normal(0.0, sigma_rel)));
}

}  // namespace pumpsim
