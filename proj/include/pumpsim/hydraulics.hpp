#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace pumpsim {

/// Pump head-vs-flow characteristic at nominal speed, stored in monomial form
///   H(q) = c0 + c1*q + c2*q^2            (q in m3/h, H in m)
/// Datasheet curves are commonly written H = a0 - a1 Q - a2 Q^2 with positive
/// a1, a2; that maps to (c0, c1, c2) = (a0, -a1, -a2). At speed ratio
/// n = f/f_nominal the curve scales as H(q, n) = c0 n^2 + c1 n q + c2 q^2.
struct PumpCurve {
    double c0 = 0.0;         ///< shut-off head at nominal speed (m), > 0
    double c1 = 0.0;         ///< linear coefficient (m per m3/h), <= 0
    double c2 = 0.0;         ///< quadratic coefficient (m per (m3/h)^2), < 0
    double f_nominal = 50.0; ///< nominal drive frequency (Hz)

    /// Positive root of the scaled curve: the flow where head reaches zero.
    double q_zero(double n) const {
        const double d = std::sqrt(c1 * c1 - 4.0 * c2 * c0);
        return n * (-c1 - d) / (2.0 * c2);
    }
};

/// Network demand curve H(q) = h_static + k*q^2.
struct SystemCurve {
    double h_static = 0.0; ///< static lift (m), >= 0
    double k = 0.0;        ///< friction loss coefficient (m per (m3/h)^2), > 0
};

/// Intersection of a pump curve and a system curve.
struct OperatingPoint {
    double q = 0.0; ///< flow (m3/h)
    double h = 0.0; ///< head (m)
};

inline void validate(const PumpCurve& p, const std::string& where = "pump_curve") {
    if (!(p.c0 > 0.0)) throw std::invalid_argument(where + ".c0 must be > 0 (shut-off head)");
    if (!(p.c1 <= 0.0)) throw std::invalid_argument(where + ".c1 must be <= 0 (head strictly decreasing)");
    if (!(p.c2 < 0.0)) throw std::invalid_argument(where + ".c2 must be < 0 (curve opens downward)");
    if (!(p.f_nominal > 0.0)) throw std::invalid_argument(where + ".f_nominal must be > 0");
}

inline void validate(const SystemCurve& s, const std::string& where = "system_curve") {
    if (!(s.h_static >= 0.0)) throw std::invalid_argument(where + ".h_static must be >= 0");
    if (!(s.k > 0.0)) throw std::invalid_argument(where + ".k must be > 0");
}

/// Scaled pump head at flow q and speed ratio n. Negative results are legal
/// and mean operation beyond the end of the curve.
inline double pump_head(const PumpCurve& p, double q, double n) {
    return p.c0 * n * n + p.c1 * n * q + p.c2 * q * q;
}

inline double system_head(const SystemCurve& s, double q) {
    return s.h_static + s.k * q * q;
}

/// Intersection of the speed-scaled pump curve with the system curve, found by
/// bisection on [0, q_zero(n)]. Returns nullopt when the shut-off head does not
/// exceed the static head (the pump cannot lift; callers treat it as a stall
/// with zero flow).
inline std::optional<OperatingPoint> solve_operating_point(const PumpCurve& pump,
                                                           const SystemCurve& system,
                                                           double n,
                                                           double tol = 1e-8,
                                                           int max_iter = 200) {
    if (!(tol > 0.0)) throw std::invalid_argument("solve_operating_point: tol must be > 0");
    if (n <= 0.0) return std::nullopt;
    const double shutoff = pump.c0 * n * n;
    if (shutoff <= system.h_static) return std::nullopt;

    double lo = 0.0;
    double hi = pump.q_zero(n);
    // g(q) = pump - system is strictly decreasing, positive at 0, negative at hi.
    // Iterate past the head tolerance until the bracket itself is tight, so
    // the flow agrees with the closed-form root to ~1e-12 relative.
    auto g = [&](double q) { return pump_head(pump, q, n) - system_head(system, q); };
    double q = 0.5 * (lo + hi);
    for (int i = 0; i < max_iter; ++i) {
        q = 0.5 * (lo + hi);
        const double v = g(q);
        if (std::fabs(v) <= tol && (hi - lo) <= 1e-12 * std::max(1.0, q)) break;
        if (v > 0.0)
            lo = q;
        else
            hi = q;
    }
    return OperatingPoint{q, system_head(system, q)};
}

struct NormalizedPoint {
    double q_star = 0.0;
    double h_star = 0.0;
};

/// Map an observation at drive frequency f onto the nominal-speed curve:
/// q* = q*(f_nom/f), h* = h*(f_nom/f)^2. Returns nullopt below the frequency
/// floor (default 0.2*f_nominal), where the scaling blows up; such samples are
/// excluded from diagnostics.
inline std::optional<NormalizedPoint> affinity_normalize(double q, double h, double f,
                                                         double f_nominal,
                                                         double floor_ratio = 0.2) {
    if (f <= floor_ratio * f_nominal) return std::nullopt;
    const double r = f_nominal / f;
    return NormalizedPoint{q * r, h * r * r};
}

struct CurveSlopes {
    double m_p = 0.0; ///< dH_pump/dq at q_star on the nominal-speed curve
    double m_s = 0.0; ///< dH_system/dq at q_star
};

inline CurveSlopes curve_slopes(const PumpCurve& pump, const SystemCurve& system, double q_star) {
    return CurveSlopes{pump.c1 + 2.0 * pump.c2 * q_star, 2.0 * system.k * q_star};
}

}  // namespace pumpsim
