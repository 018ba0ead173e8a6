#pragma once

#include <cstddef>
#include <vector>

namespace pumpsim {

namespace detail {

/// Samples drawn from a piecewise-linear quantile function at a regular grid,
/// giving a fixed synthetic dataset whose empirical quantiles sit on the
/// anchors.
inline std::vector<double> samples_from_quantile_anchors(
    const std::vector<std::pair<double, double>>& anchors, std::size_t m) {
    std::vector<double> out;
    out.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double u = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
        std::size_t seg = 1;
        while (seg + 1 < anchors.size() && u > anchors[seg].first) ++seg;
        const auto& [u0, q0] = anchors[seg - 1];
        const auto& [u1, q1] = anchors[seg];
        out.push_back(q0 + (q1 - q0) * (u - u0) / (u1 - u0));
    }
    return out;
}

}  // namespace detail

/// Synthetic stand-in for a municipal station's inferred inflow record
/// (m3/h): right-skewed with median ~57.6, p95 ~115.2, p99 ~144
/// (0.016 / 0.032 / 0.040 m3/s).
inline std::vector<double> scada_inflow_samples() {
    return detail::samples_from_quantile_anchors(
        {{0.0, 10.0}, {0.5, 57.6}, {0.95, 115.2}, {0.99, 144.0}, {1.0, 170.0}}, 2000);
}

/// Light-load inflow record (m3/h) for a small catchment: median ~13,
/// right-skewed tail to ~52. Used by the bundled blockage scenario.
inline std::vector<double> light_inflow_samples() {
    return detail::samples_from_quantile_anchors(
        {{0.0, 4.0}, {0.5, 13.0}, {0.95, 30.0}, {0.99, 42.0}, {1.0, 52.0}}, 2000);
}

}  // namespace pumpsim
