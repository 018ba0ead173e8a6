#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pumpsim/hydraulics.hpp"
#include "pumpsim/rng.hpp"

namespace pumpsim {

// ---------------------------------------------------------------------------
// Quadratic least squares: a 3-parameter head model H = t0 + t1 q + t2 q^2 and
// its 6-parameter extension where each coefficient drifts linearly in time.
// Solved by explicit normal equations (Cholesky) on centered/scaled regressors;
// coefficients are mapped back to the raw monomial basis.
// ---------------------------------------------------------------------------

struct QuadraticFit {
    // theta[0..2]: base coefficients; theta[3..5]: per-coefficient time slopes
    // (zero for the static model).
    std::array<double, 6> theta{};
    double ssr = 0.0;
    int n_params = 0; ///< 3 or 6
    int m = 0;        ///< sample count

    double predict(double t, double q) const {
        const double t0 = theta[0] + theta[3] * t;
        const double t1 = theta[1] + theta[4] * t;
        const double t2 = theta[2] + theta[5] * t;
        return t0 + t1 * q + t2 * q * q;
    }
};

namespace detail {

/// Cholesky solve of A x = b for symmetric positive definite A (n <= 6).
/// Returns false when a pivot collapses (rank-deficient design).
template <int N>
inline bool cholesky_solve(std::array<std::array<double, N>, N> a, std::array<double, N>& b) {
    double max_diag = 0.0;
    for (int i = 0; i < N; ++i) max_diag = std::max(max_diag, std::fabs(a[i][i]));
    if (max_diag <= 0.0) return false;
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (int k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
            if (i == j) {
                if (s <= max_diag * 1e-13) return false;
                a[i][i] = std::sqrt(s);
            } else {
                a[i][j] = s / a[j][j];
            }
        }
    }
    for (int i = 0; i < N; ++i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k) s -= a[i][k] * b[static_cast<std::size_t>(k)];
        b[static_cast<std::size_t>(i)] = s / a[i][i];
    }
    for (int i = N - 1; i >= 0; --i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < N; ++k) s -= a[k][i] * b[static_cast<std::size_t>(k)];
        b[static_cast<std::size_t>(i)] = s / a[i][i];
    }
    return true;
}

struct Scaler {
    double mean = 0.0;
    double scale = 1.0;
};

inline Scaler make_scaler(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size());
    return Scaler{mean, std::sqrt(var)};
}

}  // namespace detail

struct QhSample {
    double q = 0.0;
    double h = 0.0;
};

struct TqhSample {
    double t = 0.0;
    double q = 0.0;
    double h = 0.0;
};

/// OLS fit of H = t0 + t1 q + t2 q^2. Returns nullopt for a rank-deficient
/// design (e.g. all q equal), which callers treat as a degenerate cycle.
inline std::optional<QuadraticFit> fit_static_quadratic(const std::vector<QhSample>& pts) {
    const int m = static_cast<int>(pts.size());
    if (m < 4) throw std::invalid_argument("fit_static_quadratic: needs at least 4 samples");
    std::vector<double> qs(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) qs[i] = pts[i].q;
    const auto sq = detail::make_scaler(qs);
    if (sq.scale <= 0.0) return std::nullopt;

    std::array<std::array<double, 3>, 3> gram{};
    std::array<double, 3> rhs{};
    for (const auto& p : pts) {
        const double z = (p.q - sq.mean) / sq.scale;
        const std::array<double, 3> x{1.0, z, z * z};
        for (int i = 0; i < 3; ++i) {
            rhs[static_cast<std::size_t>(i)] += x[static_cast<std::size_t>(i)] * p.h;
            for (int j = 0; j <= i; ++j)
                gram[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
        }
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            gram[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                gram[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    auto beta = rhs;
    if (!detail::cholesky_solve<3>(gram, beta)) return std::nullopt;

    QuadraticFit fit;
    fit.n_params = 3;
    fit.m = m;
    const double mu = sq.mean, s = sq.scale;
    fit.theta[0] = beta[0] - beta[1] * mu / s + beta[2] * mu * mu / (s * s);
    fit.theta[1] = beta[1] / s - 2.0 * beta[2] * mu / (s * s);
    fit.theta[2] = beta[2] / (s * s);
    for (const auto& p : pts) {
        const double r = p.h - fit.predict(0.0, p.q);
        fit.ssr += r * r;
    }
    return fit;
}

/// OLS fit of H with coefficients drifting linearly in t (6 parameters over
/// the basis 1, q, q^2, t, tq, tq^2).
inline std::optional<QuadraticFit> fit_drift_quadratic(const std::vector<TqhSample>& pts) {
    const int m = static_cast<int>(pts.size());
    if (m < 7) throw std::invalid_argument("fit_drift_quadratic: needs at least 7 samples");
    std::vector<double> qs(pts.size()), ts(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        qs[i] = pts[i].q;
        ts[i] = pts[i].t;
    }
    const auto sq = detail::make_scaler(qs);
    const auto st = detail::make_scaler(ts);
    if (sq.scale <= 0.0 || st.scale <= 0.0) return std::nullopt;

    std::array<std::array<double, 6>, 6> gram{};
    std::array<double, 6> rhs{};
    for (const auto& p : pts) {
        const double z = (p.q - sq.mean) / sq.scale;
        const double u = (p.t - st.mean) / st.scale;
        const std::array<double, 6> x{1.0, z, z * z, u, u * z, u * z * z};
        for (int i = 0; i < 6; ++i) {
            rhs[static_cast<std::size_t>(i)] += x[static_cast<std::size_t>(i)] * p.h;
            for (int j = 0; j <= i; ++j)
                gram[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
        }
    }
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            gram[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                gram[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    auto beta = rhs;
    if (!detail::cholesky_solve<6>(gram, beta)) return std::nullopt;

    // Expand (const + slope*u) per scaled-q power back to the raw basis.
    const double mu_q = sq.mean, s_q = sq.scale;
    const double a_c = beta[0] - beta[3] * st.mean / st.scale, a_s = beta[3] / st.scale;
    const double b_c = beta[1] - beta[4] * st.mean / st.scale, b_s = beta[4] / st.scale;
    const double c_c = beta[2] - beta[5] * st.mean / st.scale, c_s = beta[5] / st.scale;

    QuadraticFit fit;
    fit.n_params = 6;
    fit.m = m;
    fit.theta[0] = a_c - b_c * mu_q / s_q + c_c * mu_q * mu_q / (s_q * s_q);
    fit.theta[3] = a_s - b_s * mu_q / s_q + c_s * mu_q * mu_q / (s_q * s_q);
    fit.theta[1] = b_c / s_q - 2.0 * c_c * mu_q / (s_q * s_q);
    fit.theta[4] = b_s / s_q - 2.0 * c_s * mu_q / (s_q * s_q);
    fit.theta[2] = c_c / (s_q * s_q);
    fit.theta[5] = c_s / (s_q * s_q);
    for (const auto& p : pts) {
        const double r = p.h - fit.predict(p.t, p.q);
        fit.ssr += r * r;
    }
    return fit;
}

// ---------------------------------------------------------------------------
// F distribution survival function via the regularized incomplete beta
// function, evaluated with a Lentz continued fraction.
// ---------------------------------------------------------------------------

namespace detail {

inline double beta_cont_fraction(double a, double b, double x) {
    constexpr int itmax = 500;
    constexpr double eps = 1e-15;
    constexpr double fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= itmax; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

/// Regularized incomplete beta function I_x(a, b).
inline double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cont_fraction(a, b, x) / a;
    return 1.0 - bt * beta_cont_fraction(b, a, 1.0 - x) / b;
}

}  // namespace detail

/// Upper-tail probability P(F > x) for the F distribution with d1, d2 degrees
/// of freedom.
inline double f_survival(double x, double d1, double d2) {
    if (x < 0.0) throw std::invalid_argument("f_survival: x must be >= 0");
    if (d1 < 1.0 || d2 < 1.0) throw std::invalid_argument("f_survival: degrees of freedom >= 1");
    if (x == 0.0) return 1.0;
    return detail::reg_inc_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * x));
}

// ---------------------------------------------------------------------------
// Nested-model comparison
// ---------------------------------------------------------------------------

struct FTestResult {
    double f_stat = 0.0;
    int df1 = 0;       ///< p1 - p0
    int df2 = 0;       ///< m - p1
    double p_value = 1.0;
    double aic_null = 0.0;
    double aic_alt = 0.0;
    bool perfect_fit = false; ///< alternative SSR collapsed to zero
};

inline double aic(double ssr, int m, int p) {
    const double floor = 1e-300;
    return static_cast<double>(m) * std::log(std::max(ssr, floor) / static_cast<double>(m)) +
           2.0 * static_cast<double>(p);
}

/// F-test of the restricted (static) model against the nested drift model.
inline FTestResult nested_f_test(const QuadraticFit& restricted, const QuadraticFit& full) {
    if (restricted.m != full.m)
        throw std::invalid_argument("nested_f_test: fits must share the same samples");
    if (full.n_params <= restricted.n_params)
        throw std::invalid_argument("nested_f_test: models are not nested");
    FTestResult r;
    r.df1 = full.n_params - restricted.n_params;
    r.df2 = full.m - full.n_params;
    r.aic_null = aic(restricted.ssr, restricted.m, restricted.n_params);
    r.aic_alt = aic(full.ssr, full.m, full.n_params);
    if (full.ssr <= 0.0) {
        r.perfect_fit = true;
        r.f_stat = std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
        return r;
    }
    const double num = std::max(0.0, restricted.ssr - full.ssr) / static_cast<double>(r.df1);
    const double den = full.ssr / static_cast<double>(r.df2);
    r.f_stat = num / den;
    r.p_value = f_survival(r.f_stat, static_cast<double>(r.df1), static_cast<double>(r.df2));
    return r;
}

// ---------------------------------------------------------------------------
// Tangent residuals: does the operating point move along the pump curve or
// the system curve? Derivatives are estimated with central differences on a
// moving-average-smoothed series (one-sided at the ends). Slopes are taken at
// the midpoint of the two differenced flow values, which makes the residual of
// a pure slide along a quadratic curve vanish identically.
// ---------------------------------------------------------------------------

struct TangentResiduals {
    std::vector<double> t;     ///< time of each residual sample
    std::vector<double> psi_p; ///< residual against the pump-curve tangent
    std::vector<double> psi_s; ///< residual against the system-curve tangent
};

inline TangentResiduals tangent_residuals(const std::vector<TqhSample>& samples,
                                          const PumpCurve& pump, const SystemCurve& system,
                                          int smoothing_window = 5) {
    if (smoothing_window < 1 || smoothing_window % 2 == 0)
        throw std::invalid_argument("tangent_residuals: smoothing_window must be odd and >= 1");
    const auto n = samples.size();
    if (n < static_cast<std::size_t>(smoothing_window + 2))
        throw std::invalid_argument("tangent_residuals: too few samples");

    const auto w = static_cast<std::size_t>(smoothing_window);
    const std::size_t m = n - w + 1;
    std::vector<double> ts(m), qs(m), hs(m);
    double sum_t = 0.0, sum_q = 0.0, sum_h = 0.0;
    for (std::size_t i = 0; i < w; ++i) {
        sum_t += samples[i].t;
        sum_q += samples[i].q;
        sum_h += samples[i].h;
    }
    for (std::size_t j = 0;; ++j) {
        ts[j] = sum_t / static_cast<double>(w);
        qs[j] = sum_q / static_cast<double>(w);
        hs[j] = sum_h / static_cast<double>(w);
        if (j + 1 >= m) break;
        sum_t += samples[j + w].t - samples[j].t;
        sum_q += samples[j + w].q - samples[j].q;
        sum_h += samples[j + w].h - samples[j].h;
    }

    TangentResiduals out;
    out.t.resize(m);
    out.psi_p.resize(m);
    out.psi_s.resize(m);
    auto emit = [&](std::size_t j, std::size_t lo, std::size_t hi) {
        const double dt = ts[hi] - ts[lo];
        const double qd = (qs[hi] - qs[lo]) / dt;
        const double hd = (hs[hi] - hs[lo]) / dt;
        const double q_mid = 0.5 * (qs[hi] + qs[lo]);
        const auto sl = curve_slopes(pump, system, q_mid);
        out.t[j] = ts[j];
        out.psi_p[j] = hd - sl.m_p * qd;
        out.psi_s[j] = hd - sl.m_s * qd;
    };
    emit(0, 0, 1);
    for (std::size_t j = 1; j + 1 < m; ++j) emit(j, j - 1, j + 1);
    emit(m - 1, m - 2, m - 1);
    return out;
}

/// Windowed attribution index: mean |psi_p| over (mean |psi_p| + mean |psi_s|).
/// Near 1 = pump-side change, near 0 = system-side change; defined as 0.5 when
/// both residual series vanish.
inline double decision_index(const std::vector<double>& psi_p, const std::vector<double>& psi_s) {
    if (psi_p.empty() || psi_p.size() != psi_s.size())
        throw std::invalid_argument("decision_index: series must be nonempty and equal-length");
    double ep = 0.0, es = 0.0;
    for (double v : psi_p) ep += std::fabs(v);
    for (double v : psi_s) es += std::fabs(v);
    const double denom = ep + es;
    if (denom <= 0.0) return 0.5;
    return ep / denom;
}

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Circular moving-block bootstrap over paired |psi| samples; returns the
/// empirical (alpha/2, 1-alpha/2) quantiles of the replicate index.
inline ConfidenceInterval bootstrap_index_ci(const std::vector<double>& psi_p,
                                             const std::vector<double>& psi_s, int block_len,
                                             int replicates, double alpha, Rng& rng) {
    if (psi_p.empty() || psi_p.size() != psi_s.size())
        throw std::invalid_argument("bootstrap_index_ci: series must be nonempty and equal-length");
    const auto n = psi_p.size();
    if (block_len < 1)
        block_len = std::max(5, static_cast<int>(std::ceil(std::cbrt(static_cast<double>(n)))));
    if (replicates < 100)
        throw std::invalid_argument("bootstrap_index_ci: needs at least 100 replicates");

    std::vector<double> stats(static_cast<std::size_t>(replicates));
    for (int b = 0; b < replicates; ++b) {
        double ep = 0.0, es = 0.0;
        std::size_t filled = 0;
        while (filled < n) {
            const auto start = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
            for (int k = 0; k < block_len && filled < n; ++k, ++filled) {
                const std::size_t idx = (start + static_cast<std::size_t>(k)) % n;
                ep += std::fabs(psi_p[idx]);
                es += std::fabs(psi_s[idx]);
            }
        }
        stats[static_cast<std::size_t>(b)] = (ep + es) <= 0.0 ? 0.5 : ep / (ep + es);
    }
    std::sort(stats.begin(), stats.end());
    auto at = [&](double q) {
        const auto idx = static_cast<std::size_t>(q * static_cast<double>(replicates - 1));
        return stats[idx];
    };
    return ConfidenceInterval{at(alpha / 2.0), at(1.0 - alpha / 2.0)};
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

enum class DiagLabel { normal, pump_fault, system_fault };

inline std::string to_string(DiagLabel l) {
    switch (l) {
        case DiagLabel::pump_fault: return "pump_fault";
        case DiagLabel::system_fault: return "system_fault";
        default: return "normal";
    }
}

struct Thresholds {
    double pump_lci = 0.6;     ///< CI lower bound above this => pump fault
    double system_uci = 0.4;   ///< CI upper bound below this => system fault
    double motion_floor = 0.0; ///< mean residual magnitude below this => normal
};

struct SegmentStats {
    double i_w = 0.5;
    double motion = 0.0; ///< mean(|psi_p|) + mean(|psi_s|) over the window
};

inline SegmentStats segment_stats(const std::vector<double>& psi_p,
                                  const std::vector<double>& psi_s) {
    SegmentStats s;
    s.i_w = decision_index(psi_p, psi_s);
    double ep = 0.0, es = 0.0;
    for (double v : psi_p) ep += std::fabs(v);
    for (double v : psi_s) es += std::fabs(v);
    s.motion = (ep + es) / static_cast<double>(psi_p.size());
    return s;
}

/// Baseline-driven thresholds: the decision bands never tighten past the
/// defaults (0.6 / 0.4) but widen when normal behaviour is itself spread out;
/// the motion floor is the ceiling of normal residual activity, below which no
/// attribution is attempted.
inline Thresholds learn_thresholds(const std::vector<SegmentStats>& normal_segments) {
    if (normal_segments.size() < 5)
        throw std::runtime_error("learn_thresholds: insufficient baseline (need >= 5 segments)");
    std::vector<double> iw, motion;
    iw.reserve(normal_segments.size());
    motion.reserve(normal_segments.size());
    for (const auto& s : normal_segments) {
        iw.push_back(s.i_w);
        motion.push_back(s.motion);
    }
    std::sort(iw.begin(), iw.end());
    std::sort(motion.begin(), motion.end());
    auto quantile = [](const std::vector<double>& v, double q) {
        const auto idx = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1) + 0.5);
        return v[std::min(idx, v.size() - 1)];
    };
    Thresholds th;
    th.pump_lci = std::max(0.6, quantile(iw, 0.975));
    th.system_uci = std::min(0.4, quantile(iw, 0.025));
    th.motion_floor = quantile(motion, 0.975);
    return th;
}

/// Threshold rule on a window's index and bootstrap CI.
inline DiagLabel classify_segment(const SegmentStats& stats, const ConfidenceInterval& ci,
                                  const Thresholds& th) {
    if (stats.motion <= th.motion_floor) return DiagLabel::normal;
    if (ci.lower > th.pump_lci) return DiagLabel::pump_fault;
    if (ci.upper < th.system_uci) return DiagLabel::system_fault;
    return DiagLabel::normal;
}

struct FtestCycleOutcome {
    DiagLabel label = DiagLabel::normal;
    double f_pump = 0.0;
    double p_pump = 1.0;
    double f_system = 0.0;
    double p_system = 1.0;
    bool degenerate = false; ///< rank-deficient design; label is inconclusive-normal
};

namespace detail {

/// Nested comparison of a static residual model (intercept only) against a
/// drifting one (linear trend in time): F = ((SSR0-SSR1)/1) / (SSR1/(m-2)).
/// The intercept null absorbs any fixed offset from the reference curve, so
/// only genuine within-cycle movement rejects.
struct TrendTest {
    double f_stat = 0.0;
    double p_value = 1.0;
    double ssr0 = 0.0;
};

inline TrendTest residual_trend_test(const std::vector<double>& t, const std::vector<double>& r) {
    const auto m = static_cast<double>(r.size());
    double tm = 0.0, rm = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        tm += t[i];
        rm += r[i];
    }
    tm /= m;
    rm /= m;
    double stt = 0.0, str = 0.0, srr = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double dt = t[i] - tm;
        const double dr = r[i] - rm;
        stt += dt * dt;
        str += dt * dr;
        srr += dr * dr;
    }
    TrendTest out;
    out.ssr0 = srr;
    if (stt <= 0.0 || srr <= 0.0) return out;
    const double ssr1 = std::max(0.0, srr - str * str / stt);
    if (ssr1 <= 0.0) {
        out.f_stat = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
        return out;
    }
    out.f_stat = (srr - ssr1) / (ssr1 / (m - 2.0));
    out.p_value = f_survival(out.f_stat, 1.0, m - 2.0);
    return out;
}

}  // namespace detail

/// Two nested F-tests on a cycle's normalized samples: residuals against the
/// nominal pump curve and against the nominal system curve, each tested
/// static-vs-drift (intercept null against a within-cycle trend). A blockage
/// drags the point along the system curve, so only the pump-referenced
/// residual trends; clogging does the opposite. Rejection on exactly one side
/// names the fault origin; if both reject, the larger F wins.
inline FtestCycleOutcome classify_by_ftest(const std::vector<TqhSample>& samples,
                                           const PumpCurve& nominal_pump,
                                           const SystemCurve& nominal_system,
                                           double alpha_test = 0.01) {
    if (samples.size() < 10)
        throw std::invalid_argument("classify_by_ftest: needs at least 10 near-nominal samples");
    FtestCycleOutcome out;

    double h_scale = 1.0;
    for (const auto& s : samples) h_scale = std::max(h_scale, std::fabs(s.h));
    const double ssr_floor = static_cast<double>(samples.size()) * std::pow(1e-7 * h_scale, 2);

    std::vector<double> ts(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) ts[i] = samples[i].t;

    auto run_channel = [&](bool pump_side, double& f_out, double& p_out) -> bool {
        std::vector<double> r(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double ref = pump_side
                                   ? pump_head(nominal_pump, samples[i].q, 1.0)
                                   : system_head(nominal_system, samples[i].q);
            r[i] = samples[i].h - ref;
        }
        const auto tt = detail::residual_trend_test(ts, r);
        if (tt.ssr0 <= ssr_floor) return false; // nothing but numerical dust
        f_out = tt.f_stat;
        p_out = tt.p_value;
        return tt.p_value < alpha_test;
    };

    const bool rej_pump = run_channel(true, out.f_pump, out.p_pump);
    const bool rej_sys = run_channel(false, out.f_system, out.p_system);
    if (rej_pump && rej_sys)
        out.label = out.f_pump >= out.f_system ? DiagLabel::pump_fault : DiagLabel::system_fault;
    else if (rej_pump)
        out.label = DiagLabel::pump_fault;
    else if (rej_sys)
        out.label = DiagLabel::system_fault;
    return out;
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct ConfusionMatrix {
    // counts[truth][predicted], index order: normal, pump_fault, system_fault
    std::array<std::array<int, 3>, 3> counts{};

    static int index(DiagLabel l) {
        switch (l) {
            case DiagLabel::pump_fault: return 1;
            case DiagLabel::system_fault: return 2;
            default: return 0;
        }
    }

    ClassMetrics metrics(DiagLabel cls) const {
        const int c = index(cls);
        int tp = counts[c][c];
        int pred = 0, truth = 0;
        for (int i = 0; i < 3; ++i) {
            pred += counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            truth += counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
        }
        ClassMetrics m;
        m.precision = pred > 0 ? static_cast<double>(tp) / pred : 0.0;
        m.recall = truth > 0 ? static_cast<double>(tp) / truth : 0.0;
        m.f1 = (m.precision + m.recall) > 0.0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        return m;
    }

    ClassMetrics macro() const {
        ClassMetrics out;
        for (DiagLabel l : {DiagLabel::normal, DiagLabel::pump_fault, DiagLabel::system_fault}) {
            const auto m = metrics(l);
            out.precision += m.precision / 3.0;
            out.recall += m.recall / 3.0;
            out.f1 += m.f1 / 3.0;
        }
        return out;
    }

    int cross_confusions() const {
        return counts[1][2] + counts[2][1]; // pump <-> system mixups
    }
};

inline ConfusionMatrix classification_metrics(const std::vector<DiagLabel>& predicted,
                                              const std::vector<DiagLabel>& truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("classification_metrics: length mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        ++cm.counts[static_cast<std::size_t>(ConfusionMatrix::index(truth[i]))]
                   [static_cast<std::size_t>(ConfusionMatrix::index(predicted[i]))];
    return cm;
}

// ---------------------------------------------------------------------------
// Synthetic drift fixtures: 50-step operating-point traces of a pump/system
// pair whose coefficients drift linearly, with additive measurement noise and
// a mild declining speed ramp.
// ---------------------------------------------------------------------------

struct DriftFixtureSpec {
    int m = 50;
    // datasheet-form pump coefficients H = a0 - a1 q - a2 q^2 and per-step drift
    double a0 = 15.0, a0_rate = 0.0;
    double a1 = 5e-4, a1_rate = 0.0;
    double a2 = 9e-4, a2_rate = 0.0;
    // system curve and per-step drift
    double h_static = 2.0, h_rate = 0.0;
    double k = 6e-4, k_rate = 0.0;
    // drive frequency trace f_t = f0 + f_rate * t + N(0, f_jitter^2)
    double f0 = 50.0, f_rate = -0.1, f_jitter = 1.0;
    double f_nominal = 50.0;
    // additive measurement noise
    double sigma_q = 1.0, sigma_h = 0.5;
};

/// Progressive pump degradation (head loss grows over the window).
inline DriftFixtureSpec degradation_fixture_spec() {
    DriftFixtureSpec s;
    s.a0_rate = -0.1;
    s.a1_rate = 1e-6;
    s.a2_rate = 5e-6;
    return s;
}

/// Healthy pump and system; only the speed ramp and noise remain.
inline DriftFixtureSpec healthy_fixture_spec() { return DriftFixtureSpec{}; }

/// Discharge-side degradation: friction doubles twice over and the static head
/// gains a metre across the window; the pump stays healthy.
inline DriftFixtureSpec clogging_fixture_spec() {
    DriftFixtureSpec s;
    const double steps = static_cast<double>(s.m - 1);
    s.k_rate = s.k * 2.0 / steps;
    s.h_rate = 1.0 / steps;
    return s;
}

struct FixtureSample {
    double t = 0.0;
    double q = 0.0;
    double h = 0.0;
    double f = 0.0;
};

inline std::vector<FixtureSample> gen_drift_fixture(const DriftFixtureSpec& spec,
                                                    std::uint64_t seed) {
    Rng f_rng = derive_stream(seed, "fixture.freq");
    Rng q_rng = derive_stream(seed, "fixture.flow");
    Rng h_rng = derive_stream(seed, "fixture.head");
    std::vector<FixtureSample> out;
    out.reserve(static_cast<std::size_t>(spec.m));
    for (int i = 0; i < spec.m; ++i) {
        const double t = static_cast<double>(i);
        const PumpCurve pump{spec.a0 + spec.a0_rate * t, -(spec.a1 + spec.a1_rate * t),
                             -(spec.a2 + spec.a2_rate * t), spec.f_nominal};
        const SystemCurve sys{spec.h_static + spec.h_rate * t, spec.k + spec.k_rate * t};
        double f = spec.f0 + spec.f_rate * t;
        if (spec.f_jitter > 0.0) f += f_rng.normal(0.0, spec.f_jitter);
        const double n = f / spec.f_nominal;
        const auto op = solve_operating_point(pump, sys, n);
        double q = op ? op->q : 0.0;
        double h = op ? op->h : pump_head(pump, 0.0, n);
        if (spec.sigma_q > 0.0) q += q_rng.normal(0.0, spec.sigma_q);
        if (spec.sigma_h > 0.0) h += h_rng.normal(0.0, spec.sigma_h);
        out.push_back(FixtureSample{t, q, h, f});
    }
    return out;
}

/// The default degradation trace used throughout the diagnostics tests.
inline std::vector<FixtureSample> gen_degradation_fixture(std::uint64_t seed) {
    return gen_drift_fixture(degradation_fixture_spec(), seed);
}

/// Regression variant of the drift fixture: the flow is an exogenous sweep
/// around a representative value and the head comes from the drifting pump
/// curve. An equilibrium trace stays on the (fixed) system curve, which a
/// static quadratic fits regardless of drift; sampling the flow decorrelates
/// it from time so coefficient drift shows up as lack of fit.
inline std::vector<FixtureSample> gen_head_regression_fixture(const DriftFixtureSpec& spec,
                                                              std::uint64_t seed,
                                                              double q_low = 25.0,
                                                              double q_high = 35.0) {
    Rng f_rng = derive_stream(seed, "fixture.freq");
    Rng q_rng = derive_stream(seed, "fixture.flow");
    Rng h_rng = derive_stream(seed, "fixture.head");
    Rng sweep = derive_stream(seed, "fixture.sweep");
    std::vector<FixtureSample> out;
    out.reserve(static_cast<std::size_t>(spec.m));
    for (int i = 0; i < spec.m; ++i) {
        const double t = static_cast<double>(i);
        const PumpCurve pump{spec.a0 + spec.a0_rate * t, -(spec.a1 + spec.a1_rate * t),
                             -(spec.a2 + spec.a2_rate * t), spec.f_nominal};
        double f = spec.f0 + spec.f_rate * t;
        if (spec.f_jitter > 0.0) f += f_rng.normal(0.0, spec.f_jitter);
        const double n = f / spec.f_nominal;
        const double q_true = q_low + (q_high - q_low) * sweep.uniform();
        const double h_true = pump_head(pump, q_true, n);
        double q = q_true;
        double h = h_true;
        if (spec.sigma_q > 0.0) q += q_rng.normal(0.0, spec.sigma_q);
        if (spec.sigma_h > 0.0) h += h_rng.normal(0.0, spec.sigma_h);
        out.push_back(FixtureSample{t, q, h, f});
    }
    return out;
}

/// Affinity-normalize fixture samples onto the nominal-speed plane.
inline std::vector<TqhSample> normalize_fixture(const std::vector<FixtureSample>& samples,
                                                double f_nominal) {
    std::vector<TqhSample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        if (const auto np = affinity_normalize(s.q, s.h, s.f, f_nominal))
            out.push_back(TqhSample{s.t, np->q_star, np->h_star});
    }
    return out;
}

}  // namespace pumpsim
