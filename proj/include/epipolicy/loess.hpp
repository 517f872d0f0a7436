#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "epipolicy/errors.hpp"
#include "epipolicy/timeseries.hpp"

namespace epipolicy {

inline std::vector<double> default_span_grid() {
    std::vector<double> grid;
    for (int k = 1; k <= 19; ++k) grid.push_back(0.05 * k);
    return grid;
}

// Local-regression configuration. span unset means automatic selection by
// AICc over span_grid.
struct LoessConfig {
    int degree = 1;  // 1 = local linear, 2 = local quadratic
    std::optional<double> span;
    std::vector<double> span_grid = default_span_grid();

    void validate() const {
        if (degree != 1 && degree != 2) throw DomainError("loess: degree must be 1 or 2");
        if (span && !(*span > 0.0 && *span <= 1.0)) {
            throw DomainError("loess: span must lie in (0,1]");
        }
    }
};

namespace detail {

// Window [lo, hi) of the k nearest neighbors of x[j]; among equidistant
// candidates the left one is taken first.
inline std::pair<std::size_t, std::size_t> neighbor_window(const std::vector<double>& x,
                                                           std::size_t j, std::size_t k) {
    std::size_t lo = j;
    std::size_t hi = j + 1;
    while (hi - lo < k) {
        const bool can_left = lo > 0;
        const bool can_right = hi < x.size();
        if (can_left && (!can_right || x[j] - x[lo - 1] <= x[hi] - x[j])) {
            --lo;
        } else {
            ++hi;
        }
    }
    return {lo, hi};
}

inline double tricube(double u) {
    const double t = 1.0 - u * u * u;
    return t * t * t;
}

struct LoessEval {
    std::vector<double> fitted;
    double trace_hat = 0.0;  // tr(L), sum of per-point self-weights
};

// Per-point weighted polynomial fit over the ceil(span*n) nearest
// neighbors, tricube weights on distances normalized by the window radius.
// The local design is centered at x[j] and scaled by the radius, so the
// fitted value is the intercept and the hat diagonal is inv(XtWX)(0,0).
inline LoessEval loess_eval(const std::vector<double>& x, const std::vector<double>& y, int degree,
                            double span) {
    const std::size_t n = x.size();
    const std::size_t k =
        std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil(span * static_cast<double>(n))));
    if (k < static_cast<std::size_t>(degree) + 1) {
        throw InsufficientDataError("loess: span*n smaller than degree+1");
    }
    const int p = degree + 1;
    LoessEval out;
    out.fitted.resize(n);
    Eigen::MatrixXd xtwx(p, p);
    Eigen::VectorXd xtwy(p);
    for (std::size_t j = 0; j < n; ++j) {
        const auto [lo, hi] = neighbor_window(x, j, k);
        const double radius = std::max(x[j] - x[lo], x[hi - 1] - x[j]);
        if (!(radius > 0.0)) {
            throw SingularityError("loess: zero-radius neighborhood at index " + std::to_string(j));
        }
        xtwx.setZero();
        xtwy.setZero();
        for (std::size_t m = lo; m < hi; ++m) {
            const double t = (x[m] - x[j]) / radius;
            const double w = tricube(std::fabs(t));
            if (w <= 0.0) continue;
            double basis[3] = {1.0, t, t * t};
            for (int a = 0; a < p; ++a) {
                for (int b = 0; b < p; ++b) xtwx(a, b) += w * basis[a] * basis[b];
                xtwy(a) += w * basis[a] * y[m];
            }
        }
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(xtwx);
        if (!lu.isInvertible()) {
            throw SingularityError("loess: singular neighborhood at index " + std::to_string(j));
        }
        const Eigen::MatrixXd inv = lu.inverse();
        out.fitted[j] = (inv * xtwy)(0);
        out.trace_hat += inv(0, 0);  // self-weight: tricube(0) = 1
    }
    return out;
}

inline void check_xy(const std::vector<double>& x, const std::vector<double>& y, int degree) {
    if (x.size() != y.size()) throw InsufficientDataError("loess: |x| != |y|");
    if (x.size() < static_cast<std::size_t>(degree) + 1) {
        throw InsufficientDataError("loess: need at least degree+1 points");
    }
    for (std::size_t k = 1; k < x.size(); ++k) {
        if (!(x[k] > x[k - 1])) throw DomainError("loess: x must be strictly increasing");
    }
}

}  // namespace detail

// LOESS fit evaluated at the input abscissae. cfg.span must be set; use
// select_span for automatic selection.
inline std::vector<double> loess_fit(const std::vector<double>& x, const std::vector<double>& y,
                                     const LoessConfig& cfg) {
    cfg.validate();
    detail::check_xy(x, y, cfg.degree);
    if (!cfg.span) throw DomainError("loess_fit: span not set (use select_span)");
    return detail::loess_eval(x, y, cfg.degree, *cfg.span).fitted;
}

// AICc for a LOESS smoother: log(sigma^2) + 1 + 2(tr(L)+1)/(n - tr(L) - 2)
// with sigma^2 the mean squared residual.
inline double loess_aicc(const std::vector<double>& y, const detail::LoessEval& eval) {
    const double n = static_cast<double>(y.size());
    double rss = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double resid = y[k] - eval.fitted[k];
        rss += resid * resid;
    }
    const double denom = n - eval.trace_hat - 2.0;
    if (!(denom > 0.0)) throw InsufficientDataError("aicc: n - tr(L) - 2 not positive");
    return std::log(rss / n) + 1.0 + 2.0 * (eval.trace_hat + 1.0) / denom;
}

// Smallest-AICc span from cfg.span_grid; ties break toward the larger span.
// Candidates that cannot support the fit (too few positive-weight
// neighbors, singular windows, nonpositive AICc denominator) are skipped.
inline double select_span(const std::vector<double>& x, const std::vector<double>& y,
                          const LoessConfig& cfg) {
    cfg.validate();
    detail::check_xy(x, y, cfg.degree);
    if (x.size() < static_cast<std::size_t>(cfg.degree) + 2) {
        throw InsufficientDataError("select_span: need at least degree+2 points");
    }
    std::vector<double> grid = cfg.span_grid;
    std::sort(grid.begin(), grid.end());
    double best_span = 0.0;
    double best_aicc = std::numeric_limits<double>::infinity();
    bool found = false;
    for (double span : grid) {
        if (!(span > 0.0 && span <= 1.0)) continue;
        const std::size_t k = static_cast<std::size_t>(
            std::ceil(span * static_cast<double>(x.size())));
        if (k < static_cast<std::size_t>(cfg.degree) + 2) continue;
        try {
            const auto eval = detail::loess_eval(x, y, cfg.degree, span);
            const double aicc = loess_aicc(y, eval);
            if (std::isnan(aicc)) continue;
            if (!found || aicc <= best_aicc) {
                best_aicc = aicc;
                best_span = span;
                found = true;
            }
        } catch (const SingularityError&) {
            continue;
        } catch (const InsufficientDataError&) {
            continue;
        }
    }
    if (!found) throw NoFeasibleSpanError("select_span: no feasible span in grid");
    return best_span;
}

// Smooths the staircase cumulative-recovered series of one region. Missing
// cells are linearly interpolated between known neighbors (constant
// extension before the first and after the last known value), the filled
// series is LOESS-fit against the date axis, and the result is clamped to
// be nonnegative and nondecreasing by running maximum, preserving the
// physical monotonicity of cumulative recoveries.
inline std::vector<double> smooth_recovered(const RawSeries& raw, const LoessConfig& cfg) {
    cfg.validate();
    const std::size_t n = raw.rows.size();
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
        x[k] = static_cast<double>(raw.rows[k].date.serial() - raw.rows[0].date.serial());
    }
    std::vector<std::size_t> known;
    for (std::size_t k = 0; k < n; ++k) {
        if (raw.rows[k].cum_recovered) known.push_back(k);
    }
    if (known.size() < static_cast<std::size_t>(cfg.degree) + 2) {
        throw InsufficientDataError("smooth_recovered: region '" + raw.region + "' has " +
                                    std::to_string(known.size()) +
                                    " recovered values, need at least " +
                                    std::to_string(cfg.degree + 2));
    }

    std::vector<double> filled(n, 0.0);
    for (std::size_t k = 0; k < known.size(); ++k) {
        filled[known[k]] = static_cast<double>(*raw.rows[known[k]].cum_recovered);
    }
    for (std::size_t k = 0; k < known.front(); ++k) filled[k] = filled[known.front()];
    for (std::size_t k = known.back() + 1; k < n; ++k) filled[k] = filled[known.back()];
    for (std::size_t g = 0; g + 1 < known.size(); ++g) {
        const std::size_t a = known[g];
        const std::size_t b = known[g + 1];
        for (std::size_t k = a + 1; k < b; ++k) {
            const double frac = (x[k] - x[a]) / (x[b] - x[a]);
            filled[k] = filled[a] + frac * (filled[b] - filled[a]);
        }
    }

    LoessConfig resolved = cfg;
    if (!resolved.span) resolved.span = select_span(x, filled, cfg);
    std::vector<double> smooth = loess_fit(x, filled, resolved);
    double running_max = 0.0;
    for (double& v : smooth) {
        v = std::max(v, 0.0);
        running_max = std::max(running_max, v);
        v = running_max;
    }
    return smooth;
}

}  // namespace epipolicy
