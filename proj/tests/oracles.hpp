#pragma once

// Independent reference implementations used to check the library. These
// deliberately avoid the library's code paths: local regressions are solved
// with a hand-rolled Gauss-Jordan elimination instead of Eigen, the normal
// quantile comes from bisection on erfc, t-distribution tail probabilities
// from adaptive quadrature of the density, and the log densities use their
// own Lanczos log-gamma.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// dense linear solve (Gauss-Jordan with partial pivoting, long double)

inline std::vector<long double> solve_gauss_jordan(std::vector<std::vector<long double>> a,
                                                   std::vector<long double> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row) {
            if (std::fabs(static_cast<double>(a[row][col])) >
                std::fabs(static_cast<double>(a[pivot][col]))) {
                pivot = row;
            }
        }
        if (a[pivot][col] == 0.0L) throw std::runtime_error("oracle: singular system");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        const long double inv = 1.0L / a[col][col];
        for (std::size_t k = col; k < n; ++k) a[col][k] *= inv;
        b[col] *= inv;
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || a[row][col] == 0.0L) continue;
            const long double factor = a[row][col];
            for (std::size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
            b[row] -= factor * b[col];
        }
    }
    return b;
}

inline std::vector<std::vector<long double>> invert_gauss_jordan(
    std::vector<std::vector<long double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<long double>> inv(n, std::vector<long double>(n, 0.0L));
    for (std::size_t k = 0; k < n; ++k) inv[k][k] = 1.0L;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row) {
            if (std::fabs(static_cast<double>(a[row][col])) >
                std::fabs(static_cast<double>(a[pivot][col]))) {
                pivot = row;
            }
        }
        if (a[pivot][col] == 0.0L) throw std::runtime_error("oracle: singular matrix");
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const long double scale = 1.0L / a[col][col];
        for (std::size_t k = 0; k < n; ++k) {
            a[col][k] *= scale;
            inv[col][k] *= scale;
        }
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col) continue;
            const long double factor = a[row][col];
            if (factor == 0.0L) continue;
            for (std::size_t k = 0; k < n; ++k) {
                a[row][k] -= factor * a[col][k];
                inv[row][k] -= factor * inv[col][k];
            }
        }
    }
    return inv;
}

// ---------------------------------------------------------------------------
// brute-force LOESS: explicit neighbor sets, tricube weights, per-point
// normal equations

struct LoessBrute {
    std::vector<double> fitted;
    double trace_hat = 0.0;
};

inline LoessBrute loess_brute(const std::vector<double>& x, const std::vector<double>& y,
                              int degree, double span) {
    const std::size_t n = x.size();
    const std::size_t k = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::ceil(span * static_cast<double>(n))));
    if (k < static_cast<std::size_t>(degree) + 1) throw std::runtime_error("oracle: span too small");
    const std::size_t p = static_cast<std::size_t>(degree) + 1;
    LoessBrute out;
    out.fitted.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double da = std::fabs(x[a] - x[j]);
            const double db = std::fabs(x[b] - x[j]);
            if (da != db) return da < db;
            return a < b;
        });
        order.resize(k);
        double dmax = 0.0;
        for (std::size_t idx : order) dmax = std::max(dmax, std::fabs(x[idx] - x[j]));
        if (dmax <= 0.0) throw std::runtime_error("oracle: zero-radius window");

        std::vector<std::vector<long double>> xtwx(p, std::vector<long double>(p, 0.0L));
        std::vector<long double> xtwy(p, 0.0L);
        for (std::size_t idx : order) {
            const double u = std::fabs(x[idx] - x[j]) / dmax;
            const double t = 1.0 - u * u * u;
            const double w = t * t * t;
            if (w <= 0.0) continue;
            long double basis[3] = {1.0L, static_cast<long double>(x[idx] - x[j]),
                                    static_cast<long double>((x[idx] - x[j]) * (x[idx] - x[j]))};
            for (std::size_t a = 0; a < p; ++a) {
                for (std::size_t b = 0; b < p; ++b) xtwx[a][b] += w * basis[a] * basis[b];
                xtwy[a] += w * basis[a] * y[idx];
            }
        }
        const auto coef = solve_gauss_jordan(xtwx, xtwy);
        out.fitted[j] = static_cast<double>(coef[0]);
        const auto inv = invert_gauss_jordan(xtwx);
        out.trace_hat += static_cast<double>(inv[0][0]);  // self weight is 1
    }
    return out;
}

inline double loess_aicc_brute(const std::vector<double>& y, const LoessBrute& eval) {
    const double n = static_cast<double>(y.size());
    double rss = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        rss += (y[k] - eval.fitted[k]) * (y[k] - eval.fitted[k]);
    }
    const double denom = n - eval.trace_hat - 2.0;
    if (!(denom > 0.0)) throw std::runtime_error("oracle: aicc infeasible");
    return std::log(rss / n) + 1.0 + 2.0 * (eval.trace_hat + 1.0) / denom;
}

// Exhaustive AICc evaluation over the grid; ties toward the larger span.
inline double select_span_brute(const std::vector<double>& x, const std::vector<double>& y,
                                int degree, std::vector<double> grid) {
    std::sort(grid.begin(), grid.end());
    bool found = false;
    double best_span = 0.0, best_aicc = 0.0;
    for (double span : grid) {
        if (!(span > 0.0 && span <= 1.0)) continue;
        const std::size_t k =
            static_cast<std::size_t>(std::ceil(span * static_cast<double>(x.size())));
        if (k < static_cast<std::size_t>(degree) + 2) continue;
        try {
            const auto eval = loess_brute(x, y, degree, span);
            const double aicc = loess_aicc_brute(y, eval);
            if (std::isnan(aicc)) continue;
            if (!found || aicc <= best_aicc) {
                best_span = span;
                best_aicc = aicc;
                found = true;
            }
        } catch (const std::runtime_error&) {
            continue;
        }
    }
    if (!found) throw std::runtime_error("oracle: no feasible span");
    return best_span;
}

// ---------------------------------------------------------------------------
// fine-step forward Euler for the SIR equations (no clamping)

struct SirState {
    double s, i, r;
};

inline SirState euler_sir(SirState state, double beta, double gamma, double total_time,
                          double dt) {
    const long steps = std::lround(total_time / dt);
    for (long k = 0; k < steps; ++k) {
        const double flow_in = beta * state.s * state.i;
        const double flow_out = gamma * state.i;
        state.s -= dt * flow_in;
        state.i += dt * (flow_in - flow_out);
        state.r += dt * flow_out;
    }
    return state;
}

// ---------------------------------------------------------------------------
// normal quantile by bisection on the erfc-based CDF

inline double normal_cdf_ref(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_quantile_bisect(double p) {
    double lo = -40.0, hi = 40.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (normal_cdf_ref(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-14) break;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// two-sided t-distribution p-value by adaptive Simpson quadrature of the
// density, with the tail mapped onto [0, 1)

namespace detail {

inline double t_pdf(double x, double nu) {
    const double ln_c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                        0.5 * std::log(nu * M_PI);
    return std::exp(ln_c - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

template <typename F>
double adaptive_simpson(F f, double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(F f, double a, double b, double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace detail

inline double t_two_sided_p_quadrature(double t, double nu) {
    const double a = std::fabs(t);
    // x = a + s/(1-s) maps [0,1) onto [a, inf)
    auto integrand = [&](double s) {
        const double om = 1.0 - s;
        const double x = a + s / om;
        return detail::t_pdf(x, nu) / (om * om);
    };
    const double upper = 1.0 - 1e-10;
    return 2.0 * detail::integrate(integrand, 0.0, upper, 1e-13);
}

// ---------------------------------------------------------------------------
// from-scratch OLS via normal equations + the quadrature t-distribution

struct OlsOracle {
    std::vector<double> estimates;
    std::vector<double> std_errors;
    std::vector<double> t_stats;
    std::vector<double> p_values;
    double r_squared = 0.0;
    int dof = 0;
};

inline OlsOracle ols_oracle(const std::vector<std::vector<double>>& design,
                            const std::vector<double>& y) {
    const std::size_t n = design.size();
    const std::size_t p = design[0].size();
    std::vector<std::vector<long double>> xtx(p, std::vector<long double>(p, 0.0L));
    std::vector<long double> xty(p, 0.0L);
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t b = 0; b < p; ++b) {
                xtx[a][b] += static_cast<long double>(design[row][a]) * design[row][b];
            }
            xty[a] += static_cast<long double>(design[row][a]) * y[row];
        }
    }
    const auto beta = solve_gauss_jordan(xtx, xty);
    const auto xtx_inv = invert_gauss_jordan(xtx);

    long double rss = 0.0L;
    long double mean_y = 0.0L;
    for (double v : y) mean_y += v;
    mean_y /= static_cast<long double>(n);
    long double tss = 0.0L;
    for (std::size_t row = 0; row < n; ++row) {
        long double fit = 0.0L;
        for (std::size_t a = 0; a < p; ++a) fit += beta[a] * design[row][a];
        rss += (y[row] - fit) * (y[row] - fit);
        tss += (y[row] - mean_y) * (y[row] - mean_y);
    }
    OlsOracle out;
    out.dof = static_cast<int>(n - p);
    const long double sigma2 = rss / out.dof;
    out.r_squared = static_cast<double>(1.0L - rss / tss);
    for (std::size_t k = 0; k < p; ++k) {
        const double est = static_cast<double>(beta[k]);
        const double se = std::sqrt(static_cast<double>(sigma2 * xtx_inv[k][k]));
        out.estimates.push_back(est);
        out.std_errors.push_back(se);
        out.t_stats.push_back(est / se);
        out.p_values.push_back(t_two_sided_p_quadrature(est / se, out.dof));
    }
    return out;
}

// ---------------------------------------------------------------------------
// log densities with an independent Lanczos log-gamma

inline double lgamma_lanczos(double x) {
    static const double g[9] = {0.99999999999980993,  676.5203681218851,   -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059, 12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6,
                                1.5056327351493116e-7};
    if (x < 0.5) {
        return std::log(M_PI / std::sin(M_PI * x)) - lgamma_lanczos(1.0 - x);
    }
    x -= 1.0;
    double a = g[0];
    const double t = x + 7.5;
    for (int k = 1; k < 9; ++k) a += g[k] / (x + k);
    return 0.5 * std::log(2.0 * M_PI) + (x + 0.5) * std::log(t) - t + std::log(a);
}

inline double log_beta_pdf_ref(double y, double a, double b) {
    return lgamma_lanczos(a + b) - lgamma_lanczos(a) - lgamma_lanczos(b) +
           (a - 1.0) * std::log(y) + (b - 1.0) * std::log(1.0 - y);
}

inline double log_dirichlet_pdf_ref(const std::array<double, 3>& theta,
                                    const std::array<double, 3>& alpha) {
    double sum_alpha = 0.0, value = 0.0;
    for (int k = 0; k < 3; ++k) {
        sum_alpha += alpha[k];
        value += (alpha[k] - 1.0) * std::log(theta[k]) - lgamma_lanczos(alpha[k]);
    }
    return value + lgamma_lanczos(sum_alpha);
}

// ---------------------------------------------------------------------------
// minimal XML well-formedness check (enough for conforming SVG output)

inline bool xml_well_formed(const std::string& text, std::string* error = nullptr) {
    auto fail = [&](const std::string& why) {
        if (error) *error = why;
        return false;
    };
    std::vector<std::string> stack;
    std::size_t pos = 0;
    bool seen_root = false;
    const std::size_t n = text.size();
    while (pos < n) {
        if (text[pos] != '<') {
            if (text[pos] == '&') {
                const std::size_t semi = text.find(';', pos);
                if (semi == std::string::npos || semi - pos > 10) return fail("bad entity");
                const std::string entity = text.substr(pos + 1, semi - pos - 1);
                if (entity != "amp" && entity != "lt" && entity != "gt" && entity != "quot" &&
                    entity != "apos" && (entity.empty() || entity[0] != '#')) {
                    return fail("unknown entity &" + entity + ";");
                }
                pos = semi + 1;
                continue;
            }
            if (text[pos] == '>') return fail("stray '>'");
            if (!std::isspace(static_cast<unsigned char>(text[pos])) && stack.empty() && seen_root) {
                return fail("content outside root element");
            }
            ++pos;
            continue;
        }
        if (text.compare(pos, 4, "<!--") == 0) {
            const std::size_t end = text.find("-->", pos + 4);
            if (end == std::string::npos) return fail("unterminated comment");
            pos = end + 3;
            continue;
        }
        if (text.compare(pos, 2, "<?") == 0) {
            const std::size_t end = text.find("?>", pos + 2);
            if (end == std::string::npos) return fail("unterminated processing instruction");
            pos = end + 2;
            continue;
        }
        const std::size_t close = text.find('>', pos);
        if (close == std::string::npos) return fail("unterminated tag");
        std::string tag = text.substr(pos + 1, close - pos - 1);
        pos = close + 1;
        const bool closing = !tag.empty() && tag[0] == '/';
        const bool self_closing = !tag.empty() && tag.back() == '/';
        if (closing) {
            tag = tag.substr(1);
            if (stack.empty() || stack.back() != tag) return fail("mismatched </" + tag + ">");
            stack.pop_back();
            continue;
        }
        if (self_closing) tag.pop_back();
        const std::size_t name_end = tag.find_first_of(" \t\n");
        const std::string name = tag.substr(0, name_end);
        if (name.empty()) return fail("empty tag name");
        // attributes must be name="value" pairs
        std::size_t apos = name_end;
        while (apos != std::string::npos && apos < tag.size()) {
            while (apos < tag.size() && std::isspace(static_cast<unsigned char>(tag[apos]))) ++apos;
            if (apos >= tag.size()) break;
            const std::size_t eq = tag.find('=', apos);
            if (eq == std::string::npos) return fail("attribute without value in <" + name + ">");
            if (eq + 1 >= tag.size() || tag[eq + 1] != '"') return fail("unquoted attribute value");
            const std::size_t endq = tag.find('"', eq + 2);
            if (endq == std::string::npos) return fail("unterminated attribute value");
            apos = endq + 1;
        }
        if (stack.empty()) {
            if (seen_root) return fail("multiple root elements");
            seen_root = true;
        }
        if (!self_closing) stack.push_back(name);
    }
    if (!stack.empty()) return fail("unclosed <" + stack.back() + ">");
    if (!seen_root) return fail("no root element");
    return true;
}

}  // namespace oracle
