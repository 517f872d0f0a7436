#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "epipolicy/errors.hpp"

namespace epipolicy {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Standard normal quantile, Wichura's algorithm AS 241 (PPND16).
// Relative accuracy about 1e-15 over (0, 1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                    3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                  4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                  2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                  5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

namespace detail {

// Continued-fraction core of the regularized incomplete beta function
// (modified Lentz's method).
inline double betacf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double fpmin = std::numeric_limits<double>::min() / eps;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
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
        if (std::fabs(del - 1.0) <= eps) break;
    }
    return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw DomainError("incomplete_beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::betacf(a, b, x) / a;
    }
    return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

// Two-sided p-value for a t statistic with `dof` degrees of freedom:
// P(|T| >= |t|) = I_{dof/(dof+t^2)}(dof/2, 1/2).
inline double student_t_two_sided_p(double t, double dof) {
    if (dof <= 0.0) throw DomainError("student_t_two_sided_p: dof must be positive");
    if (!std::isfinite(t)) return 0.0;
    return incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

// Quantile with linear interpolation between order statistics (R type 7).
inline double quantile_type7(std::vector<double> values, double p) {
    if (values.empty()) throw EmptyInputError("quantile: empty input");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: p outside [0,1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

inline double median(std::vector<double> values) { return quantile_type7(std::move(values), 0.5); }

// Split-chain effective sample size. Each chain is split in half, then the
// combined autocorrelation is estimated from within/between variances and
// summed with Geyer's initial monotone positive sequence.
inline double effective_sample_size(const std::vector<std::vector<double>>& chains) {
    std::vector<std::vector<double>> split;
    for (const auto& chain : chains) {
        const std::size_t half = chain.size() / 2;
        if (half < 2) continue;
        split.emplace_back(chain.begin(), chain.begin() + half);
        split.emplace_back(chain.begin() + half, chain.begin() + 2 * half);
    }
    if (split.empty()) return 0.0;
    const std::size_t m = split.size();
    const std::size_t n = split[0].size();

    std::vector<double> means(m, 0.0);
    std::vector<double> vars(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        for (double v : split[j]) means[j] += v;
        means[j] /= static_cast<double>(n);
        for (double v : split[j]) vars[j] += (v - means[j]) * (v - means[j]);
        vars[j] /= static_cast<double>(n - 1);
    }
    double grand = 0.0;
    for (double mu : means) grand += mu;
    grand /= static_cast<double>(m);
    double b = 0.0;  // between-chain variance * n
    for (double mu : means) b += (mu - grand) * (mu - grand);
    b *= static_cast<double>(n) / std::max<double>(1.0, static_cast<double>(m) - 1.0);
    double w = 0.0;
    for (double v : vars) w += v;
    w /= static_cast<double>(m);
    if (w <= 0.0) return 0.0;
    const double var_plus = (static_cast<double>(n - 1) / n) * w + b / static_cast<double>(n);

    auto lag_autocov = [&](std::size_t lag) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t t = lag; t < n; ++t) {
                acc += (split[j][t] - means[j]) * (split[j][t - lag] - means[j]);
            }
        }
        return acc / static_cast<double>(m * (n - lag));
    };

    double rho_sum = 0.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (std::size_t lag = 1; lag + 1 < n; lag += 2) {
        const double rho_a = 1.0 - (w - lag_autocov(lag)) / var_plus;
        const double rho_b = 1.0 - (w - lag_autocov(lag + 1)) / var_plus;
        double pair = rho_a + rho_b;
        if (pair < 0.0) break;
        pair = std::min(pair, prev_pair);  // enforce monotone decrease
        prev_pair = pair;
        rho_sum += pair;
    }
    const double tau = 1.0 + 2.0 * rho_sum;
    return static_cast<double>(m * n) / std::max(tau, 1e-12);
}

}  // namespace epipolicy
