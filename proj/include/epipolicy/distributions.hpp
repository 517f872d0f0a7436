#pragma once

#include <array>
#include <cmath>

#include "epipolicy/errors.hpp"

namespace epipolicy {

// Log densities used by the state-space model. All throw DomainError when
// the argument leaves the distribution's open support, so callers surface
// boundary proportions instead of silently producing -inf or NaN.

inline double log_beta_pdf(double y, double a, double b) {
    if (a <= 0.0 || b <= 0.0) throw DomainError("log_beta_pdf: shapes must be positive");
    if (!(y > 0.0 && y < 1.0)) throw DomainError("log_beta_pdf: y must lie in (0,1)");
    return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(y) +
           (b - 1.0) * std::log1p(-y);
}

inline double log_dirichlet_pdf(const std::array<double, 3>& theta,
                                const std::array<double, 3>& alpha) {
    double alpha_sum = 0.0;
    double value = 0.0;
    for (int k = 0; k < 3; ++k) {
        if (alpha[k] <= 0.0) throw DomainError("log_dirichlet_pdf: alpha must be positive");
        if (!(theta[k] > 0.0 && theta[k] < 1.0)) {
            throw DomainError("log_dirichlet_pdf: theta must lie in the open simplex");
        }
        alpha_sum += alpha[k];
        value += (alpha[k] - 1.0) * std::log(theta[k]) - std::lgamma(alpha[k]);
    }
    return value + std::lgamma(alpha_sum);
}

inline double log_gamma_pdf(double x, double shape, double rate) {
    if (shape <= 0.0 || rate <= 0.0) throw DomainError("log_gamma_pdf: bad parameters");
    if (!(x > 0.0)) throw DomainError("log_gamma_pdf: x must be positive");
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

inline double log_lognormal_pdf(double x, double meanlog, double sdlog) {
    if (sdlog <= 0.0) throw DomainError("log_lognormal_pdf: sdlog must be positive");
    if (!(x > 0.0)) throw DomainError("log_lognormal_pdf: x must be positive");
    const double z = (std::log(x) - meanlog) / sdlog;
    return -std::log(x) - std::log(sdlog) - 0.5 * std::log(2.0 * M_PI) - 0.5 * z * z;
}

inline double log_normal_pdf(double x, double mean, double sd) {
    if (sd <= 0.0) throw DomainError("log_normal_pdf: sd must be positive");
    const double z = (x - mean) / sd;
    return -std::log(sd) - 0.5 * std::log(2.0 * M_PI) - 0.5 * z * z;
}

}  // namespace epipolicy
