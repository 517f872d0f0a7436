#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "epipolicy/errors.hpp"

namespace epipolicy {

// Susceptible/infected/removed proportions. Valid states lie on the unit
// simplex: each component in [0,1], components summing to 1 within 1e-12.
struct Theta {
    double s = 1.0;
    double i = 0.0;
    double r = 0.0;

    std::array<double, 3> as_array() const { return {s, i, r}; }

    bool on_simplex(double tol = 1e-12) const {
        return s >= -tol && s <= 1.0 + tol && i >= -tol && i <= 1.0 + tol && r >= -tol &&
               r <= 1.0 + tol && std::fabs(s + i + r - 1.0) <= tol;
    }

    void require_valid() const {
        if (!on_simplex()) throw DomainError("Theta is not on the unit simplex");
    }
};

struct SirParams {
    double beta = 0.0;   // transmission rate per day
    double gamma = 0.0;  // removal rate per day

    void require_valid() const {
        if (beta < 0.0 || gamma < 0.0) throw DomainError("SIR rates must be nonnegative");
    }
};

namespace detail {

struct SirDeriv {
    double ds, di, dr;
};

inline SirDeriv sir_deriv(const Theta& th, const SirParams& p) {
    const double flow_in = p.beta * th.s * th.i;
    const double flow_out = p.gamma * th.i;
    return {-flow_in, flow_in - flow_out, flow_out};
}

}  // namespace detail

// One classical fourth-order Runge-Kutta step of
//   dS/dt = -beta*S*I,  dI/dt = beta*S*I - gamma*I,  dR/dt = gamma*I.
// The result is clamped to [0,1] componentwise and renormalized to sum 1,
// so iterated steps stay on the simplex.
inline Theta rk4_step(const Theta& theta, const SirParams& params, double dt) {
    theta.require_valid();
    params.require_valid();
    if (!(dt > 0.0)) throw DomainError("rk4_step: dt must be positive");

    using detail::sir_deriv;
    const auto k1 = sir_deriv(theta, params);
    const Theta t2{theta.s + 0.5 * dt * k1.ds, theta.i + 0.5 * dt * k1.di,
                   theta.r + 0.5 * dt * k1.dr};
    const auto k2 = sir_deriv(t2, params);
    const Theta t3{theta.s + 0.5 * dt * k2.ds, theta.i + 0.5 * dt * k2.di,
                   theta.r + 0.5 * dt * k2.dr};
    const auto k3 = sir_deriv(t3, params);
    const Theta t4{theta.s + dt * k3.ds, theta.i + dt * k3.di, theta.r + dt * k3.dr};
    const auto k4 = sir_deriv(t4, params);

    Theta out{theta.s + dt / 6.0 * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds),
              theta.i + dt / 6.0 * (k1.di + 2.0 * k2.di + 2.0 * k3.di + k4.di),
              theta.r + dt / 6.0 * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr)};

    out.s = std::min(1.0, std::max(0.0, out.s));
    out.i = std::min(1.0, std::max(0.0, out.i));
    out.r = std::min(1.0, std::max(0.0, out.r));
    const double total = out.s + out.i + out.r;
    out.s /= total;
    out.i /= total;
    out.r /= total;
    return out;
}

// Iterated daily steps; result has days + 1 states including theta0.
inline std::vector<Theta> simulate(const Theta& theta0, const SirParams& params, int days) {
    if (days < 0) throw DomainError("simulate: days must be nonnegative");
    std::vector<Theta> path;
    path.reserve(static_cast<std::size_t>(days) + 1);
    path.push_back(theta0);
    for (int d = 0; d < days; ++d) {
        path.push_back(rk4_step(path.back(), params, 1.0));
    }
    return path;
}

}  // namespace epipolicy
