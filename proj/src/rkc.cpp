#include "heston/error.hpp"
#include "heston/kernels.hpp"
#include "heston/timestep.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace heston {

namespace {

/// Chebyshev polynomials T_j and their first two derivatives at w, j = 0..s.
struct Chebyshev {
    std::vector<double> t, dt, ddt;

    Chebyshev(int s, double w) : t(s + 1), dt(s + 1), ddt(s + 1) {
        t[0] = 1.0;
        dt[0] = 0.0;
        ddt[0] = 0.0;
        if (s >= 1) {
            t[1] = w;
            dt[1] = 1.0;
            ddt[1] = 0.0;
        }
        for (int j = 2; j <= s; ++j) {
            t[j] = 2.0 * w * t[j - 1] - t[j - 2];
            dt[j] = 2.0 * t[j - 1] + 2.0 * w * dt[j - 1] - dt[j - 2];
            ddt[j] = 4.0 * dt[j - 1] + 2.0 * w * ddt[j - 1] - ddt[j - 2];
        }
    }
};

/// Coefficients of the damped second-order RKC recurrence
///   Y_1 = Y_0 + mu~_1 dt F(t, Y_0)
///   Y_j = (1 - mu_j - nu_j) Y_0 + mu_j Y_{j-1} + nu_j Y_{j-2}
///         + mu~_j dt F(t + c_{j-1} dt, Y_{j-1}) + gamma~_j dt F(t, Y_0)
struct RkcCoefficients {
    std::vector<double> mu, nu, mu_t, gamma_t, c;
    double w0 = 0.0, w1 = 0.0;
    std::vector<double> a, b;

    RkcCoefficients(int s, double eps)
        : mu(s + 1), nu(s + 1), mu_t(s + 1), gamma_t(s + 1), c(s + 1), a(s + 1), b(s + 1) {
        w0 = 1.0 + eps / (static_cast<double>(s) * s);
        const Chebyshev ch(s, w0);
        w1 = ch.dt[s] / ch.ddt[s];

        for (int j = 2; j <= s; ++j) b[j] = ch.ddt[j] / (ch.dt[j] * ch.dt[j]);
        b[0] = b[1] = b[2];
        for (int j = 0; j <= s; ++j) a[j] = 1.0 - b[j] * ch.t[j];

        mu_t[1] = b[1] * w1;
        for (int j = 2; j <= s; ++j) {
            mu[j] = 2.0 * b[j] * w0 / b[j - 1];
            nu[j] = -b[j] / b[j - 2];
            mu_t[j] = 2.0 * b[j] * w1 / b[j - 1];
            gamma_t[j] = -a[j - 1] * mu_t[j];
        }

        c[0] = 0.0;
        for (int j = 2; j <= s; ++j) c[j] = w1 * ch.ddt[j] / ch.dt[j];
        c[1] = c[2] / ch.dt[2];
        c[s] = 1.0;
    }
};

}  // namespace

int rkc_stage_count(double dt, double spectral_radius) {
    if (!(dt > 0.0) || !(spectral_radius >= 0.0)) throw RangeError("RKC stage count needs dt > 0 and r >= 0");
    const double bound = std::sqrt(1.0 + 3.0 * dt * spectral_radius);
    return std::max(2, static_cast<int>(std::ceil(bound)));
}

double rkc_amplification(int stages, double eps, double z) {
    if (stages < 2) throw RangeError("RKC needs at least two stages");
    const RkcCoefficients k(stages, eps);
    const Chebyshev ch(stages, k.w0 + k.w1 * z);
    return k.a[stages] + k.b[stages] * ch.t[stages];
}

void step_rkc(const OperatorSplit& split, double t_prev, double dt, int stages, double eps,
              std::span<const double> u_prev, std::span<double> u_next, StepWorkspace& ws) {
    if (stages < 2) throw RangeError("RKC needs at least two stages");
    if (u_prev.size() != split.size() || u_next.size() != split.size()) {
        throw DimensionError("time step: vector has wrong length");
    }
    const RkcCoefficients k(stages, eps);

    // f0: F(t, Y0); y0: Y_{j-2}; y: Y_{j-1}; yt: Y_j; g0: F(t + c_{j-1} dt, Y_{j-1})
    split.apply_F(Part::Full, t_prev, u_prev, ws.f0);
    std::copy(u_prev.begin(), u_prev.end(), ws.y0.begin());
    kernels::axpby(ws.y, 1.0, u_prev, k.mu_t[1] * dt, ws.f0);

    for (int j = 2; j <= stages; ++j) {
        split.apply_F(Part::Full, t_prev + k.c[j - 1] * dt, ws.y, ws.g0);
        kernels::axpby(ws.yt, 1.0 - k.mu[j] - k.nu[j], u_prev, k.mu[j], ws.y);
        kernels::axpy(ws.yt, k.nu[j], ws.y0);
        kernels::axpy(ws.yt, k.mu_t[j] * dt, ws.g0);
        kernels::axpy(ws.yt, k.gamma_t[j] * dt, ws.f0);
        std::swap(ws.y0, ws.y);
        std::swap(ws.y, ws.yt);
    }
    std::copy(ws.y.begin(), ws.y.end(), u_next.begin());
}

}  // namespace heston
