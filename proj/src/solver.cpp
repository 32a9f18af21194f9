#include "heston/error.hpp"
#include "heston/kernels.hpp"
#include "heston/timestep.hpp"

#include <optional>
#include <vector>

namespace heston {

SpectralEstimate estimate_spectral_radius(const OperatorSplit& split) {
    const auto& a = split.full_matrix();
    return spectral_radius([&a](std::span<const double> x, std::span<double> y) { a.multiply(x, y); }, split.size());
}

std::vector<double> damped_start(const OperatorSplit& split, double dt) {
    if (!(dt > 0.0)) throw RangeError("damping needs dt > 0");
    const double h = 0.5 * dt;
    const FullFactorization full = split.factor_full(h);
    std::vector<double> u(split.initial().begin(), split.initial().end());
    std::vector<double> b(split.size());
    for (int k = 1; k <= 2; ++k) {
        split.forcing_at(Part::Full, k * h, b);
        kernels::axpy(u, h, b);
        full.solve_in_place(u);
    }
    return u;
}

std::vector<double> integrate(const OperatorSplit& split, const SchemeConfig& cfg, double t0,
                              std::span<const double> start, int steps) {
    validate(cfg);
    if (start.size() != split.size()) throw DimensionError("start vector has wrong length");
    if (steps < 0) throw RangeError("negative step count");

    const double dt = cfg.dt();
    StepWorkspace ws(split.size());
    std::vector<double> u(start.begin(), start.end());
    std::vector<double> next(split.size());
    if (steps == 0) return u;

    std::optional<FullFactorization> full;
    int stages = 0;
    switch (cfg.scheme) {
    case Scheme::CN: full.emplace(split.factor_full(0.5 * dt)); break;
    case Scheme::RKC: {
        const double r = cfg.spectral_radius ? *cfg.spectral_radius : estimate_spectral_radius(split).radius;
        stages = rkc_stage_count(dt, r);
        break;
    }
    default: ws.prepare(split, cfg.theta, dt); break;
    }

    for (int n = 1; n <= steps; ++n) {
        const double t_prev = t0 + (n - 1) * dt;
        switch (cfg.scheme) {
        case Scheme::CN: step_cn(split, t_prev, dt, u, next, *full, ws); break;
        case Scheme::Do: step_do(split, t_prev, dt, cfg.theta, u, next, ws); break;
        case Scheme::CS: step_cs(split, t_prev, dt, cfg.theta, u, next, ws); break;
        case Scheme::MCS: step_mcs(split, t_prev, dt, cfg.theta, u, next, ws); break;
        case Scheme::HV: step_hv(split, t_prev, dt, cfg.theta, u, next, ws); break;
        case Scheme::RKC: step_rkc(split, t_prev, dt, stages, cfg.eps, u, next, ws); break;
        }
        std::swap(u, next);
    }
    return u;
}

std::vector<double> solve(const OperatorSplit& split, const SchemeConfig& cfg) {
    validate(cfg);
    if (cfg.damping) {
        const auto start = damped_start(split, cfg.dt());
        return integrate(split, cfg, cfg.dt(), start, cfg.steps - 1);
    }
    return integrate(split, cfg, 0.0, split.initial(), cfg.steps);
}

}  // namespace heston
