#include "heston/timestep.hpp"

#include "heston/error.hpp"
#include "heston/kernels.hpp"

#include <algorithm>
#include <string>

namespace heston {

double default_theta(Scheme scheme) {
    switch (scheme) {
    case Scheme::Do:
    case Scheme::CS: return 0.5;
    case Scheme::MCS: return 1.0 / 3.0;
    case Scheme::HV: return kThetaHV2;
    case Scheme::CN: return 0.5;
    case Scheme::RKC: return 0.0;
    }
    return 0.5;
}

std::string_view scheme_name(Scheme scheme) {
    switch (scheme) {
    case Scheme::CN: return "cn";
    case Scheme::Do: return "do";
    case Scheme::CS: return "cs";
    case Scheme::MCS: return "mcs";
    case Scheme::HV: return "hv";
    case Scheme::RKC: return "rkc";
    }
    return "?";
}

void validate(const SchemeConfig& cfg) {
    if (cfg.steps < 1) throw RangeError("number of time steps must be >= 1");
    if (!(cfg.horizon > 0.0)) throw RangeError("time horizon must be > 0");
    const bool adi = cfg.scheme == Scheme::Do || cfg.scheme == Scheme::CS || cfg.scheme == Scheme::MCS ||
                     cfg.scheme == Scheme::HV;
    if (adi && !(cfg.theta > 0.0)) throw RangeError("theta must be > 0 for ADI schemes");
    if (cfg.scheme == Scheme::RKC && !(cfg.eps > 0.0)) throw RangeError("RKC eps must be > 0");
    if (cfg.spectral_radius && !(*cfg.spectral_radius >= 0.0)) throw RangeError("spectral radius must be >= 0");
}

StepWorkspace::StepWorkspace(std::size_t m)
    : f0(m), f1(m), f2(m), g0(m), g1(m), g2(m), y0(m), y(m), yt(m), tmp(m) {}

void StepWorkspace::prepare(const OperatorSplit& split, double theta, double dt) {
    if (prepared_for(theta, dt)) return;
    if (f0.size() != split.size()) throw DimensionError("workspace does not match the operator");
    s_solve_ = split.factor_stage(Part::S, theta * dt);
    v_solve_ = split.factor_stage(Part::V, theta * dt);
    theta_ = theta;
    dt_ = dt;
    ready_ = true;
}

namespace {

void check_step(const OperatorSplit& split, std::span<const double> u_prev, std::span<double> u_next,
                const StepWorkspace& ws, double theta, double dt) {
    if (u_prev.size() != split.size() || u_next.size() != split.size()) {
        throw DimensionError("time step: vector has wrong length");
    }
    if (!ws.prepared_for(theta, dt)) throw NumericalError("workspace not prepared for this (theta, dt)");
}

/// f_j = F_j(t_prev, u); ws.y = Y0 = u + dt (f0 + f1 + f2); ws.y0 keeps a copy of Y0.
void predictor(const OperatorSplit& split, double t_prev, double dt, std::span<const double> u, StepWorkspace& ws) {
    split.apply_F(Part::Mixed, t_prev, u, ws.f0);
    split.apply_F(Part::S, t_prev, u, ws.f1);
    split.apply_F(Part::V, t_prev, u, ws.f2);
    std::copy(u.begin(), u.end(), ws.y.begin());
    kernels::axpy(ws.y, dt, ws.f0);
    kernels::axpy(ws.y, dt, ws.f1);
    kernels::axpy(ws.y, dt, ws.f2);
    std::copy(ws.y.begin(), ws.y.end(), ws.y0.begin());
}

/// Solves Y_j = Y_{j-1} + c (A_j Y_j + b_j(t_n) - base) for Y_j, in place on y.
void corrector(const OperatorSplit& split, Part part, double t_n, double c, std::span<const double> base,
               std::span<double> y, StepWorkspace& ws) {
    split.forcing_at(part, t_n, ws.tmp);
    kernels::axpy(y, c, ws.tmp);
    kernels::axpy(y, -c, base);
    ws.stage(part).solve_in_place(y);
}

void two_correctors(const OperatorSplit& split, double t_n, double c, std::span<const double> base1,
                    std::span<const double> base2, std::span<double> y, StepWorkspace& ws) {
    corrector(split, Part::S, t_n, c, base1, y, ws);
    corrector(split, Part::V, t_n, c, base2, y, ws);
}

/// Do predictor and correctors; leaves Y2 in ws.y.
void douglas_stages(const OperatorSplit& split, double t_prev, double dt, double theta, std::span<const double> u,
                    StepWorkspace& ws) {
    predictor(split, t_prev, dt, u, ws);
    two_correctors(split, t_prev + dt, theta * dt, ws.f1, ws.f2, ws.y, ws);
}

}  // namespace

void step_do(const OperatorSplit& split, double t_prev, double dt, double theta, std::span<const double> u_prev,
             std::span<double> u_next, StepWorkspace& ws) {
    check_step(split, u_prev, u_next, ws, theta, dt);
    douglas_stages(split, t_prev, dt, theta, u_prev, ws);
    std::copy(ws.y.begin(), ws.y.end(), u_next.begin());
}

void step_cs(const OperatorSplit& split, double t_prev, double dt, double theta, std::span<const double> u_prev,
             std::span<double> u_next, StepWorkspace& ws) {
    check_step(split, u_prev, u_next, ws, theta, dt);
    douglas_stages(split, t_prev, dt, theta, u_prev, ws);
    const double t_n = t_prev + dt;

    // Y~0 = Y0 + dt/2 (F0(t_n, Y2) - F0(t_{n-1}, U))
    split.apply_F(Part::Mixed, t_n, ws.y, ws.g0);
    std::copy(ws.y0.begin(), ws.y0.end(), ws.yt.begin());
    kernels::axpy(ws.yt, 0.5 * dt, ws.g0);
    kernels::axpy(ws.yt, -0.5 * dt, ws.f0);

    two_correctors(split, t_n, theta * dt, ws.f1, ws.f2, ws.yt, ws);
    std::copy(ws.yt.begin(), ws.yt.end(), u_next.begin());
}

void step_mcs(const OperatorSplit& split, double t_prev, double dt, double theta, std::span<const double> u_prev,
              std::span<double> u_next, StepWorkspace& ws) {
    check_step(split, u_prev, u_next, ws, theta, dt);
    douglas_stages(split, t_prev, dt, theta, u_prev, ws);
    const double t_n = t_prev + dt;

    split.apply_F(Part::Mixed, t_n, ws.y, ws.g0);
    split.apply_F(Part::S, t_n, ws.y, ws.g1);
    split.apply_F(Part::V, t_n, ws.y, ws.g2);

    // Y^0 = Y0 + theta dt (F0(t_n, Y2) - F0(t_{n-1}, U))
    std::copy(ws.y0.begin(), ws.y0.end(), ws.yt.begin());
    kernels::axpy(ws.yt, theta * dt, ws.g0);
    kernels::axpy(ws.yt, -theta * dt, ws.f0);

    // Y~0 = Y^0 + (1/2 - theta) dt (F(t_n, Y2) - F(t_{n-1}, U))
    const double w = (0.5 - theta) * dt;
    if (w != 0.0) {
        kernels::axpby(ws.tmp, 1.0, ws.g0, -1.0, ws.f0);
        kernels::axpy(ws.tmp, 1.0, ws.g1);
        kernels::axpy(ws.tmp, -1.0, ws.f1);
        kernels::axpy(ws.tmp, 1.0, ws.g2);
        kernels::axpy(ws.tmp, -1.0, ws.f2);
        kernels::axpy(ws.yt, w, ws.tmp);
    }

    two_correctors(split, t_n, theta * dt, ws.f1, ws.f2, ws.yt, ws);
    std::copy(ws.yt.begin(), ws.yt.end(), u_next.begin());
}

void step_hv(const OperatorSplit& split, double t_prev, double dt, double theta, std::span<const double> u_prev,
             std::span<double> u_next, StepWorkspace& ws) {
    check_step(split, u_prev, u_next, ws, theta, dt);
    douglas_stages(split, t_prev, dt, theta, u_prev, ws);
    const double t_n = t_prev + dt;

    split.apply_F(Part::Mixed, t_n, ws.y, ws.g0);
    split.apply_F(Part::S, t_n, ws.y, ws.g1);
    split.apply_F(Part::V, t_n, ws.y, ws.g2);

    // Y~0 = Y0 + dt/2 (F(t_n, Y2) - F(t_{n-1}, U))
    std::copy(ws.y0.begin(), ws.y0.end(), ws.yt.begin());
    const double h = 0.5 * dt;
    kernels::axpy(ws.yt, h, ws.g0);
    kernels::axpy(ws.yt, -h, ws.f0);
    kernels::axpy(ws.yt, h, ws.g1);
    kernels::axpy(ws.yt, -h, ws.f1);
    kernels::axpy(ws.yt, h, ws.g2);
    kernels::axpy(ws.yt, -h, ws.f2);

    // correctors difference against F_j(t_n, Y2)
    two_correctors(split, t_n, theta * dt, ws.g1, ws.g2, ws.yt, ws);
    std::copy(ws.yt.begin(), ws.yt.end(), u_next.begin());
}

void step_cn(const OperatorSplit& split, double t_prev, double dt, std::span<const double> u_prev,
             std::span<double> u_next, const FullFactorization& full, StepWorkspace& ws) {
    if (u_prev.size() != split.size() || u_next.size() != split.size()) {
        throw DimensionError("time step: vector has wrong length");
    }
    if (full.coefficient() != 0.5 * dt) throw NumericalError("CN factorization does not match dt/2");
    split.apply_F(Part::Full, t_prev, u_prev, ws.tmp);
    kernels::axpby(ws.y, 1.0, u_prev, 0.5 * dt, ws.tmp);
    split.forcing_at(Part::Full, t_prev + dt, ws.tmp);
    kernels::axpy(ws.y, 0.5 * dt, ws.tmp);
    full.solve_in_place(ws.y);
    std::copy(ws.y.begin(), ws.y.end(), u_next.begin());
}

}  // namespace heston
