#pragma once

#include "heston/operator_split.hpp"

#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace heston {

enum class Scheme { CN, Do, CS, MCS, HV, RKC };

inline const double kThetaHV1 = 1.0 - 0.5 * std::sqrt(2.0);
inline const double kThetaHV2 = 0.5 + std::sqrt(3.0) / 6.0;

/// Do 1/2, CS 1/2, MCS 1/3, HV 1/2 + sqrt(3)/6; CN and RKC ignore theta.
double default_theta(Scheme scheme);
std::string_view scheme_name(Scheme scheme);

struct SchemeConfig {
    Scheme scheme = Scheme::MCS;
    double theta = 1.0 / 3.0;
    double eps = 10.0;                      ///< RKC damping parameter
    bool damping = false;                   ///< two backward-Euler half steps at t = 0
    int steps = 1;                          ///< N
    double horizon = 1.0;                   ///< T
    std::optional<double> spectral_radius;  ///< r[A] for RKC; estimated by power iteration when empty

    double dt() const { return horizon / steps; }
};

/// Throws RangeError: N < 1, T <= 0, theta <= 0 for ADI schemes, eps <= 0 for RKC.
void validate(const SchemeConfig& cfg);

/// Stage vectors and the two line factorizations of (I - theta dt A_j), j = 1, 2.
class StepWorkspace {
public:
    explicit StepWorkspace(std::size_t m);

    /// Refactors only when (theta, dt) differ from the previous call.
    void prepare(const OperatorSplit& split, double theta, double dt);
    bool prepared_for(double theta, double dt) const { return ready_ && theta == theta_ && dt == dt_; }

    const LineFactorization& stage(Part part) const { return part == Part::S ? s_solve_ : v_solve_; }

    // Scratch vectors; the schemes document which ones they use.
    std::vector<double> f0, f1, f2;  // F_j(t_{n-1}, U_{n-1})
    std::vector<double> g0, g1, g2;  // F_j(t_n, Y_2)
    std::vector<double> y0, y, yt, tmp;

private:
    bool ready_ = false;
    double theta_ = 0.0;
    double dt_ = 0.0;
    LineFactorization s_solve_;
    LineFactorization v_solve_;
};

/// Trapezoidal rule. `full` must factor (I - dt/2 A).
void step_cn(const OperatorSplit& split, double t_prev, double dt, std::span<const double> u_prev,
             std::span<double> u_next, const FullFactorization& full, StepWorkspace& ws);

/// The ADI steps require ws.prepare(split, theta, dt) beforehand.
void step_do(const OperatorSplit& split, double t_prev, double dt, double theta, std::span<const double> u_prev,
             std::span<double> u_next, StepWorkspace& ws);
void step_cs(const OperatorSplit& split, double t_prev, double dt, double theta, std::span<const double> u_prev,
             std::span<double> u_next, StepWorkspace& ws);
void step_mcs(const OperatorSplit& split, double t_prev, double dt, double theta, std::span<const double> u_prev,
              std::span<double> u_next, StepWorkspace& ws);
void step_hv(const OperatorSplit& split, double t_prev, double dt, double theta, std::span<const double> u_prev,
             std::span<double> u_next, StepWorkspace& ws);

/// nu = max(2, ceil(sqrt(1 + 3 dt r)))
int rkc_stage_count(double dt, double spectral_radius);

/// One step of the damped second-order Runge-Kutta-Chebyshev method with `stages` stages.
void step_rkc(const OperatorSplit& split, double t_prev, double dt, int stages, double eps,
              std::span<const double> u_prev, std::span<double> u_next, StepWorkspace& ws);

/// Stability polynomial R(z) of the RKC step, evaluated through its Chebyshev form.
double rkc_amplification(int stages, double eps, double z);

SpectralEstimate estimate_spectral_radius(const OperatorSplit& split);

/// Two backward-Euler steps of size dt/2 from U0 with the unsplit operator.
std::vector<double> damped_start(const OperatorSplit& split, double dt);

/// Advances `start` (the solution at time t0) by `steps` steps of cfg.scheme with step cfg.dt().
/// Ignores cfg.damping.
std::vector<double> integrate(const OperatorSplit& split, const SchemeConfig& cfg, double t0,
                              std::span<const double> start, int steps);

/// U_N: with damping, two half-step backward-Euler steps then N-1 steps from t = dt;
/// otherwise N steps from t = 0.
std::vector<double> solve(const OperatorSplit& split, const SchemeConfig& cfg);

}  // namespace heston
