#pragma once

#include <optional>

namespace heston {

/// Coefficients of the Heston PDE. Market price of volatility risk is zero.
struct HestonParams {
    double kappa = 0.0;  ///< mean-reversion rate
    double eta = 0.0;    ///< long-term mean of the variance
    double sigma = 0.0;  ///< volatility of variance
    double rho = 0.0;    ///< correlation, in [-1, 1]
    double rd = 0.0;     ///< domestic rate
    double rf = 0.0;     ///< foreign rate

    bool feller_holds() const { return 2.0 * kappa * eta > sigma * sigma; }

    friend bool operator==(const HestonParams&, const HestonParams&) = default;
};

enum class OptionKind { EuropeanCall, DownAndOutCall };

struct OptionSpec {
    OptionKind kind = OptionKind::EuropeanCall;
    double strike = 0.0;
    double maturity = 0.0;
    std::optional<double> barrier;  ///< present iff kind == DownAndOutCall

    bool is_barrier() const { return kind == OptionKind::DownAndOutCall; }
    /// Lower end of the s-domain: the barrier, or zero for a plain call.
    double lower_s() const { return barrier.value_or(0.0); }

    friend bool operator==(const OptionSpec&, const OptionSpec&) = default;
};

/// Truncated computational domain and mesh concentration parameters.
struct DomainSpec {
    double s_max = 0.0;   ///< S
    double v_max = 0.0;   ///< V
    double s_conc = 0.0;  ///< c, s-mesh concentration near the strike
    double v_conc = 0.0;  ///< d, v-mesh concentration near v = 0

    friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

struct BenchmarkCase {
    HestonParams params;
    OptionSpec option;
    DomainSpec domain;
};

/// S = 8K (14K for barrier options), V = 5, c = K/5, d = V/500.
DomainSpec default_domain(const OptionSpec& option);

/// Throws FellerViolation, RangeError or BarrierError.
void validate(const HestonParams& params, const OptionSpec& option);
void validate(const DomainSpec& domain, const OptionSpec& option);

/// The four parameter sets of the benchmark study (European calls, K = 100).
BenchmarkCase benchmark_case(int id);

/// The down-and-out variant used for barrier studies: B = 95, S = 14K.
/// With `validation_variant` the correlation is zeroed and r_d = r_f = 0.03.
BenchmarkCase barrier_case(int id, double barrier, bool validation_variant);

double payoff(const OptionSpec& option, double s);

/// Boundary data at time t. Dirichlet on the lower s-edge is always zero.
struct BoundaryValues {
    double lower_s = 0.0;       ///< at s = 0 (or s = B)
    double neumann_upper = 0.0; ///< du/ds at s = S
    double discount = 1.0;      ///< e^{-r_f t}
    double lower_edge = 0.0;    ///< s-offset of the v = V datum (0 or B)

    /// u(s, V, t)
    double upper_v(double s) const { return (s - lower_edge) * discount; }
};

BoundaryValues boundary_values(const HestonParams& params, const OptionSpec& option, double t);

}  // namespace heston
