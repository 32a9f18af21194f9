#include "heston/model.hpp"

#include "heston/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace heston {

DomainSpec default_domain(const OptionSpec& option) {
    const double k = option.strike;
    const double v_max = 5.0;
    return DomainSpec{option.is_barrier() ? 14.0 * k : 8.0 * k, v_max, k / 5.0, v_max / 500.0};
}

void validate(const HestonParams& p, const OptionSpec& option) {
    auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!positive(p.kappa)) throw RangeError("kappa must be > 0");
    if (!positive(p.eta)) throw RangeError("eta must be > 0");
    if (!positive(p.sigma)) throw RangeError("sigma must be > 0");
    if (!std::isfinite(p.rho) || p.rho < -1.0 || p.rho > 1.0) throw RangeError("rho must lie in [-1, 1]");
    if (!std::isfinite(p.rd) || !std::isfinite(p.rf)) throw RangeError("rates must be finite");
    if (!positive(option.strike)) throw RangeError("strike must be > 0");
    if (!positive(option.maturity)) throw RangeError("maturity must be > 0");

    if (option.is_barrier()) {
        if (!option.barrier) throw BarrierError("down-and-out call requires a barrier");
        const double b = *option.barrier;
        if (!(b > 0.0 && b < option.strike)) throw BarrierError("barrier must lie in (0, K)");
    } else if (option.barrier) {
        throw BarrierError("barrier given for a European call");
    }

    if (!p.feller_holds()) {
        throw FellerViolation("Feller condition 2*kappa*eta > sigma^2 violated: 2*kappa*eta = " +
                              std::to_string(2.0 * p.kappa * p.eta) +
                              ", sigma^2 = " + std::to_string(p.sigma * p.sigma));
    }
}

void validate(const DomainSpec& d, const OptionSpec& option) {
    if (!(d.s_max > option.strike)) throw RangeError("S must exceed the strike");
    if (option.barrier && !(d.s_max > *option.barrier)) throw RangeError("S must exceed the barrier");
    if (!(d.v_max > 0.0)) throw RangeError("V must be > 0");
    if (!(d.s_conc > 0.0)) throw RangeError("c must be > 0");
    if (!(d.v_conc > 0.0)) throw RangeError("d must be > 0");
}

BenchmarkCase benchmark_case(int id) {
    HestonParams p;
    double maturity = 0.0;
    switch (id) {
    case 1: p = {1.5, 0.04, 0.3, -0.9, 0.025, 0.0}; maturity = 1.0; break;
    case 2: p = {3.0, 0.12, 0.04, 0.6, 0.01, 0.04}; maturity = 1.0; break;
    case 3: p = {0.6067, 0.0707, 0.2928, -0.7571, 0.03, 0.0}; maturity = 3.0; break;
    case 4: p = {2.5, 0.06, 0.5, -0.1, 0.0507, 0.0469}; maturity = 0.25; break;
    default: throw UnknownCase("unknown benchmark case " + std::to_string(id) + " (expected 1..4)");
    }
    OptionSpec option{OptionKind::EuropeanCall, 100.0, maturity, std::nullopt};
    return {p, option, default_domain(option)};
}

BenchmarkCase barrier_case(int id, double barrier, bool validation_variant) {
    BenchmarkCase c = benchmark_case(id);
    c.option.kind = OptionKind::DownAndOutCall;
    c.option.barrier = barrier;
    if (validation_variant) {
        c.params.rho = 0.0;
        c.params.rd = 0.03;
        c.params.rf = 0.03;
    }
    c.domain = default_domain(c.option);
    validate(c.params, c.option);
    return c;
}

double payoff(const OptionSpec& option, double s) {
    if (s < 0.0) throw DomainError("asset price must be >= 0");
    if (option.is_barrier() && option.barrier && s < *option.barrier) {
        throw DomainError("asset price below the barrier");
    }
    return std::max(0.0, s - option.strike);
}

BoundaryValues boundary_values(const HestonParams& params, const OptionSpec& option, double t) {
    const double discount = std::exp(-params.rf * t);
    return BoundaryValues{0.0, discount, discount, option.lower_s()};
}

}  // namespace heston
