#pragma once

#include "heston/model.hpp"

#include <complex>
#include <span>
#include <vector>

namespace heston {

struct PricingQuery {
    HestonParams params;
    double spot = 0.0;
    double v0 = 0.0;
    double strike = 0.0;
    double maturity = 0.0;
};

/// E[exp(i u ln S_T)] under the risk-neutral Heston dynamics, in the formulation whose
/// complex logarithm never crosses its branch cut (g built from kappa - rho sigma i u - d).
std::complex<double> char_fn(const HestonParams& params, double spot, double v0, double maturity,
                             std::complex<double> u);

struct CallPrice {
    double price = 0.0;
    double p1 = 0.0;  ///< exercise probability under the share measure
    double p2 = 0.0;  ///< exercise probability under the risk-neutral measure
    double put = 0.0; ///< from the same P1, P2
    bool tail_warning = false;  ///< the integrand tail never dropped below 1e-12
};

/// C = s e^{-r_f T} P1 - K e^{-r_d T} P2 with P_j = 1/2 + 1/pi int_0^inf Re[e^{-iu ln K} phi_j(u) / (iu)] du.
/// Throws RangeError for s <= 0, v0 < 0, K <= 0 or T <= 0.
CallPrice call_price(const PricingQuery& q);

/// Exact prices at every (s_i, v_j); value(i, j) = values[j * s.size() + i].
struct PriceSurface {
    std::vector<double> s;
    std::vector<double> v;
    std::vector<double> values;

    double value(std::size_t i, std::size_t j) const { return values[j * s.size() + i]; }
};

PriceSurface price_surface(const HestonParams& params, const OptionSpec& option, std::span<const double> s_nodes,
                           std::span<const double> v_nodes);

}  // namespace heston
