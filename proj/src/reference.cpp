#include "heston/reference.hpp"

#include "heston/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace heston {

std::complex<double> char_fn(const HestonParams& p, double spot, double v0, double maturity, std::complex<double> u) {
    using namespace std::complex_literals;
    const std::complex<double> iu = 1i * u;
    const double sigma2 = p.sigma * p.sigma;
    const std::complex<double> beta = p.kappa - p.rho * p.sigma * iu;
    const std::complex<double> d = std::sqrt(beta * beta + sigma2 * (iu + u * u));
    const std::complex<double> g = (beta - d) / (beta + d);
    const std::complex<double> e = std::exp(-d * maturity);
    const std::complex<double> c = iu * (std::log(spot) + (p.rd - p.rf) * maturity) +
                                   p.kappa * p.eta / sigma2 * ((beta - d) * maturity - 2.0 * std::log((1.0 - g * e) / (1.0 - g)));
    const std::complex<double> dd = (beta - d) / sigma2 * (1.0 - e) / (1.0 - g * e);
    return std::exp(c + v0 * dd);
}

namespace {

constexpr double kTailTolerance = 1e-12;
constexpr double kAbsTolerance = 1e-12;
constexpr double kInitialCutoff = 200.0;
constexpr int kMaxCutoffDoublings = 12;
constexpr int kMaxIntervals = 4000;

/// Both inversion integrands at u packed as (P1 integrand) + i (P2 integrand), so one
/// Gauss-Kronrod pass handles the pair and its error estimate covers both.
struct Integrands {
    const PricingQuery& q;
    double log_k;
    std::complex<double> forward;  // phi(-i) = s e^{(rd - rf) T}

    std::complex<double> operator()(double u) const {
        using namespace std::complex_literals;
        const std::complex<double> kernel = std::exp(-1i * u * log_k) / (1i * u);
        const auto phi1 = char_fn(q.params, q.spot, q.v0, q.maturity, std::complex<double>(u, -1.0)) / forward;
        const auto phi2 = char_fn(q.params, q.spot, q.v0, q.maturity, std::complex<double>(u, 0.0));
        return {std::real(kernel * phi1), std::real(kernel * phi2)};
    }
};

struct Piece {
    double a, b;
    std::complex<double> value;
    double error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece integrate_piece(const Integrands& f, double a, double b) {
    using boost::math::quadrature::gauss_kronrod;
    Piece p{a, b, {}, 0.0};
    p.value = gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &p.error);
    return p;
}

}  // namespace

CallPrice call_price(const PricingQuery& q) {
    if (!(q.spot > 0.0)) throw RangeError("spot must be > 0");
    if (!(q.v0 >= 0.0)) throw RangeError("initial variance must be >= 0");
    if (!(q.strike > 0.0)) throw RangeError("strike must be > 0");
    if (!(q.maturity > 0.0)) throw RangeError("maturity must be > 0");

    const Integrands f{q, std::log(q.strike), q.spot * std::exp((q.params.rd - q.params.rf) * q.maturity)};

    CallPrice out;
    double cutoff = kInitialCutoff;
    int doublings = 0;
    while (true) {
        const auto tail = f(cutoff);
        if (std::max(std::abs(tail.real()), std::abs(tail.imag())) < kTailTolerance) break;
        if (++doublings > kMaxCutoffDoublings) {
            out.tail_warning = true;
            break;
        }
        cutoff *= 2.0;
    }

    // Global adaptive bisection on the piece with the largest Kronrod error estimate.
    std::priority_queue<Piece> pieces;
    const int initial = 8;
    double total_err = 0.0;
    for (int k = 0; k < initial; ++k) {
        auto p = integrate_piece(f, cutoff * k / initial, cutoff * (k + 1) / initial);
        total_err += p.error;
        pieces.push(p);
    }
    while (total_err > kAbsTolerance && static_cast<int>(pieces.size()) < kMaxIntervals) {
        const Piece worst = pieces.top();
        pieces.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = integrate_piece(f, worst.a, mid);
        auto right = integrate_piece(f, mid, worst.b);
        total_err += left.error + right.error - worst.error;
        pieces.push(left);
        pieces.push(right);
    }
    std::complex<double> integral{};
    while (!pieces.empty()) {
        integral += pieces.top().value;
        pieces.pop();
    }

    out.p1 = 0.5 + integral.real() / std::numbers::pi;
    out.p2 = 0.5 + integral.imag() / std::numbers::pi;
    const double fwd_s = q.spot * std::exp(-q.params.rf * q.maturity);
    const double disc_k = q.strike * std::exp(-q.params.rd * q.maturity);
    out.price = fwd_s * out.p1 - disc_k * out.p2;
    out.put = disc_k * (1.0 - out.p2) - fwd_s * (1.0 - out.p1);
    return out;
}

PriceSurface price_surface(const HestonParams& params, const OptionSpec& option, std::span<const double> s_nodes,
                           std::span<const double> v_nodes) {
    if (option.is_barrier()) throw DomainError("the semi-analytic reference prices European calls only");
    PriceSurface out{{s_nodes.begin(), s_nodes.end()}, {v_nodes.begin(), v_nodes.end()}, {}};
    out.values.reserve(s_nodes.size() * v_nodes.size());
    for (const double v : v_nodes) {
        for (const double s : s_nodes) {
            out.values.push_back(call_price({params, s, v, option.strike, option.maturity}).price);
        }
    }
    return out;
}

}  // namespace heston
