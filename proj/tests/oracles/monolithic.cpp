#include "monolithic.hpp"

#include <array>
#include <cmath>

namespace oracle {

namespace {

// Weights for offsets -1, 0, +1 from the left and right widths.
std::array<double, 3> first_central(double hl, double hr) {
    return {-hr / (hl * (hl + hr)), (hr - hl) / (hl * hr), hl / (hr * (hl + hr))};
}

std::array<double, 3> second_central(double hl, double hr) {
    return {2.0 / (hl * (hl + hr)), -2.0 / (hl * hr), 2.0 / (hr * (hl + hr))};
}

// Offsets 0, +1, +2.
std::array<double, 3> first_forward(double h1, double h2) {
    return {-(2 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2), -h1 / (h2 * (h1 + h2))};
}

// Offsets -2, -1, 0; h0 is the farther width.
std::array<double, 3> first_backward(double h0, double h1) {
    return {h1 / (h0 * (h0 + h1)), -(h0 + h1) / (h0 * h1), (h0 + 2 * h1) / (h1 * (h0 + h1))};
}

}  // namespace

std::vector<double> heston_rhs(const heston::TensorGrid& grid, const heston::HestonParams& p,
                               const heston::OptionSpec& option, double t, std::span<const double> w,
                               std::vector<double>* row_scale) {
    const auto& s = grid.s();
    const auto& v = grid.v();
    const std::size_t m1 = grid.m1(), m2 = grid.m2();
    const double disc = std::exp(-p.rf * t);
    const double lower = option.lower_s();

    // Grid function on all nodes, Dirichlet edges filled in.
    auto U = [&](std::size_t i, std::size_t j) -> double {
        if (j == m2) return (s[i] - lower) * disc;
        if (i == 0) return 0.0;
        return w[(i - 1) + j * m1];
    };

    std::vector<double> out(grid.unknowns());
    if (row_scale) row_scale->assign(grid.unknowns(), 0.0);
    for (std::size_t j = 0; j < m2; ++j) {
        for (std::size_t i = 1; i <= m1; ++i) {
            const double si = s[i], vj = v[j];
            double acc = 0.0, mag = 0.0;
            auto term = [&](double x) {
                acc += x;
                mag += std::abs(x);
            };

            // s-derivatives
            if (i < m1) {
                const double hl = s[i] - s[i - 1], hr = s[i + 1] - s[i];
                const auto d1 = first_central(hl, hr);
                const auto d2 = second_central(hl, hr);
                for (int k = 0; k < 3; ++k) {
                    term(0.5 * si * si * vj * d2[k] * U(i + k - 1, j));
                    term((p.rd - p.rf) * si * d1[k] * U(i + k - 1, j));
                }
            } else {
                // Neumann du/ds = e^{-rf t} at s = S; ghost node one width beyond.
                const double h = s[m1] - s[m1 - 1];
                const double ghost = U(m1, j) + h * disc;
                term(0.5 * si * si * vj * (U(m1 - 1, j) - 2 * U(m1, j) + ghost) / (h * h));
                term((p.rd - p.rf) * si * disc);
            }

            // v-derivatives
            if (j == 0) {
                const auto f = first_forward(v[1] - v[0], v[2] - v[1]);
                for (int k = 0; k < 3; ++k) term(p.kappa * p.eta * f[k] * U(i, k));
            } else {
                const double hl = v[j] - v[j - 1], hr = v[j + 1] - v[j];
                const auto d2 = second_central(hl, hr);
                for (int k = 0; k < 3; ++k) term(0.5 * p.sigma * p.sigma * vj * d2[k] * U(i, j + k - 1));
                const double drift = p.kappa * (p.eta - vj);
                if (vj > 1.0 && drift < 0.0 && j >= 2) {
                    const auto b = first_backward(v[j - 1] - v[j - 2], hl);
                    for (int k = 0; k < 3; ++k) term(drift * b[k] * U(i, j + k - 2));
                } else {
                    const auto c = first_central(hl, hr);
                    for (int k = 0; k < 3; ++k) term(drift * c[k] * U(i, j + k - 1));
                }
            }

            // mixed derivative
            if (i < m1 && j >= 1) {
                const auto bs = first_central(s[i] - s[i - 1], s[i + 1] - s[i]);
                const auto bv = first_central(v[j] - v[j - 1], v[j + 1] - v[j]);
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l)
                        term(p.rho * p.sigma * si * vj * bs[k] * bv[l] * U(i + k - 1, j + l - 1));
            }

            term(-p.rd * U(i, j));
            out[(i - 1) + j * m1] = acc;
            if (row_scale) (*row_scale)[(i - 1) + j * m1] = mag;
        }
    }
    return out;
}

}  // namespace oracle
