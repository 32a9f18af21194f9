#include "heston/linalg.hpp"

#include "heston/error.hpp"

#include <cmath>
#include <numeric>

namespace heston {

namespace {

double norm2(std::span<const double> x) {
    return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
}

}  // namespace

SpectralEstimate spectral_radius(const LinearOperator& apply, std::size_t m, double tol, int max_iters) {
    if (m == 0) throw DimensionError("spectral radius of an empty operator");

    std::vector<double> x(m), y(m), z(m);
    for (std::size_t i = 0; i < m; ++i) x[i] = 1.0 + 0.1 * std::sin(1.0 + static_cast<double>(i));
    double nx = norm2(x);
    for (auto& xi : x) xi /= nx;

    SpectralEstimate est;
    double previous = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        apply(x, y);
        apply(y, z);
        const double nz = norm2(z);
        est.iterations = it;
        if (nz == 0.0) {
            est.radius = 0.0;
            est.converged = true;
            return est;
        }
        est.radius = std::sqrt(nz);
        for (std::size_t i = 0; i < m; ++i) x[i] = z[i] / nz;
        if (it > 1 && std::abs(est.radius - previous) <= tol * est.radius) {
            est.converged = true;
            return est;
        }
        previous = est.radius;
    }
    return est;
}

}  // namespace heston
