#include "heston/stencils.hpp"

#include "heston/error.hpp"

#include <string>

namespace heston {

namespace {

void require(bool ok, const char* what, std::size_t i) {
    if (!ok) throw IndexError(std::string(what) + " stencil needs missing neighbors at node " + std::to_string(i));
}

}  // namespace

StencilWeights central_d1(double h0, double h1) {
    return {-1, {-h1 / (h0 * (h0 + h1)), (h1 - h0) / (h0 * h1), h0 / (h1 * (h0 + h1))}};
}

StencilWeights central_d2(double h0, double h1) {
    return {-1, {2.0 / (h0 * (h0 + h1)), -2.0 / (h0 * h1), 2.0 / (h1 * (h0 + h1))}};
}

StencilWeights d1_weights(const Mesh1D& mesh, std::size_t i, FirstDerivative kind) {
    const std::size_t m = mesh.intervals();
    switch (kind) {
    case FirstDerivative::Left: {
        require(i >= 2 && i <= m, "left", i);
        const double a = mesh.width(i - 1);
        const double b = mesh.width(i);
        return {-2, {b / (a * (a + b)), (-a - b) / (a * b), (a + 2.0 * b) / (b * (a + b))}};
    }
    case FirstDerivative::Central:
        require(i >= 1 && i + 1 <= m, "central", i);
        return central_d1(mesh.width(i), mesh.width(i + 1));
    case FirstDerivative::Right: {
        require(i + 2 <= m, "right", i);
        const double a = mesh.width(i + 1);
        const double b = mesh.width(i + 2);
        return {0, {(-2.0 * a - b) / (a * (a + b)), (a + b) / (a * b), -a / (b * (a + b))}};
    }
    }
    throw IndexError("unknown first-derivative kind");
}

StencilWeights d2_weights(const Mesh1D& mesh, std::size_t i) {
    require(i >= 1 && i + 1 <= mesh.intervals(), "second-derivative", i);
    return central_d2(mesh.width(i), mesh.width(i + 1));
}

MixedWeights mixed_weights(const Mesh1D& x_mesh, const Mesh1D& y_mesh, std::size_t i, std::size_t j) {
    const auto bx = d1_weights(x_mesh, i, FirstDerivative::Central);
    const auto by = d1_weights(y_mesh, j, FirstDerivative::Central);
    MixedWeights w{};
    for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) w[k][l] = bx.weights[k] * by.weights[l];
    }
    return w;
}

}  // namespace heston
