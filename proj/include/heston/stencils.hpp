#pragma once

#include "heston/grid.hpp"

#include <array>
#include <cstddef>

namespace heston {

enum class FirstDerivative {
    Left,     ///< backward, offsets {-2, -1, 0}
    Central,  ///< offsets {-1, 0, +1}
    Right,    ///< forward, offsets {0, +1, +2}
};

/// Three-point finite-difference weights on a non-uniform mesh. Weights apply to
/// f(x_{i + first_offset + k}) for k = 0, 1, 2.
struct StencilWeights {
    int first_offset = 0;
    std::array<double, 3> weights{};

    double sum() const { return weights[0] + weights[1] + weights[2]; }
};

/// Throws IndexError if the stencil would leave the mesh.
StencilWeights d1_weights(const Mesh1D& mesh, std::size_t i, FirstDerivative kind);
StencilWeights d2_weights(const Mesh1D& mesh, std::size_t i);

/// Weights for f_xy at (x_i, y_j): w[k+1][l+1] multiplies f(x_{i+k}, y_{j+l}).
using MixedWeights = std::array<std::array<double, 3>, 3>;
MixedWeights mixed_weights(const Mesh1D& x_mesh, const Mesh1D& y_mesh, std::size_t i, std::size_t j);

/// Central weights from explicit widths (h_left = x_i - x_{i-1}, h_right = x_{i+1} - x_i).
StencilWeights central_d1(double h_left, double h_right);
StencilWeights central_d2(double h_left, double h_right);

}  // namespace heston
