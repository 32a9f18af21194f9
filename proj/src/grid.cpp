#include "heston/grid.hpp"

#include "heston/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace heston {

Mesh1D::Mesh1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw RangeError("a mesh needs at least two nodes");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (!(nodes_[i] > nodes_[i - 1])) {
            throw RangeError("mesh nodes must be strictly increasing (index " + std::to_string(i) + ")");
        }
    }
}

Mesh1D build_s_mesh(std::size_t m1, double strike, double c, double s_max, double left) {
    if (m1 < 1) throw RangeError("m1 must be >= 1");
    if (!(c > 0.0)) throw RangeError("c must be > 0");
    if (!(left >= 0.0 && left < strike && strike < s_max)) {
        throw RangeError("s-mesh requires 0 <= left < K < S");
    }
    const double xi_lo = std::asinh((left - strike) / c);
    const double xi_hi = std::asinh((s_max - strike) / c);
    const double dxi = (xi_hi - xi_lo) / static_cast<double>(m1);

    std::vector<double> nodes(m1 + 1);
    nodes.front() = left;
    nodes.back() = s_max;
    for (std::size_t i = 1; i < m1; ++i) {
        nodes[i] = strike + c * std::sinh(xi_lo + static_cast<double>(i) * dxi);
    }
    return Mesh1D(std::move(nodes));
}

Mesh1D build_v_mesh(std::size_t m2, double v_max, double d) {
    if (m2 < 1) throw RangeError("m2 must be >= 1");
    if (!(v_max > 0.0) || !(d > 0.0)) throw RangeError("v-mesh requires V > 0 and d > 0");
    const double deta = std::asinh(v_max / d) / static_cast<double>(m2);

    std::vector<double> nodes(m2 + 1);
    nodes.front() = 0.0;
    nodes.back() = v_max;
    for (std::size_t j = 1; j < m2; ++j) {
        nodes[j] = d * std::sinh(static_cast<double>(j) * deta);
    }
    return Mesh1D(std::move(nodes));
}

Mesh1D uniform_mesh(std::size_t m, double lo, double hi) {
    if (m < 1 || !(hi > lo)) throw RangeError("uniform mesh requires m >= 1 and hi > lo");
    std::vector<double> nodes(m + 1);
    const double h = (hi - lo) / static_cast<double>(m);
    for (std::size_t i = 0; i <= m; ++i) nodes[i] = lo + static_cast<double>(i) * h;
    nodes.back() = hi;
    return Mesh1D(std::move(nodes));
}

SmoothnessReport smoothness_report(const Mesh1D& mesh) {
    SmoothnessReport r;
    if (mesh.size() < 3) return r;
    const double dxi = 1.0 / static_cast<double>(mesh.intervals());
    for (std::size_t i = 1; i + 1 < mesh.size(); ++i) {
        const double a = mesh.width(i);
        const double b = mesh.width(i + 1);
        r.max_width_ratio = std::max(r.max_width_ratio, b / a);
        r.max_width_jump = std::max(r.max_width_jump, std::abs(b - a) / (dxi * dxi));
    }
    return r;
}

TensorGrid::TensorGrid(Mesh1D s_mesh, Mesh1D v_mesh) : s_(std::move(s_mesh)), v_(std::move(v_mesh)) {}

void TensorGrid::write_csv(std::ostream& out) const {
    out << "axis,index,node\n";
    out.precision(17);
    for (std::size_t i = 0; i < s_.size(); ++i) out << "s," << i << ',' << s_[i] << '\n';
    for (std::size_t j = 0; j < v_.size(); ++j) out << "v," << j << ',' << v_[j] << '\n';
}

}  // namespace heston
