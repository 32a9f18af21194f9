#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace heston {

/// Strictly increasing 1D mesh x_0 < ... < x_m.
class Mesh1D {
public:
    explicit Mesh1D(std::vector<double> nodes);

    /// Number of intervals m (so size() == m + 1).
    std::size_t intervals() const { return nodes_.size() - 1; }
    std::size_t size() const { return nodes_.size(); }

    double operator[](std::size_t i) const { return nodes_[i]; }
    /// Delta x_i = x_i - x_{i-1}, defined for 1 <= i <= m.
    double width(std::size_t i) const { return nodes_[i] - nodes_[i - 1]; }

    std::span<const double> nodes() const { return nodes_; }
    double front() const { return nodes_.front(); }
    double back() const { return nodes_.back(); }

private:
    std::vector<double> nodes_;
};

/// s_i = K + c sinh(xi_i), xi equidistant between asinh((left-K)/c) and asinh((S-K)/c).
/// Endpoints are pinned to exactly {left, S}.
Mesh1D build_s_mesh(std::size_t m1, double strike, double c, double s_max, double left = 0.0);

/// v_j = d sinh(j * asinh(V/d) / m2), endpoints pinned to exactly {0, V}.
Mesh1D build_v_mesh(std::size_t m2, double v_max, double d);

Mesh1D uniform_mesh(std::size_t m, double lo, double hi);

struct SmoothnessReport {
    double max_width_ratio = 0.0;    ///< max Delta x_{i+1} / Delta x_i
    double max_width_jump = 0.0;     ///< max |Delta x_{i+1} - Delta x_i| / (Delta xi)^2
};

/// Delta xi is taken as 1/m (the mesh is the image of a uniform computational grid of m
/// intervals on a unit-length parameter range); the second value is therefore comparable
/// across refinements of the same mapping.
SmoothnessReport smoothness_report(const Mesh1D& mesh);

/// Tensor product grid with s-fastest unknown ordering:
/// k(i, j) = (i - 1) + j * m1 for 1 <= i <= m1, 0 <= j <= m2 - 1.
/// Node s_0 (lower Dirichlet edge) and v_{m2} (upper Dirichlet edge) carry no unknowns.
class TensorGrid {
public:
    TensorGrid(Mesh1D s_mesh, Mesh1D v_mesh);

    const Mesh1D& s() const { return s_; }
    const Mesh1D& v() const { return v_; }
    std::size_t m1() const { return s_.intervals(); }
    std::size_t m2() const { return v_.intervals(); }
    std::size_t unknowns() const { return m1() * m2(); }

    std::size_t index(std::size_t i, std::size_t j) const { return (i - 1) + j * m1(); }
    std::size_t s_index(std::size_t k) const { return k % m1() + 1; }
    std::size_t v_index(std::size_t k) const { return k / m1(); }

    void write_csv(std::ostream& out) const;

private:
    Mesh1D s_;
    Mesh1D v_;
};

}  // namespace heston
