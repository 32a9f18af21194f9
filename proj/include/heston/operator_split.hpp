#pragma once

#include "heston/grid.hpp"
#include "heston/linalg.hpp"
#include "heston/model.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace heston {

/// Which part of the split semi-discrete operator A = A0 + A1 + A2.
enum class Part { Mixed = 0, S = 1, V = 2, Full = 3 };

/// b_j(t) = scale(t) * shape. For Heston boundary data scale(t) = exp(-r_f t).
struct BoundaryForcing {
    std::vector<double> shape;
    std::function<double(double)> scale;

    void add_to(double t, std::span<double> y) const;
};

/// Solves (I - c A_j) x = rhs through independent banded solves along grid lines:
/// s-lines for A1 (tridiagonal), v-lines for A2 (bandwidth 2 either side).
/// The line factors are stored interleaved (position-major, line-minor) so that one
/// substitution sweep advances every line at once.
class LineFactorization {
public:
    LineFactorization() = default;
    LineFactorization(const DiagonalMatrix& a, const TensorGrid& grid, Part part, double c);

    void solve_in_place(std::span<double> x) const;
    double coefficient() const { return c_; }

private:
    Part part_ = Part::S;
    double c_ = 0.0;
    std::size_t lines_ = 0;
    std::size_t length_ = 0;
    std::size_t stride_ = 1;   // distance between consecutive line entries
    std::size_t step_ = 1;     // distance between line starts
    std::size_t kl_ = 0;       // multipliers per position
    std::size_t ku_ = 0;       // U entries right of the diagonal per position
    // Entry (p, e, l) of line l lives at [(p * width + e) * lines_ + l].
    std::vector<double> lower_;         // negated multipliers L(p + r, p), r = 1..kl
    std::vector<double> upper_;         // negated U(p, p + c), c = 1..ku
    std::vector<double> inv_diag_;      // 1 / U(p, p)
    std::vector<std::size_t> pivots_;   // row exchanged with p
    mutable std::vector<double> scratch_;
};

/// Solves (I - c A) x = rhs for the full operator. The matrix is permuted to v-fastest
/// ordering, where its bandwidth is m2 + 1 rather than 2 m1, and factored once.
class FullFactorization {
public:
    FullFactorization(const DiagonalMatrix& a, const TensorGrid& grid, double c);

    void solve_in_place(std::span<double> x) const;
    double coefficient() const { return c_; }
    std::size_t lower_bandwidth() const { return kl_; }
    std::size_t upper_bandwidth() const { return ku_; }

private:
    double c_;
    std::size_t kl_ = 0;
    std::size_t ku_ = 0;
    std::vector<std::size_t> perm_;  // perm_[k] = permuted position of unknown k
    std::unique_ptr<BandedFactorization> lu_;
    mutable std::vector<double> scratch_;
};

/// The split semi-discrete system U' = (A0 + A1 + A2) U + b0(t) + b1(t) + b2(t).
class OperatorSplit {
public:
    OperatorSplit(TensorGrid grid, std::array<DiagonalMatrix, 3> parts, std::array<BoundaryForcing, 3> forcing,
                  std::vector<double> initial);

    const TensorGrid& grid() const { return grid_; }
    std::size_t size() const { return grid_.unknowns(); }
    const DiagonalMatrix& matrix(Part part) const;
    /// A0 + A1 + A2
    const DiagonalMatrix& full_matrix() const { return full_; }
    const BoundaryForcing& forcing(Part part) const;
    std::span<const double> initial() const { return initial_; }

    /// out = A_part w + b_part(t); Part::Full sums all three.
    void apply_F(Part part, double t, std::span<const double> w, std::span<double> out) const;
    std::vector<double> apply_F(Part part, double t, std::span<const double> w) const;
    /// out = b_part(t)
    void forcing_at(Part part, double t, std::span<double> out) const;

    LineFactorization factor_stage(Part part, double c) const;
    FullFactorization factor_full(double c) const;

    /// Coordinate dump "row col value" of one matrix.
    void write_coo(Part part, std::ostream& out) const;

private:
    TensorGrid grid_;
    std::array<DiagonalMatrix, 3> parts_;
    DiagonalMatrix full_;
    std::array<BoundaryForcing, 3> forcing_;
    std::vector<double> initial_;
};

/// Finite-difference discretization of the Heston PDE (European or down-and-out call)
/// on `grid`. Throws AssemblyError for grids too small to carry the stencils.
OperatorSplit assemble(const TensorGrid& grid, const HestonParams& params, const OptionSpec& option,
                       const DomainSpec& domain);

/// Grid for a model: s-mesh on [lower_s, S], v-mesh on [0, V].
TensorGrid make_grid(const OptionSpec& option, const DomainSpec& domain, std::size_t m1, std::size_t m2);

}  // namespace heston
