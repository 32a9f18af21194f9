#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace heston {

/// Sparse matrix stored by diagonals: entry (i, i + offset) lives in diagonal(offset)[i].
/// Fits finite-difference operators on tensor grids, where a handful of fixed offsets
/// covers every nonzero; the mat-vec is one vector kernel call per diagonal.
class DiagonalMatrix {
public:
    struct Diagonal {
        std::ptrdiff_t offset = 0;
        std::vector<double> coeff;  ///< length n; rows whose column leaves [0, n) hold zero
    };

    struct Entry {
        std::size_t row;
        std::size_t col;
        double value;
    };

    DiagonalMatrix() = default;
    explicit DiagonalMatrix(std::size_t n) : n_(n) {}

    std::size_t size() const { return n_; }

    void add(std::size_t row, std::size_t col, double value);
    double at(std::size_t row, std::size_t col) const;

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    /// y += A x
    void multiply_add(std::span<const double> x, std::span<double> y) const;

    const std::vector<Diagonal>& diagonals() const { return diags_; }
    /// Nonzero entries in row-major order.
    std::vector<Entry> entries() const;
    bool is_zero() const;

    friend DiagonalMatrix operator+(const DiagonalMatrix& a, const DiagonalMatrix& b);

private:
    Diagonal& diagonal(std::ptrdiff_t offset);

    std::size_t n_ = 0;
    std::vector<Diagonal> diags_;  // sorted by offset
};

/// Square band matrix with kl sub- and ku super-diagonals.
class BandedMatrix {
public:
    BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

    std::size_t size() const { return n_; }
    std::size_t lower() const { return kl_; }
    std::size_t upper() const { return ku_; }

    bool in_band(std::size_t i, std::size_t j) const { return j + kl_ >= i && j <= i + ku_; }
    /// Throws IndexError outside the band.
    double& at(std::size_t i, std::size_t j);
    double at(std::size_t i, std::size_t j) const;

    std::vector<double> multiply(std::span<const double> x) const;

private:
    friend class BandedFactorization;
    std::size_t n_, kl_, ku_;
    std::vector<double> data_;  // row-major, row i holds columns i-kl .. i+ku
};

/// LU factorization with partial (row) pivoting in band storage. Row interchanges grow
/// the upper band of U to kl + ku. Factor once, solve many times.
class BandedFactorization {
public:
    /// Throws SingularMatrix when a pivot falls below n * eps * max|M|.
    explicit BandedFactorization(const BandedMatrix& m);

    std::size_t size() const { return n_; }
    /// Throws DimensionError if b has the wrong length.
    std::vector<double> solve(std::span<const double> b) const;
    /// In-place solve; x holds b on entry.
    void solve_in_place(std::span<double> x) const;

    std::size_t lower_bandwidth() const { return kl_; }
    std::size_t upper_bandwidth() const { return ku_; }
    /// Factor entry (L below the diagonal, U on and above it); 0 outside the stored band.
    double factor_entry(std::size_t i, std::size_t j) const {
        return j + kl_ < i || j > i + kl_ + ku_ || j >= n_ ? 0.0 : lu(i, j);
    }
    /// Row exchanged with row k at elimination step k.
    std::size_t pivot(std::size_t k) const { return pivots_[k]; }
    double inverse_pivot(std::size_t k) const { return inv_diag_[k]; }

private:
    double& lu(std::size_t i, std::size_t j) { return data_[i * width_ + (j + kl_ - i)]; }
    double lu(std::size_t i, std::size_t j) const { return data_[i * width_ + (j + kl_ - i)]; }

    std::size_t n_, kl_, ku_, width_;
    std::vector<double> data_;  // row i holds columns i-kl .. i+kl+ku
    std::vector<double> inv_diag_;
    std::vector<std::size_t> pivots_;
};

std::vector<double> banded_solve(const BandedFactorization& f, std::span<const double> b);

using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

struct SpectralEstimate {
    double radius = 0.0;
    int iterations = 0;
    bool converged = false;  ///< false means max_iters was reached; `radius` is still the last estimate
};

/// Power iteration for the largest eigenvalue magnitude of a linear operator on R^m.
/// The estimate sqrt(|A^2 x| / |x|) is used so that dominant +-lambda pairs converge too.
/// The default tolerance is tight on purpose: the Heston operators have clustered dominant
/// eigenvalues, and a 1e-3 step-to-step test stops on a plateau several percent low, which
/// is more than the RKC stage rule can absorb.
SpectralEstimate spectral_radius(const LinearOperator& apply, std::size_t m, double tol = 1e-6,
                                 int max_iters = 5000);

}  // namespace heston
