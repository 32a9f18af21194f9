#include "heston/linalg.hpp"

#include "heston/error.hpp"
#include "heston/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace heston {

// ---------------------------------------------------------------------------
// DiagonalMatrix

DiagonalMatrix::Diagonal& DiagonalMatrix::diagonal(std::ptrdiff_t offset) {
    auto it = std::lower_bound(diags_.begin(), diags_.end(), offset,
                               [](const Diagonal& d, std::ptrdiff_t o) { return d.offset < o; });
    if (it == diags_.end() || it->offset != offset) {
        it = diags_.insert(it, Diagonal{offset, std::vector<double>(n_, 0.0)});
    }
    return *it;
}

void DiagonalMatrix::add(std::size_t row, std::size_t col, double value) {
    if (row >= n_ || col >= n_) {
        throw IndexError("entry (" + std::to_string(row) + ", " + std::to_string(col) + ") outside matrix");
    }
    if (value == 0.0) return;
    diagonal(static_cast<std::ptrdiff_t>(col) - static_cast<std::ptrdiff_t>(row)).coeff[row] += value;
}

double DiagonalMatrix::at(std::size_t row, std::size_t col) const {
    const auto offset = static_cast<std::ptrdiff_t>(col) - static_cast<std::ptrdiff_t>(row);
    for (const auto& d : diags_) {
        if (d.offset == offset) return d.coeff[row];
    }
    return 0.0;
}

void DiagonalMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (y.size() != n_) throw DimensionError("mat-vec output has wrong length");
    std::fill(y.begin(), y.end(), 0.0);
    multiply_add(x, y);
}

void DiagonalMatrix::multiply_add(std::span<const double> x, std::span<double> y) const {
    if (x.size() != n_ || y.size() != n_) throw DimensionError("mat-vec operand has wrong length");
    const auto n = static_cast<std::ptrdiff_t>(n_);
    for (const auto& d : diags_) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -d.offset);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n, n - d.offset);
        if (hi <= lo) continue;
        const auto len = static_cast<std::size_t>(hi - lo);
        kernels::mul_add(y.subspan(static_cast<std::size_t>(lo), len),
                         std::span<const double>(d.coeff).subspan(static_cast<std::size_t>(lo), len),
                         x.subspan(static_cast<std::size_t>(lo + d.offset), len));
    }
}

std::vector<DiagonalMatrix::Entry> DiagonalMatrix::entries() const {
    std::vector<Entry> out;
    for (std::size_t i = 0; i < n_; ++i) {
        for (const auto& d : diags_) {
            if (d.coeff[i] != 0.0) {
                out.push_back({i, static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + d.offset), d.coeff[i]});
            }
        }
    }
    return out;
}

bool DiagonalMatrix::is_zero() const {
    return std::all_of(diags_.begin(), diags_.end(), [](const Diagonal& d) {
        return std::all_of(d.coeff.begin(), d.coeff.end(), [](double c) { return c == 0.0; });
    });
}

DiagonalMatrix operator+(const DiagonalMatrix& a, const DiagonalMatrix& b) {
    if (a.size() != b.size()) throw DimensionError("matrix sizes differ");
    DiagonalMatrix sum = a;
    for (const auto& d : b.diags_) {
        auto& target = sum.diagonal(d.offset);
        kernels::axpy(target.coeff, 1.0, d.coeff);
    }
    return sum;
}

// ---------------------------------------------------------------------------
// BandedMatrix

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), data_(n * (kl + ku + 1), 0.0) {}

double& BandedMatrix::at(std::size_t i, std::size_t j) {
    if (i >= n_ || j >= n_ || !in_band(i, j)) {
        throw IndexError("entry (" + std::to_string(i) + ", " + std::to_string(j) + ") outside band");
    }
    return data_[i * (kl_ + ku_ + 1) + (j + kl_ - i)];
}

double BandedMatrix::at(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) throw IndexError("entry outside matrix");
    if (!in_band(i, j)) return 0.0;
    return data_[i * (kl_ + ku_ + 1) + (j + kl_ - i)];
}

std::vector<double> BandedMatrix::multiply(std::span<const double> x) const {
    if (x.size() != n_) throw DimensionError("banded mat-vec operand has wrong length");
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i >= kl_ ? i - kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + ku_);
        double acc = 0.0;
        for (std::size_t j = j0; j <= j1; ++j) acc += at(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

// ---------------------------------------------------------------------------
// BandedFactorization

BandedFactorization::BandedFactorization(const BandedMatrix& m)
    : n_(m.n_), kl_(m.kl_), ku_(m.ku_), width_(2 * m.kl_ + m.ku_ + 1), data_(m.n_ * width_, 0.0), inv_diag_(m.n_), pivots_(m.n_) {
    double scale = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i >= kl_ ? i - kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + ku_);
        for (std::size_t j = j0; j <= j1; ++j) {
            lu(i, j) = m.at(i, j);
            scale = std::max(scale, std::abs(lu(i, j)));
        }
    }
    const double threshold = static_cast<double>(std::max<std::size_t>(n_, 1)) *
                             std::numeric_limits<double>::epsilon() * scale;

    for (std::size_t k = 0; k < n_; ++k) {
        const std::size_t last_row = std::min(n_ - 1, k + kl_);
        const std::size_t last_col = std::min(n_ - 1, k + kl_ + ku_);

        std::size_t p = k;
        double best = std::abs(lu(k, k));
        for (std::size_t r = k + 1; r <= last_row; ++r) {
            if (std::abs(lu(r, k)) > best) {
                best = std::abs(lu(r, k));
                p = r;
            }
        }
        if (!(best > threshold)) {
            throw SingularMatrix("banded LU: pivot " + std::to_string(k) + " below threshold");
        }
        pivots_[k] = p;
        if (p != k) {
            for (std::size_t c = k; c <= last_col; ++c) std::swap(lu(k, c), lu(p, c));
        }

        const double pivot = lu(k, k);
        inv_diag_[k] = 1.0 / pivot;
        const std::size_t span_len = last_col - k;
        for (std::size_t r = k + 1; r <= last_row; ++r) {
            const double l = lu(r, k) * inv_diag_[k];
            lu(r, k) = l;
            if (l == 0.0 || span_len == 0) continue;
            kernels::axpy(std::span<double>(&lu(r, k + 1), span_len), -l,
                          std::span<const double>(&lu(k, k + 1), span_len));
        }
    }
}

namespace {

/// Substitution with the band widths known at compile time (the line solves use
/// kl = ku = 1 and kl = ku = 2); the generic path handles everything else.
template <std::size_t KL, std::size_t KU>
void substitute_fixed(std::size_t n, const double* lu, const double* inv_diag, const std::size_t* pivots, double* x) {
    constexpr std::size_t width = 2 * KL + KU + 1;
    const std::size_t tail = n > KL + KU ? n - KL - KU : 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (pivots[k] != k) std::swap(x[k], x[pivots[k]]);
        const double xk = x[k];
        if (k + KL < n) {
            for (std::size_t r = 1; r <= KL; ++r) x[k + r] -= lu[(k + r) * width + KL - r] * xk;
        } else {
            for (std::size_t r = k + 1; r < n; ++r) x[r] -= lu[r * width + KL - (r - k)] * xk;
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        const double* row = lu + k * width + KL;  // row[c - k] = lu(k, c)
        double acc = x[k];
        if (k < tail) {
            for (std::size_t c = 1; c <= KL + KU; ++c) acc -= row[c] * x[k + c];
        } else {
            for (std::size_t c = k + 1; c < n; ++c) acc -= row[c - k] * x[c];
        }
        x[k] = acc * inv_diag[k];
    }
}

}  // namespace

void BandedFactorization::solve_in_place(std::span<double> x) const {
    if (x.size() != n_) throw DimensionError("banded solve: right-hand side has wrong length");
    if (kl_ == 1 && ku_ == 1) return substitute_fixed<1, 1>(n_, data_.data(), inv_diag_.data(), pivots_.data(), x.data());
    if (kl_ == 2 && ku_ == 2) return substitute_fixed<2, 2>(n_, data_.data(), inv_diag_.data(), pivots_.data(), x.data());
    for (std::size_t k = 0; k < n_; ++k) {
        if (pivots_[k] != k) std::swap(x[k], x[pivots_[k]]);
        const std::size_t last_row = std::min(n_ - 1, k + kl_);
        const double xk = x[k];
        for (std::size_t r = k + 1; r <= last_row; ++r) x[r] -= lu(r, k) * xk;
    }
    for (std::size_t k = n_; k-- > 0;) {
        const std::size_t last_col = std::min(n_ - 1, k + kl_ + ku_);
        double acc = x[k];
        for (std::size_t c = k + 1; c <= last_col; ++c) acc -= lu(k, c) * x[c];
        x[k] = acc * inv_diag_[k];
    }
}

std::vector<double> BandedFactorization::solve(std::span<const double> b) const {
    std::vector<double> x(b.begin(), b.end());
    solve_in_place(x);
    return x;
}

std::vector<double> banded_solve(const BandedFactorization& f, std::span<const double> b) { return f.solve(b); }

}  // namespace heston
