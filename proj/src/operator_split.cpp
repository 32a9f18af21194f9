#include "heston/operator_split.hpp"

#include "heston/error.hpp"
#include "heston/kernels.hpp"
#include "heston/stencils.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace heston {

void BoundaryForcing::add_to(double t, std::span<double> y) const {
    if (shape.empty()) return;
    kernels::axpy(y, scale ? scale(t) : 1.0, shape);
}

// ---------------------------------------------------------------------------
// Line solves

LineFactorization::LineFactorization(const DiagonalMatrix& a, const TensorGrid& grid, Part part, double c)
    : part_(part), c_(c) {
    const std::size_t m1 = grid.m1();
    const std::size_t m2 = grid.m2();
    std::size_t band = 0;
    if (part == Part::S) {
        lines_ = m2;
        length_ = m1;
        stride_ = 1;
        step_ = m1;
        band = 1;
    } else if (part == Part::V) {
        lines_ = m1;
        length_ = m2;
        stride_ = m1;
        step_ = 1;
        band = 2;
    } else {
        throw AssemblyError("line factorizations exist only for the s- and v-parts");
    }

    std::vector<BandedMatrix> systems;
    systems.reserve(lines_);
    for (std::size_t l = 0; l < lines_; ++l) {
        BandedMatrix m(length_, band, band);
        for (std::size_t p = 0; p < length_; ++p) m.at(p, p) = 1.0;
        systems.push_back(std::move(m));
    }

    const auto n = static_cast<std::ptrdiff_t>(a.size());
    for (const auto& d : a.diagonals()) {
        if (d.offset % static_cast<std::ptrdiff_t>(stride_) != 0) {
            throw AssemblyError("operator couples unknowns off its grid lines");
        }
        const std::ptrdiff_t in_line = d.offset / static_cast<std::ptrdiff_t>(stride_);
        for (std::ptrdiff_t row = 0; row < n; ++row) {
            const double value = d.coeff[static_cast<std::size_t>(row)];
            if (value == 0.0) continue;
            const std::ptrdiff_t col = row + d.offset;
            const auto r = static_cast<std::size_t>(row);
            const std::size_t line = part == Part::S ? r / m1 : r % m1;
            const std::size_t pos = part == Part::S ? r % m1 : r / m1;
            const std::ptrdiff_t target = static_cast<std::ptrdiff_t>(pos) + in_line;
            const bool same_line = col >= 0 && col < n && target >= 0 &&
                                   target < static_cast<std::ptrdiff_t>(length_) &&
                                   (part == Part::V || static_cast<std::size_t>(col) / m1 == line);
            if (!same_line || static_cast<std::size_t>(std::abs(in_line)) > band) {
                throw AssemblyError("operator entry (" + std::to_string(row) + ", " + std::to_string(col) +
                                    ") leaves its grid line");
            }
            systems[line].at(pos, static_cast<std::size_t>(target)) -= c * value;
        }
    }

    kl_ = band;
    ku_ = 2 * band;  // row exchanges widen U to kl + ku
    lower_.assign(length_ * kl_ * lines_, 0.0);
    upper_.assign(length_ * ku_ * lines_, 0.0);
    inv_diag_.resize(length_ * lines_);
    pivots_.resize(length_ * lines_);
    for (std::size_t l = 0; l < lines_; ++l) {
        const BandedFactorization f(systems[l]);
        for (std::size_t p = 0; p < length_; ++p) {
            for (std::size_t r = 1; r <= kl_ && p + r < length_; ++r) {
                lower_[(p * kl_ + r - 1) * lines_ + l] = -f.factor_entry(p + r, p);
            }
            for (std::size_t c = 1; c <= ku_ && p + c < length_; ++c) {
                upper_[(p * ku_ + c - 1) * lines_ + l] = -f.factor_entry(p, p + c);
            }
            inv_diag_[p * lines_ + l] = f.inverse_pivot(p);
            pivots_[p * lines_ + l] = f.pivot(p);
        }
    }
    if (stride_ == 1) scratch_.resize(lines_ * length_);
}

void LineFactorization::solve_in_place(std::span<double> x) const {
    if (x.size() != lines_ * length_) throw DimensionError("line solve: vector has wrong length");
    const std::size_t n = lines_;
    // v-lines already sit position-major; s-lines are transposed into scratch.
    double* y = x.data();
    if (stride_ == 1) {
        y = scratch_.data();
        for (std::size_t l = 0; l < n; ++l) {
            for (std::size_t p = 0; p < length_; ++p) y[p * n + l] = x[l * step_ + p];
        }
    }
    auto row = [&](std::size_t p) { return std::span<double>(y + p * n, n); };

    for (std::size_t p = 0; p < length_; ++p) {
        const std::size_t* piv = pivots_.data() + p * n;
        for (std::size_t l = 0; l < n; ++l) {
            if (piv[l] != p) std::swap(y[p * n + l], y[piv[l] * n + l]);
        }
        for (std::size_t r = 1; r <= kl_ && p + r < length_; ++r) {
            kernels::mul_add(row(p + r), std::span<const double>(lower_).subspan((p * kl_ + r - 1) * n, n), row(p));
        }
    }
    for (std::size_t p = length_; p-- > 0;) {
        for (std::size_t c = 1; c <= ku_ && p + c < length_; ++c) {
            kernels::mul_add(row(p), std::span<const double>(upper_).subspan((p * ku_ + c - 1) * n, n), row(p + c));
        }
        const double* inv = inv_diag_.data() + p * n;
        double* yp = y + p * n;
        for (std::size_t l = 0; l < n; ++l) yp[l] *= inv[l];
    }

    if (stride_ == 1) {
        for (std::size_t l = 0; l < n; ++l) {
            for (std::size_t p = 0; p < length_; ++p) x[l * step_ + p] = y[p * n + l];
        }
    }
}

FullFactorization::FullFactorization(const DiagonalMatrix& a, const TensorGrid& grid, double c) : c_(c) {
    const std::size_t m1 = grid.m1();
    const std::size_t m2 = grid.m2();
    const std::size_t n = grid.unknowns();
    if (a.size() != n) throw DimensionError("full factorization: matrix does not match grid");

    perm_.resize(n);
    for (std::size_t k = 0; k < n; ++k) perm_[k] = (k % m1) * m2 + k / m1;

    const auto entries = a.entries();
    for (const auto& e : entries) {
        const std::size_t pr = perm_[e.row];
        const std::size_t pc = perm_[e.col];
        if (pr > pc) kl_ = std::max(kl_, pr - pc);
        if (pc > pr) ku_ = std::max(ku_, pc - pr);
    }

    BandedMatrix m(n, kl_, ku_);
    for (std::size_t k = 0; k < n; ++k) m.at(k, k) = 1.0;
    for (const auto& e : entries) m.at(perm_[e.row], perm_[e.col]) -= c * e.value;
    lu_ = std::make_unique<BandedFactorization>(m);
    scratch_.resize(n);
}

void FullFactorization::solve_in_place(std::span<double> x) const {
    if (x.size() != perm_.size()) throw DimensionError("full solve: vector has wrong length");
    for (std::size_t k = 0; k < x.size(); ++k) scratch_[perm_[k]] = x[k];
    lu_->solve_in_place(scratch_);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = scratch_[perm_[k]];
}

// ---------------------------------------------------------------------------
// OperatorSplit

OperatorSplit::OperatorSplit(TensorGrid grid, std::array<DiagonalMatrix, 3> parts,
                             std::array<BoundaryForcing, 3> forcing, std::vector<double> initial)
    : grid_(std::move(grid)), parts_(std::move(parts)), forcing_(std::move(forcing)), initial_(std::move(initial)) {
    const std::size_t n = grid_.unknowns();
    for (const auto& p : parts_) {
        if (p.size() != n) throw DimensionError("split matrix does not match the grid");
    }
    for (const auto& f : forcing_) {
        if (!f.shape.empty() && f.shape.size() != n) throw DimensionError("forcing does not match the grid");
    }
    if (initial_.size() != n) throw DimensionError("initial vector does not match the grid");
    full_ = parts_[0] + parts_[1] + parts_[2];
}

const DiagonalMatrix& OperatorSplit::matrix(Part part) const {
    if (part == Part::Full) return full_;
    return parts_[static_cast<std::size_t>(part)];
}

const BoundaryForcing& OperatorSplit::forcing(Part part) const {
    if (part == Part::Full) throw DimensionError("forcing is stored per part");
    return forcing_[static_cast<std::size_t>(part)];
}

void OperatorSplit::forcing_at(Part part, double t, std::span<double> out) const {
    if (out.size() != size()) throw DimensionError("forcing output has wrong length");
    std::fill(out.begin(), out.end(), 0.0);
    if (part == Part::Full) {
        for (const auto& f : forcing_) f.add_to(t, out);
    } else {
        forcing_[static_cast<std::size_t>(part)].add_to(t, out);
    }
}

void OperatorSplit::apply_F(Part part, double t, std::span<const double> w, std::span<double> out) const {
    if (w.size() != size() || out.size() != size()) throw DimensionError("apply_F: vector has wrong length");
    matrix(part).multiply(w, out);
    if (part == Part::Full) {
        for (const auto& f : forcing_) f.add_to(t, out);
    } else {
        forcing_[static_cast<std::size_t>(part)].add_to(t, out);
    }
}

std::vector<double> OperatorSplit::apply_F(Part part, double t, std::span<const double> w) const {
    std::vector<double> out(size());
    apply_F(part, t, w, out);
    return out;
}

LineFactorization OperatorSplit::factor_stage(Part part, double c) const {
    return LineFactorization(matrix(part), grid_, part, c);
}

FullFactorization OperatorSplit::factor_full(double c) const { return FullFactorization(full_, grid_, c); }

void OperatorSplit::write_coo(Part part, std::ostream& out) const {
    const auto old = out.precision(17);
    for (const auto& e : matrix(part).entries()) out << e.row << ' ' << e.col << ' ' << e.value << '\n';
    out.precision(old);
}

// ---------------------------------------------------------------------------
// Heston assembly

TensorGrid make_grid(const OptionSpec& option, const DomainSpec& domain, std::size_t m1, std::size_t m2) {
    return TensorGrid(build_s_mesh(m1, option.strike, domain.s_conc, domain.s_max, option.lower_s()),
                      build_v_mesh(m2, domain.v_max, domain.v_conc));
}

namespace {

class Assembler {
public:
    Assembler(const TensorGrid& grid, const OptionSpec& option)
        : grid_(grid), lower_s_(option.lower_s()), m1_(grid.m1()), m2_(grid.m2()) {
        const std::size_t n = grid.unknowns();
        for (auto& p : parts_) p = DiagonalMatrix(n);
        for (auto& s : shapes_) s.assign(n, 0.0);
    }

    /// Adds `coeff * u(s_i2, v_j2)` to the row of unknown (i, j) in `part`; Dirichlet
    /// neighbours go to the forcing shape instead.
    void couple(Part part, std::size_t i, std::size_t j, std::size_t i2, std::size_t j2, double coeff) {
        const auto p = static_cast<std::size_t>(part);
        const std::size_t row = grid_.index(i, j);
        if (i2 == 0) return;  // u = 0 on the lower s-edge
        if (j2 == m2_) {
            shapes_[p][row] += coeff * (grid_.s()[i2] - lower_s_);
            return;
        }
        parts_[p].add(row, grid_.index(i2, j2), coeff);
    }

    void constant(Part part, std::size_t i, std::size_t j, double value) {
        shapes_[static_cast<std::size_t>(part)][grid_.index(i, j)] += value;
    }

    std::array<DiagonalMatrix, 3> parts_;
    std::array<std::vector<double>, 3> shapes_;

private:
    const TensorGrid& grid_;
    double lower_s_;
    std::size_t m1_, m2_;
};

}  // namespace

OperatorSplit assemble(const TensorGrid& grid, const HestonParams& params, const OptionSpec& option,
                       const DomainSpec& domain) {
    const std::size_t m1 = grid.m1();
    const std::size_t m2 = grid.m2();
    if (m1 < 2 || m2 < 2) throw AssemblyError("the Heston discretization needs m1 >= 2 and m2 >= 2");
    if (std::abs(grid.s().back() - domain.s_max) > 1e-12 * domain.s_max ||
        std::abs(grid.v().back() - domain.v_max) > 1e-12 * domain.v_max ||
        grid.s().front() != option.lower_s()) {
        throw AssemblyError("grid does not match the computational domain");
    }

    const auto& sm = grid.s();
    const auto& vm = grid.v();
    const double drift_s = params.rd - params.rf;
    const double half_rd = 0.5 * params.rd;
    const double sigma2 = params.sigma * params.sigma;
    Assembler as(grid, option);

    for (std::size_t j = 0; j < m2; ++j) {
        const double v = vm[j];
        for (std::size_t i = 1; i <= m1; ++i) {
            const double s = sm[i];
            const double diffusion_s = 0.5 * s * s * v;

            // A1: s-direction
            if (i < m1) {
                const auto d2 = d2_weights(sm, i);
                const auto d1 = d1_weights(sm, i, FirstDerivative::Central);
                for (int o = 0; o < 3; ++o) {
                    as.couple(Part::S, i, j, i + o - 1, j, diffusion_s * d2.weights[o] + drift_s * s * d1.weights[o]);
                }
            } else {
                // s = S: du/ds is the Neumann datum; d2u/ds2 uses a virtual node at S + h with
                // value u(S) + h * du/ds.
                const double h = sm.width(m1);
                as.couple(Part::S, i, j, i - 1, j, diffusion_s / (h * h));
                as.couple(Part::S, i, j, i, j, -diffusion_s / (h * h));
                as.constant(Part::S, i, j, diffusion_s / h + drift_s * s);
            }
            as.couple(Part::S, i, j, i, j, -half_rd);

            // A2: v-direction
            if (j == 0) {
                const auto up = d1_weights(vm, 0, FirstDerivative::Right);
                for (int o = 0; o < 3; ++o) as.couple(Part::V, i, j, i, j + o, params.kappa * params.eta * up.weights[o]);
            } else {
                const double diffusion_v = 0.5 * sigma2 * v;
                const double drift_v = params.kappa * (params.eta - v);
                const auto d2 = d2_weights(vm, j);
                for (int o = 0; o < 3; ++o) as.couple(Part::V, i, j, i, j + o - 1, diffusion_v * d2.weights[o]);
                const bool upwind = v > 1.0 && drift_v < 0.0 && j >= 2;
                const auto d1 = d1_weights(vm, j, upwind ? FirstDerivative::Left : FirstDerivative::Central);
                for (int o = 0; o < 3; ++o) {
                    as.couple(Part::V, i, j, i, j + d1.first_offset + o, drift_v * d1.weights[o]);
                }
            }
            as.couple(Part::V, i, j, i, j, -half_rd);

            // A0: mixed derivative, absent on s = S and v = 0
            if (params.rho != 0.0 && i < m1 && j >= 1) {
                const double coeff = params.rho * params.sigma * s * v;
                const auto w = mixed_weights(sm, vm, i, j);
                for (int k = 0; k < 3; ++k) {
                    for (int l = 0; l < 3; ++l) as.couple(Part::Mixed, i, j, i + k - 1, j + l - 1, coeff * w[k][l]);
                }
            }
        }
    }

    std::vector<double> u0(grid.unknowns());
    for (std::size_t k = 0; k < u0.size(); ++k) u0[k] = payoff(option, sm[grid.s_index(k)]);

    const double rf = params.rf;
    auto discount = [rf](double t) { return std::exp(-rf * t); };
    std::array<BoundaryForcing, 3> forcing;
    for (std::size_t p = 0; p < 3; ++p) {
        const bool any = std::any_of(as.shapes_[p].begin(), as.shapes_[p].end(), [](double x) { return x != 0.0; });
        if (any) forcing[p] = BoundaryForcing{std::move(as.shapes_[p]), discount};
    }
    return OperatorSplit(grid, std::move(as.parts_), std::move(forcing), std::move(u0));
}

}  // namespace heston
