#include "heston/error.hpp"
#include "heston/operator_split.hpp"
#include "monolithic.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

using namespace heston;

namespace {

OperatorSplit build(const BenchmarkCase& c, std::size_t m1, std::size_t m2) {
    return assemble(make_grid(c.option, c.domain, m1, m2), c.params, c.option, c.domain);
}

std::vector<double> random_vector(std::size_t n, unsigned seed, double scale = 100.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<double> x(n);
    for (auto& e : x) e = u(rng);
    return x;
}

// sum_c |A(k, c) w_c| per row: the rounding scale of (A w)_k.
std::vector<double> abs_action(const DiagonalMatrix& a, std::span<const double> w) {
    std::vector<double> out(w.size(), 0.0);
    for (const auto& d : a.diagonals()) {
        for (std::size_t r = 0; r < w.size(); ++r) {
            const std::ptrdiff_t c = std::ptrdiff_t(r) + d.offset;
            if (c >= 0 && c < std::ptrdiff_t(w.size())) out[r] += std::abs(d.coeff[r] * w[c]);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("split operator matches the monolithic discretization", "[operator]") {
    for (int id = 1; id <= 4; ++id) {
        for (bool barrier : {false, true}) {
            const auto c = barrier ? barrier_case(id, 95.0, false) : benchmark_case(id);
            const auto split = build(c, 30, 15);
            for (double t : {0.0, 0.37}) {
                const auto w = random_vector(split.size(), 7u + id);
                std::vector<double> scale;
                const auto expected = oracle::heston_rhs(split.grid(), c.params, c.option, t, w, &scale);
                const auto got = split.apply_F(Part::Full, t, w);
                for (std::size_t k = 0; k < w.size(); ++k) {
                    INFO("case " << id << " barrier " << barrier << " row " << k);
                    CHECK(std::abs(got[k] - expected[k]) <= 1e-13 * scale[k]);
                }
            }
        }
    }
}

TEST_CASE("operator action on s*v, s and constants", "[operator]") {
    for (int id = 1; id <= 4; ++id) {
        const auto c = benchmark_case(id);
        const auto& p = c.params;
        const auto split = build(c, 40, 20);
        const auto& g = split.grid();
        std::vector<double> sv(split.size()), s(split.size()), one(split.size(), 1.0), y(split.size());
        for (std::size_t k = 0; k < sv.size(); ++k) {
            s[k] = g.s()[g.s_index(k)];
            sv[k] = s[k] * g.v()[g.v_index(k)];
        }

        split.full_matrix().multiply(sv, y);
        auto scale = abs_action(split.full_matrix(), sv);
        for (std::size_t k = 0; k < sv.size(); ++k) {
            const std::size_t i = g.s_index(k), j = g.v_index(k);
            if (i >= g.m1() || j < 1 || j + 2 > g.m2()) continue;
            const double si = g.s()[i], vj = g.v()[j];
            const double expected =
                p.rho * p.sigma * si * vj + (p.rd - p.rf) * si * vj + p.kappa * (p.eta - vj) * si - p.rd * si * vj;
            CHECK(std::abs(y[k] - expected) <= 1e-10 * scale[k]);
        }

        split.full_matrix().multiply(s, y);
        scale = abs_action(split.full_matrix(), s);
        for (std::size_t k = 0; k < s.size(); ++k) {
            const std::size_t i = g.s_index(k), j = g.v_index(k);
            if (i >= g.m1() || j + 2 > g.m2()) continue;
            CHECK(std::abs(y[k] + p.rf * s[k]) <= 1e-12 * scale[k]);
        }

        split.full_matrix().multiply(one, y);
        scale = abs_action(split.full_matrix(), one);
        for (std::size_t k = 0; k < s.size(); ++k) {
            const std::size_t i = g.s_index(k), j = g.v_index(k);
            if (i < 2 || i >= g.m1() || j + 2 > g.m2()) continue;
            CHECK(std::abs(y[k] + p.rd) <= 1e-12 * scale[k]);
        }
    }
}

TEST_CASE("zero correlation leaves A0 and b0 empty", "[operator]") {
    const auto c = barrier_case(1, 95.0, true);
    const auto split = build(c, 20, 10);
    CHECK(split.matrix(Part::Mixed).is_zero());
    const auto w = random_vector(split.size(), 3);
    for (double x : split.apply_F(Part::Mixed, 0.5, w)) CHECK(x == 0.0);
}

TEST_CASE("apply_F is additive over the parts", "[operator]") {
    const auto c = benchmark_case(2);
    const auto split = build(c, 30, 15);
    const double t = 0.6;
    const auto full = split.apply_F(Part::Full, t, split.initial());
    const auto f0 = split.apply_F(Part::Mixed, t, split.initial());
    const auto f1 = split.apply_F(Part::S, t, split.initial());
    const auto f2 = split.apply_F(Part::V, t, split.initial());
    const auto scale = abs_action(split.full_matrix(), split.initial());
    std::vector<double> b(split.size());
    split.forcing_at(Part::Full, t, b);
    for (std::size_t k = 0; k < full.size(); ++k) {
        const double sum = f0[k] + f1[k] + f2[k];
        CHECK(std::abs(full[k] - sum) <= 1e-14 * (scale[k] + std::abs(b[k])));
    }
}

TEST_CASE("boundary forcing is constant in time when rf = 0", "[operator]") {
    const auto split = build(benchmark_case(1), 20, 10);
    std::vector<double> a(split.size()), b(split.size());
    for (Part part : {Part::Mixed, Part::S, Part::V}) {
        split.forcing_at(part, 0.0, a);
        split.forcing_at(part, 0.9, b);
        CHECK(a == b);
    }
}

TEST_CASE("line factorizations agree bit for bit with per-line banded solves", "[operator]") {
    const auto c = benchmark_case(3);
    const auto split = build(c, 24, 12);
    const auto& g = split.grid();
    const std::size_t m1 = g.m1(), m2 = g.m2();
    const double coeff = 0.013;

    for (Part part : {Part::S, Part::V}) {
        const auto& a = split.matrix(part);
        const auto rhs = random_vector(split.size(), 11);
        auto batched = rhs;
        split.factor_stage(part, coeff).solve_in_place(batched);

        const bool s_lines = part == Part::S;
        const std::size_t lines = s_lines ? m2 : m1, length = s_lines ? m1 : m2;
        const std::size_t band = s_lines ? 1 : 2;
        auto at = [&](std::size_t line, std::size_t p) { return s_lines ? p + line * m1 : line + p * m1; };
        for (std::size_t l = 0; l < lines; ++l) {
            BandedMatrix m(length, band, band);
            for (std::size_t p = 0; p < length; ++p) {
                for (std::size_t q = p >= band ? p - band : 0; q < std::min(length, p + band + 1); ++q) {
                    m.at(p, q) = (p == q ? 1.0 : 0.0) - coeff * a.at(at(l, p), at(l, q));
                }
            }
            std::vector<double> b(length);
            for (std::size_t p = 0; p < length; ++p) b[p] = rhs[at(l, p)];
            const auto x = BandedFactorization(m).solve(b);
            for (std::size_t p = 0; p < length; ++p) CHECK(x[p] == batched[at(l, p)]);
        }
    }
}

TEST_CASE("full factorization solves (I - cA) x = b", "[operator]") {
    const auto split = build(benchmark_case(1), 20, 10);
    const double coeff = 0.004;
    const auto x = random_vector(split.size(), 5, 1.0);
    std::vector<double> b(split.size());
    split.full_matrix().multiply(x, b);
    for (std::size_t k = 0; k < b.size(); ++k) b[k] = x[k] - coeff * b[k];
    const auto f = split.factor_full(coeff);
    f.solve_in_place(b);
    for (std::size_t k = 0; k < b.size(); ++k) CHECK(std::abs(b[k] - x[k]) <= 1e-11);
    CHECK(f.lower_bandwidth() <= split.grid().m2() + 1);
}

TEST_CASE("assembly checks", "[operator]") {
    const auto c = benchmark_case(1);
    CHECK_THROWS_AS(assemble(make_grid(c.option, c.domain, 1, 1), c.params, c.option, c.domain), AssemblyError);
    const auto wrong = make_grid(c.option, DomainSpec{900.0, 5.0, 20.0, 0.01}, 10, 5);
    CHECK_THROWS_AS(assemble(wrong, c.params, c.option, c.domain), AssemblyError);

    std::ostringstream coo;
    build(c, 6, 4).write_coo(Part::S, coo);
    CHECK(coo.str().find('\n') != std::string::npos);
}
