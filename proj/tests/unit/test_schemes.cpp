#include "heston/error.hpp"
#include "heston/harness.hpp"
#include "heston/kernels.hpp"
#include "heston/timestep.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace heston;

namespace {

// A single unknown: U' = (z0 + z1 + z2) U (+ forcing), with each A_j the 1x1 matrix z_j.
OperatorSplit scalar_split(double z0, double z1, double z2, BoundaryForcing forcing = {}) {
    TensorGrid grid(uniform_mesh(1, 0.0, 1.0), uniform_mesh(1, 0.0, 1.0));
    std::array<DiagonalMatrix, 3> parts{DiagonalMatrix(1), DiagonalMatrix(1), DiagonalMatrix(1)};
    parts[0].add(0, 0, z0);
    parts[1].add(0, 0, z1);
    parts[2].add(0, 0, z2);
    return OperatorSplit(grid, std::move(parts), {std::move(forcing), BoundaryForcing{}, BoundaryForcing{}}, {1.0});
}

using Stepper = void (*)(const OperatorSplit&, double, double, double, std::span<const double>, std::span<double>,
                         StepWorkspace&);

double amplification(Stepper step, double theta, double z0, double z1, double z2) {
    const auto split = scalar_split(z0, z1, z2);
    StepWorkspace ws(1);
    ws.prepare(split, theta, 1.0);
    std::vector<double> u{1.0}, out(1);
    step(split, 0.0, 1.0, theta, u, out, ws);
    return out[0];
}

// Random 6-unknown (m1 = 3, m2 = 2) split system: A1 couples within s-lines (tridiagonal),
// A2 within v-lines, A0 anything. With `conservative` every row of A sums to zero.
OperatorSplit random_split(unsigned seed, bool conservative = false) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TensorGrid grid(uniform_mesh(3, 0.0, 1.0), uniform_mesh(2, 0.0, 1.0));
    std::array<DiagonalMatrix, 3> parts{DiagonalMatrix(6), DiagonalMatrix(6), DiagonalMatrix(6)};
    for (std::size_t r = 0; r < 6; ++r) {
        for (std::size_t c = 0; c < 6; ++c) {
            parts[0].add(r, c, u(rng));
            const bool same_s_line = r / 3 == c / 3 && (r > c ? r - c : c - r) <= 1;
            if (same_s_line) parts[1].add(r, c, u(rng));
            if (r % 3 == c % 3) parts[2].add(r, c, u(rng));
        }
    }
    if (conservative) {
        for (auto& a : parts) {
            for (std::size_t r = 0; r < 6; ++r) {
                double sum = 0.0;
                for (std::size_t c = 0; c < 6; ++c) sum += a.at(r, c);
                a.add(r, r, -sum);
            }
        }
    }
    std::vector<double> shape(6);
    for (auto& x : shape) x = u(rng);
    BoundaryForcing f{shape, [](double t) { return std::exp(-0.3 * t); }};
    std::vector<double> u0(6);
    for (auto& x : u0) x = u(rng);
    return OperatorSplit(grid, std::move(parts), {conservative ? BoundaryForcing{} : f, BoundaryForcing{}, BoundaryForcing{}},
                         u0);
}

}  // namespace

TEST_CASE("ADI amplification factors", "[schemes]") {
    CHECK(std::abs(amplification(step_do, 0.5, 0, -2, -2)) <= 1e-14);
    CHECK(amplification(step_cs, 0.5, -1, 0, 0) == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(amplification(step_mcs, 1.0 / 3.0, -1, 0, 0) == Catch::Approx(0.5).epsilon(1e-14));
    for (double theta : {0.2, kThetaHV1, 0.5, kThetaHV2, 1.0}) {
        CHECK(amplification(step_hv, theta, -1, 0, 0) == Catch::Approx(0.5).epsilon(1e-14));
    }
    CHECK(std::abs(amplification(step_hv, 0.5, 0, -1, -1) - 1.0 / 81.0) <= 1e-14);
    for (Stepper s : {step_do, step_cs, step_mcs, step_hv}) CHECK(amplification(s, 0.4, 0, 0, 0) == 1.0);
}

TEST_CASE("CS reduces to Do without a mixed term", "[schemes]") {
    const auto c = barrier_case(2, 95.0, true);
    const auto split = assemble(make_grid(c.option, c.domain, 40, 20), c.params, c.option, c.domain);
    const double dt = 0.05;
    StepWorkspace ws(split.size());
    ws.prepare(split, 0.5, dt);
    std::vector<double> a(split.size()), b(split.size());
    step_do(split, 0.1, dt, 0.5, split.initial(), a, ws);
    step_cs(split, 0.1, dt, 0.5, split.initial(), b, ws);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-13 * (1.0 + std::abs(a[k])));

    SchemeConfig cfg{Scheme::Do, 0.5};
    cfg.steps = 1;
    cfg.horizon = c.option.maturity;
    const auto u_do = solve(split, cfg);
    cfg.scheme = Scheme::CS;
    const auto u_cs = solve(split, cfg);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(u_do[k] - u_cs[k]) <= 1e-13 * (1.0 + std::abs(u_do[k])));
}

TEST_CASE("MCS with theta 1/2 equals CS with theta 1/2", "[schemes]") {
    for (unsigned seed = 1; seed <= 20; ++seed) {
        const auto split = random_split(seed);
        StepWorkspace ws(6);
        ws.prepare(split, 0.5, 0.3);
        std::vector<double> a(6), b(6);
        step_cs(split, 0.2, 0.3, 0.5, split.initial(), a, ws);
        step_mcs(split, 0.2, 0.3, 0.5, split.initial(), b, ws);
        for (std::size_t k = 0; k < 6; ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-13 * (1.0 + std::abs(a[k])));
    }
}

TEST_CASE("every scheme keeps a steady state", "[schemes]") {
    const auto split = random_split(42, true);
    for (Scheme s : {Scheme::CN, Scheme::Do, Scheme::CS, Scheme::MCS, Scheme::HV, Scheme::RKC}) {
        SchemeConfig cfg{s, s == Scheme::CN || s == Scheme::RKC ? 0.5 : default_theta(s)};
        cfg.steps = 7;
        cfg.horizon = 0.5;
        cfg.damping = s == Scheme::MCS;
        // Start from a constant, which every conservative A annihilates.
        std::vector<double> c(6, 2.5);
        const auto u = integrate(split, cfg, 0.0, c, cfg.steps);
        for (double x : u) CHECK(std::abs(x - 2.5) <= 1e-12);
    }
}

TEST_CASE("Crank-Nicolson on scalar problems", "[schemes]") {
    auto run = [](const OperatorSplit& split) {
        StepWorkspace ws(1);
        const auto full = split.factor_full(0.5);
        std::vector<double> out(1);
        step_cn(split, 0.0, 1.0, split.initial(), out, full, ws);
        return out[0];
    };
    CHECK(run(scalar_split(0, -1, 0)) == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(run(scalar_split(0, 0, 0)) == 1.0);
    // U' = t from U = 0: the trapezoidal rule is exact.
    TensorGrid grid(uniform_mesh(1, 0.0, 1.0), uniform_mesh(1, 0.0, 1.0));
    const OperatorSplit linear(grid, {DiagonalMatrix(1), DiagonalMatrix(1), DiagonalMatrix(1)},
                               {BoundaryForcing{{1.0}, [](double t) { return t; }}, BoundaryForcing{}, BoundaryForcing{}},
                               {0.0});
    CHECK(run(linear) == Catch::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("RKC stage count", "[rkc]") {
    CHECK(rkc_stage_count(0.01, 5.1e4) == 40);
    CHECK(rkc_stage_count(1.0, 3.0) == 4);
    CHECK(rkc_stage_count(1e-12, 5e4) == 2);
    CHECK(rkc_stage_count(1.0, 0.0) == 2);
    CHECK_THROWS_AS(rkc_stage_count(0.0, 1.0), RangeError);
}

TEST_CASE("RKC stability interval", "[rkc]") {
    const double eps = 10.0;
    for (int nu = 2; nu <= 60; ++nu) {
        const double beta = 0.34 * (nu * nu - 1);
        for (int k = 1; k < 400; ++k) {
            const double z = -beta * k / 400.0;
            CHECK(std::abs(rkc_amplification(nu, eps, z)) <= 1.0);
        }
        CHECK(std::abs(rkc_amplification(nu, eps, -2 * beta)) > 1.0);
        CHECK(rkc_amplification(nu, eps, 0.0) == Catch::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("RKC step reproduces its stability polynomial", "[rkc]") {
    for (int nu : {2, 5, 13}) {
        for (double z : {-0.5, -3.0, -20.0}) {
            const auto split = scalar_split(0, z, 0);
            StepWorkspace ws(1);
            std::vector<double> out(1);
            step_rkc(split, 0.0, 1.0, nu, 10.0, split.initial(), out, ws);
            CHECK(out[0] == Catch::Approx(rkc_amplification(nu, 10.0, z)).epsilon(1e-12));
        }
        const auto still = scalar_split(0, 0, 0);
        StepWorkspace ws(1);
        std::vector<double> out(1);
        step_rkc(still, 0.0, 1.0, nu, 10.0, still.initial(), out, ws);
        // The stage weights sum to one up to rounding.
        CHECK(std::abs(out[0] - 1.0) <= 1e-15);
    }
}

TEST_CASE("damping is two backward-Euler half steps", "[schemes]") {
    const auto c = benchmark_case(1);
    const auto split = assemble(make_grid(c.option, c.domain, 30, 15), c.params, c.option, c.domain);
    const double dt = 0.1;
    const auto damped = damped_start(split, dt);

    const auto be = split.factor_full(dt / 2);
    std::vector<double> u(split.initial().begin(), split.initial().end()), b(split.size());
    for (double t : {dt / 2, dt}) {
        split.forcing_at(Part::Full, t, b);
        for (std::size_t k = 0; k < u.size(); ++k) u[k] += dt / 2 * b[k];
        be.solve_in_place(u);
    }
    for (std::size_t k = 0; k < u.size(); ++k) CHECK(std::abs(u[k] - damped[k]) <= 1e-12 * (1 + std::abs(u[k])));
}

TEST_CASE("scheme configuration validation", "[schemes]") {
    SchemeConfig cfg{Scheme::Do, 0.0};
    CHECK_THROWS_AS(validate(cfg), RangeError);
    cfg.theta = 0.5;
    cfg.steps = 0;
    CHECK_THROWS_AS(validate(cfg), RangeError);
    cfg.steps = 1;
    cfg.horizon = -1;
    CHECK_THROWS_AS(validate(cfg), RangeError);
    SchemeConfig rkc{Scheme::RKC, 0.0};
    CHECK_NOTHROW(validate(rkc));
    rkc.eps = 0.0;
    CHECK_THROWS_AS(validate(rkc), RangeError);
    CHECK(default_theta(Scheme::MCS) == Catch::Approx(1.0 / 3.0));
    CHECK(default_theta(Scheme::HV) == Catch::Approx(0.5 + std::sqrt(3.0) / 6));
}

TEST_CASE("full solves are identical with scalar and AVX2 kernels", "[kernels]") {
    if (!kernels::isa_available(kernels::Isa::Avx2)) SKIP("AVX2 not available");
    const auto c = benchmark_case(4);
    const auto split = assemble(make_grid(c.option, c.domain, 40, 20), c.params, c.option, c.domain);
    const auto before = kernels::active_isa();
    for (Scheme s : {Scheme::HV, Scheme::MCS, Scheme::RKC}) {
        SchemeConfig cfg{s, default_theta(s)};
        cfg.steps = 20;
        cfg.horizon = c.option.maturity;
        cfg.damping = true;
        cfg.spectral_radius = 2e4;
        kernels::set_active_isa(kernels::Isa::Scalar);
        const auto a = solve(split, cfg);
        kernels::set_active_isa(kernels::Isa::Avx2);
        const auto b = solve(split, cfg);
        CHECK(a == b);
    }
    kernels::set_active_isa(before);
}

TEST_CASE("MCS with damping is second order in time on the case 1 grid", "[schemes][slow]") {
    const std::array<int, 2> n{100, 200};
    TemporalStudy study(benchmark_case(1), 1, 100, 50, n.back());
    SchemeConfig cfg{Scheme::MCS, 1.0 / 3.0};
    cfg.damping = true;
    const auto e = study.errors(cfg, n);
    CHECK(e[0].error / e[1].error == Catch::Approx(4.0).epsilon(0.3));
}
