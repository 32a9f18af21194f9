#include "heston/harness.hpp"

#include "heston/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace heston {

std::vector<std::size_t> region_unknowns(const TensorGrid& grid, const MeasurementRegion& region) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < grid.m2(); ++j) {
        for (std::size_t i = 1; i <= grid.m1(); ++i) {
            if (region.contains(grid.s()[i], grid.v()[j])) out.push_back(grid.index(i, j));
        }
    }
    return out;
}

double max_abs_difference(std::span<const double> a, std::span<const double> b, std::span<const std::size_t> where) {
    if (a.size() != b.size()) throw DimensionError("max_abs_difference: length mismatch");
    double e = 0.0;
    for (const std::size_t k : where) {
        if (k >= a.size()) throw IndexError("max_abs_difference: index out of range");
        e = std::max(e, std::abs(a[k] - b[k]));
    }
    return e;
}

double fit_order(std::span<const std::pair<double, double>> samples) {
    if (samples.size() < 3) throw RangeError("fit_order needs at least three samples");
    double sx = 0.0, sy = 0.0;
    for (const auto& [h, e] : samples) {
        if (!(h > 0.0)) throw RangeError("fit_order: step sizes must be > 0");
        if (!(e > 0.0)) throw DegenerateFit("fit_order: zero or negative error");
        sx += std::log(h);
        sy += std::log(e);
    }
    const double n = static_cast<double>(samples.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [h, e] : samples) {
        const double dx = std::log(h) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(e) - my);
    }
    if (sxx == 0.0) throw DegenerateFit("fit_order: all step sizes equal");
    return sxy / sxx;
}

void write_csv_header(std::ostream& out) { out << "case,scheme,theta,damping,m1,m2,N,error,order\n"; }

void write_csv_row(std::ostream& out, const ErrorReport& r) {
    std::ostringstream line;
    line << std::setprecision(17);
    line << r.case_id << ',' << r.scheme << ',' << r.theta << ',' << (r.damping ? 1 : 0) << ',' << r.m1 << ','
         << r.m2 << ',' << r.steps << ',' << r.error << ',';
    if (r.order) line << *r.order;
    out << line.str() << '\n';
}

void write_csv(std::ostream& out, std::span<const ErrorReport> rows) {
    write_csv_header(out);
    for (const auto& r : rows) write_csv_row(out, r);
}

std::string scheme_label(const SchemeConfig& cfg) {
    if (cfg.scheme == Scheme::HV) {
        if (cfg.theta == kThetaHV1) return "hv1";
        if (cfg.theta == kThetaHV2) return "hv2";
    }
    return std::string(scheme_name(cfg.scheme));
}

namespace {

SchemeConfig reference_scheme(double maturity, int steps) {
    SchemeConfig cfg;
    cfg.scheme = Scheme::HV;
    cfg.theta = kThetaHV2;
    cfg.damping = true;
    cfg.steps = steps;
    cfg.horizon = maturity;
    return cfg;
}

ErrorReport base_report(int case_id, const SchemeConfig& cfg, const TensorGrid& grid) {
    ErrorReport r;
    r.case_id = case_id;
    r.scheme = scheme_label(cfg);
    r.theta = cfg.scheme == Scheme::CN || cfg.scheme == Scheme::RKC ? 0.0 : cfg.theta;
    r.damping = cfg.damping;
    r.m1 = grid.m1();
    r.m2 = grid.m2();
    r.steps = cfg.steps;
    return r;
}

}  // namespace

ErrorReport spatial_error(const BenchmarkCase& model, int case_id, std::size_t m1, std::size_t m2,
                          const SpatialOptions& opts) {
    if (m1 < 10 || m2 < 10) throw RangeError("spatial_error needs m1, m2 >= 10");
    if (model.option.is_barrier()) throw DomainError("spatial_error needs a European call");
    if (opts.initial_steps < 1 || opts.max_steps < opts.initial_steps) throw RangeError("bad step range");
    validate(model.params, model.option);

    const TensorGrid grid = make_grid(model.option, model.domain, m1, m2);
    const OperatorSplit split = assemble(grid, model.params, model.option, model.domain);
    const auto region = MeasurementRegion::for_strike(model.option.strike);

    // Exact prices on the tensor block of region nodes.
    std::vector<std::size_t> is, js;
    for (std::size_t i = 1; i <= grid.m1(); ++i) {
        if (grid.s()[i] > region.s_lo && grid.s()[i] < region.s_hi) is.push_back(i);
    }
    for (std::size_t j = 0; j < grid.m2(); ++j) {
        if (grid.v()[j] > region.v_lo && grid.v()[j] < region.v_hi) js.push_back(j);
    }
    std::vector<double> s_nodes, v_nodes;
    for (auto i : is) s_nodes.push_back(grid.s()[i]);
    for (auto j : js) v_nodes.push_back(grid.v()[j]);
    const PriceSurface exact = price_surface(model.params, model.option, s_nodes, v_nodes);

    struct Measured {
        double abs = 0.0, rel = 0.0;
    };
    auto measure = [&](int steps) {
        const auto u = solve(split, reference_scheme(model.option.maturity, steps));
        Measured m;
        for (std::size_t b = 0; b < js.size(); ++b) {
            for (std::size_t a = 0; a < is.size(); ++a) {
                const double x = exact.value(a, b);
                const double d = std::abs(u[grid.index(is[a], js[b])] - x);
                m.abs = std::max(m.abs, d);
                if (x >= 1.0) m.rel = std::max(m.rel, d / x);
            }
        }
        return m;
    };

    int n = opts.initial_steps;
    Measured prev = measure(n);
    while (true) {
        const int next_n = 2 * n;
        const Measured next = measure(next_n);
        n = next_n;
        const bool settled = std::abs(next.abs - prev.abs) < opts.step_tolerance * next.abs;
        prev = next;
        if (settled) break;
        if (2 * n > opts.max_steps) throw NumericalError("spatial_error: time error did not settle by N = " +
                                                         std::to_string(n));
    }

    ErrorReport r = base_report(case_id, reference_scheme(model.option.maturity, n), grid);
    r.error = prev.abs;
    r.relative_error = prev.rel;
    return r;
}

ErrorReport spatial_error(int case_id, std::size_t m1, std::size_t m2, const SpatialOptions& opts) {
    return spatial_error(benchmark_case(case_id), case_id, m1, m2, opts);
}

TemporalStudy::TemporalStudy(BenchmarkCase model, int case_id, std::size_t m1, std::size_t m2, int n_max)
    : model_(std::move(model)),
      case_id_(case_id),
      split_(assemble(make_grid(model_.option, model_.domain, m1, m2), model_.params, model_.option, model_.domain)),
      region_(region_unknowns(split_.grid(), MeasurementRegion::for_strike(model_.option.strike))),
      n_ref_(std::max(10 * n_max, 5000)) {
    if (n_max < 1) throw RangeError("TemporalStudy needs n_max >= 1");
    const auto coarse = solve(split_, reference_scheme(model_.option.maturity, n_ref_));
    reference_ = solve(split_, reference_scheme(model_.option.maturity, 2 * n_ref_));
    reference_gap_ = max_abs_difference(coarse, reference_, region_);
}

bool TemporalStudy::refine_reference(double smallest_error, int max_steps) {
    bool changed = false;
    while (!reference_valid_for(smallest_error) && 4 * n_ref_ <= max_steps) {
        n_ref_ *= 2;
        auto finer = solve(split_, reference_scheme(model_.option.maturity, 2 * n_ref_));
        reference_gap_ = max_abs_difference(reference_, finer, region_);
        reference_ = std::move(finer);
        changed = true;
    }
    return changed;
}

std::vector<double> TemporalStudy::start_after_damping(double dt) {
    {
        std::lock_guard lock(mutex_);
        if (auto it = damped_.find(dt); it != damped_.end()) return it->second;
    }
    auto u = damped_start(split_, dt);
    std::lock_guard lock(mutex_);
    return damped_.emplace(dt, std::move(u)).first->second;
}

double TemporalStudy::spectral_radius() {
    std::lock_guard lock(mutex_);
    if (!radius_) radius_ = estimate_spectral_radius(split_).radius;
    return *radius_;
}

ErrorReport TemporalStudy::error(SchemeConfig cfg, int steps) {
    cfg.steps = steps;
    cfg.horizon = model_.option.maturity;
    validate(cfg);
    if (cfg.scheme == Scheme::RKC && !cfg.spectral_radius) cfg.spectral_radius = spectral_radius();

    std::vector<double> u;
    if (cfg.damping) {
        const auto start = start_after_damping(cfg.dt());
        u = integrate(split_, cfg, cfg.dt(), start, steps - 1);
    } else {
        u = integrate(split_, cfg, 0.0, split_.initial(), steps);
    }
    ErrorReport r = base_report(case_id_, cfg, split_.grid());
    double e = 0.0;
    for (const std::size_t k : region_) {
        const double d = std::abs(u[k] - reference_[k]);
        // An unstable run overflows; report it as infinitely large rather than NaN.
        e = std::isnan(d) ? INFINITY : std::max(e, d);
    }
    r.error = e;
    return r;
}

std::vector<ErrorReport> TemporalStudy::errors(const SchemeConfig& cfg, std::span<const int> steps, int jobs) {
    std::vector<ErrorReport> out(steps.size());
    if (jobs <= 1) {
        for (std::size_t k = 0; k < steps.size(); ++k) out[k] = error(cfg, steps[k]);
        return out;
    }
    if (cfg.scheme == Scheme::RKC && !cfg.spectral_radius) spectral_radius();
    for (std::size_t first = 0; first < steps.size(); first += static_cast<std::size_t>(jobs)) {
        const std::size_t last = std::min(steps.size(), first + static_cast<std::size_t>(jobs));
        std::vector<std::future<ErrorReport>> pending;
        for (std::size_t k = first; k < last; ++k) {
            pending.push_back(std::async(std::launch::async, [this, &cfg, n = steps[k]] { return error(cfg, n); }));
        }
        for (std::size_t k = first; k < last; ++k) out[k] = pending[k - first].get();
    }
    return out;
}

ErrorReport temporal_error(int case_id, const SchemeConfig& cfg, int steps, std::size_t m1, std::size_t m2) {
    TemporalStudy study(benchmark_case(case_id), case_id, m1, m2, steps);
    return study.error(cfg, steps);
}

double smallest_error(std::span<const ErrorReport> errors) {
    double e = INFINITY;
    for (const auto& r : errors) {
        if (std::isfinite(r.error) && r.error > 0.0) e = std::min(e, r.error);
    }
    return e;
}

std::vector<std::vector<ErrorReport>> validated_errors(TemporalStudy& study, std::span<const SchemeConfig> configs,
                                                       std::span<const int> steps, int max_reference_steps,
                                                       int jobs) {
    std::vector<std::vector<ErrorReport>> out;
    while (true) {
        out.clear();
        double smallest = INFINITY;
        for (const auto& cfg : configs) {
            out.push_back(study.errors(cfg, steps, jobs));
            smallest = std::min(smallest, smallest_error(out.back()));
        }
        if (!std::isfinite(smallest) || !study.refine_reference(smallest, max_reference_steps)) return out;
    }
}

StabilityVerdict stability_verdict(std::vector<ErrorReport> errors, double uptick_tolerance) {
    StabilityVerdict v;
    for (std::size_t k = 0; k < errors.size(); ++k) {
        if (!(errors[k].error <= v.max_error)) {
            v.max_error = errors[k].error;
            v.peak_index = k;
        }
        if (k > 0 && !(errors[k].error <= (1.0 + uptick_tolerance) * errors[k - 1].error)) v.monotone = false;
    }
    v.errors = std::move(errors);
    return v;
}

StabilityVerdict stability_sweep(TemporalStudy& study, const SchemeConfig& cfg, std::span<const int> steps,
                                 int jobs) {
    if (!std::is_sorted(steps.begin(), steps.end())) throw RangeError("stability_sweep: N list must increase");
    return stability_verdict(study.errors(cfg, steps, jobs));
}

StabilityVerdict stability_sweep(int case_id, const SchemeConfig& cfg, std::span<const int> steps, std::size_t m1,
                                 std::size_t m2) {
    if (steps.empty()) throw RangeError("stability_sweep: empty N list");
    TemporalStudy study(benchmark_case(case_id), case_id, m1, m2, *std::max_element(steps.begin(), steps.end()));
    return stability_sweep(study, cfg, steps);
}

double fitted_temporal_order(std::span<const ErrorReport> errors) {
    std::vector<std::pair<double, double>> samples;
    for (const auto& r : errors) samples.emplace_back(1.0 / r.steps, r.error);
    return fit_order(samples);
}

double fitted_spatial_order(std::span<const ErrorReport> errors) {
    std::vector<std::pair<double, double>> samples;
    for (const auto& r : errors) samples.emplace_back(1.0 / static_cast<double>(r.m2), r.error);
    return fit_order(samples);
}

namespace {

/// Start of the 4-point stencil around x on nodes[0..n-1] (n >= 4).
std::size_t cubic_start(std::span<const double> nodes, double x) {
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    const std::ptrdiff_t pos = (it - nodes.begin()) - 1;  // nodes[pos] <= x < nodes[pos + 1]
    const std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(nodes.size()) - 4;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(pos - 1, 0, hi));
}

std::array<double, 4> lagrange_weights(std::span<const double> nodes, std::size_t start, double x) {
    std::array<double, 4> w{};
    for (std::size_t a = 0; a < 4; ++a) {
        double l = 1.0;
        for (std::size_t b = 0; b < 4; ++b) {
            if (b != a) l *= (x - nodes[start + b]) / (nodes[start + a] - nodes[start + b]);
        }
        w[a] = l;
    }
    return w;
}

}  // namespace

double interpolate_solution(const TensorGrid& grid, const OptionSpec& option, const HestonParams& params, double t,
                            std::span<const double> u, double s, double v) {
    if (u.size() != grid.unknowns()) throw DimensionError("interpolate_solution: wrong vector length");
    const auto sn = grid.s().nodes();
    const auto vn = grid.v().nodes();
    if (sn.size() < 4 || vn.size() < 4) throw DimensionError("interpolate_solution needs at least 4 nodes per axis");
    if (s < sn.front() || s > sn.back() || v < vn.front() || v > vn.back()) {
        throw DomainError("interpolate_solution: point outside the grid");
    }
    const BoundaryValues bv = boundary_values(params, option, t);
    auto node_value = [&](std::size_t i, std::size_t j) {
        if (j == grid.m2()) return bv.upper_v(sn[i]);
        if (i == 0) return bv.lower_s;
        return u[grid.index(i, j)];
    };
    const std::size_t i0 = cubic_start(sn, s), j0 = cubic_start(vn, v);
    const auto ws = lagrange_weights(sn, i0, s);
    const auto wv = lagrange_weights(vn, j0, v);
    double out = 0.0;
    for (std::size_t b = 0; b < 4; ++b) {
        double row = 0.0;
        for (std::size_t a = 0; a < 4; ++a) row += ws[a] * node_value(i0 + a, j0 + b);
        out += wv[b] * row;
    }
    return out;
}

std::vector<ErrorReport> barrier_selfconvergence(const BenchmarkCase& model, int case_id,
                                                 std::span<const std::size_t> m2_list, const BarrierOptions& opts) {
    if (!model.option.is_barrier()) throw BarrierError("barrier_selfconvergence needs a down-and-out call");
    if (m2_list.empty()) throw RangeError("barrier_selfconvergence: empty grid list");
    validate(model.params, model.option);
    const SchemeConfig cfg = reference_scheme(model.option.maturity, opts.steps);

    const std::size_t m2_ref = 2 * *std::max_element(m2_list.begin(), m2_list.end());
    const TensorGrid ref_grid = make_grid(model.option, model.domain, 2 * m2_ref, m2_ref);
    const auto ref = solve(assemble(ref_grid, model.params, model.option, model.domain), cfg);

    std::vector<ErrorReport> out;
    for (const std::size_t m2 : m2_list) {
        const TensorGrid grid = make_grid(model.option, model.domain, 2 * m2, m2);
        const auto u = solve(assemble(grid, model.params, model.option, model.domain), cfg);
        const auto region = region_unknowns(grid, MeasurementRegion::for_strike(model.option.strike));
        double e = 0.0;
        for (const std::size_t k : region) {
            const double s = grid.s()[grid.s_index(k)], v = grid.v()[grid.v_index(k)];
            const double r = interpolate_solution(ref_grid, model.option, model.params, model.option.maturity, ref, s, v);
            e = std::max(e, std::abs(u[k] - r));
        }
        ErrorReport r = base_report(case_id, cfg, grid);
        r.error = e;
        out.push_back(r);
    }
    if (out.size() >= 3) out.back().order = fitted_spatial_order(out);
    return out;
}

std::vector<ErrorReport> barrier_selfconvergence(int case_id, double barrier, std::span<const std::size_t> m2_list,
                                                 const BarrierOptions& opts) {
    return barrier_selfconvergence(barrier_case(case_id, barrier, true), case_id, m2_list, opts);
}

}  // namespace heston
