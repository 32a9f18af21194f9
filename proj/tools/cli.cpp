#include "cli.hpp"

#include "heston/config.hpp"
#include "heston/error.hpp"
#include "heston/harness.hpp"
#include "heston/kernels.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace heston::cli {

namespace {

struct ModelArgs {
    int case_id = 0;
    std::string config;
};

struct SchemeArgs {
    std::string scheme = "mcs";
    std::optional<double> theta;
    bool damping = false;
};

struct GridArgs {
    std::size_t m1 = 0;
    std::size_t m2 = 50;
};

void add_model_options(CLI::App& app, ModelArgs& m) {
    auto* c = app.add_option("--case", m.case_id, "Built-in parameter set 1..4");
    auto* j = app.add_option("--config", m.config, "JSON model file")->check(CLI::ExistingFile);
    c->excludes(j);
}

void add_scheme_options(CLI::App& app, SchemeArgs& s) {
    app.add_option("--scheme", s.scheme, "cn, do, cs, mcs, hv1, hv2, hv or rkc")
        ->check(CLI::IsMember({"cn", "do", "cs", "mcs", "hv", "hv1", "hv2", "rkc"}));
    app.add_option("--theta", s.theta, "Override the scheme's theta");
    app.add_flag("--damping", s.damping, "Two backward-Euler half steps at t = 0");
}

void add_grid_options(CLI::App& app, GridArgs& g) {
    app.add_option("--m1", g.m1, "s-intervals (default 2*m2)");
    app.add_option("--m2", g.m2, "v-intervals");
}

BenchmarkCase resolve_model(const ModelArgs& m) {
    if (!m.config.empty()) return load_model_config(m.config);
    if (m.case_id == 0) throw RangeError("one of --case or --config is required");
    return benchmark_case(m.case_id);
}

SchemeConfig resolve_scheme(const SchemeArgs& s, const BenchmarkCase& model) {
    static const std::map<std::string, Scheme> names{{"cn", Scheme::CN}, {"do", Scheme::Do},   {"cs", Scheme::CS},
                                                     {"mcs", Scheme::MCS}, {"hv", Scheme::HV}, {"hv1", Scheme::HV},
                                                     {"hv2", Scheme::HV},  {"rkc", Scheme::RKC}};
    SchemeConfig cfg;
    cfg.scheme = names.at(s.scheme);
    cfg.theta = s.scheme == "hv1" ? kThetaHV1 : default_theta(cfg.scheme);
    if (s.theta) cfg.theta = *s.theta;
    cfg.damping = s.damping;
    cfg.horizon = model.option.maturity;
    return cfg;
}

std::size_t m1_for(const GridArgs& g) { return g.m1 ? g.m1 : 2 * g.m2; }

/// Writes to the named file, or to `out` when the name is empty or "-".
class Sink {
public:
    Sink(const std::string& path, std::ostream& out) : out_(&out) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw RangeError("cannot open output file " + path);
            out_ = &file_;
        }
    }
    std::ostream& stream() { return *out_; }

private:
    std::ofstream file_;
    std::ostream* out_;
};

void print_fit(std::ostream& err, const char* what, const std::vector<ErrorReport>& rows) {
    if (rows.size() >= 3 && rows.back().order) {
        err << what << " order " << std::fixed << std::setprecision(3) << *rows.back().order << '\n';
    }
}

int cmd_price(const ModelArgs& ma, const SchemeArgs& sa, const GridArgs& ga, int steps, double s, double v,
              std::ostream& out) {
    const BenchmarkCase model = resolve_model(ma);
    SchemeConfig cfg = resolve_scheme(sa, model);
    cfg.steps = steps;
    validate(cfg);
    const TensorGrid grid = make_grid(model.option, model.domain, m1_for(ga), ga.m2);
    const OperatorSplit split = assemble(grid, model.params, model.option, model.domain);
    const auto u = solve(split, cfg);
    const double fd = interpolate_solution(grid, model.option, model.params, model.option.maturity, u, s, v);

    out << std::setprecision(10);
    out << "s " << s << "\nv " << v << "\nfd_price " << fd << '\n';
    if (!model.option.is_barrier()) {
        const CallPrice ref = call_price({model.params, s, v, model.option.strike, model.option.maturity});
        out << "reference_price " << ref.price << "\ndifference " << fd - ref.price << '\n';
    }
    return 0;
}

int cmd_spatial(const ModelArgs& ma, const std::vector<std::size_t>& m2s, const std::string& output,
                std::ostream& out, std::ostream& err) {
    const BenchmarkCase model = resolve_model(ma);
    std::vector<ErrorReport> rows;
    for (const std::size_t m2 : m2s) {
        err << "spatial error m1=" << 2 * m2 << " m2=" << m2 << "...\n";
        rows.push_back(spatial_error(model, ma.case_id, 2 * m2, m2));
    }
    if (rows.size() >= 3) rows.back().order = fitted_spatial_order(rows);
    Sink sink(output, out);
    write_csv(sink.stream(), rows);
    print_fit(err, "spatial", rows);
    return 0;
}

int cmd_temporal(const ModelArgs& ma, const SchemeArgs& sa, const GridArgs& ga, const std::vector<int>& steps,
                 bool sweep, int jobs, const std::string& output, std::ostream& out, std::ostream& err) {
    const BenchmarkCase model = resolve_model(ma);
    SchemeConfig cfg = resolve_scheme(sa, model);
    cfg.steps = steps.front();
    validate(cfg);
    if (!std::is_sorted(steps.begin(), steps.end())) throw RangeError("--steps must be increasing");
    err << "reference solution (HV2, damping)...\n";
    TemporalStudy study(model, ma.case_id, m1_for(ga), ga.m2, steps.back());
    std::vector<ErrorReport> rows;
    if (sweep) {
        const auto verdict = stability_sweep(study, cfg, steps, jobs);
        rows = verdict.errors;
        err << "monotone " << (verdict.monotone ? "yes" : "no") << "  max error " << verdict.max_error << " at N="
            << rows[verdict.peak_index].steps << '\n';
    } else {
        SchemeConfig one[] = {cfg};
        rows = validated_errors(study, one, steps, 64 * study.reference_steps(), jobs).front();
        if (!study.reference_valid_for(smallest_error(rows))) {
            err << "warning: reference gap " << study.reference_gap() << " is not below 1% of the smallest error\n";
        }
    }
    if (rows.size() >= 3 && std::all_of(rows.begin(), rows.end(), [](const auto& r) { return std::isfinite(r.error) && r.error > 0; })) {
        rows.back().order = fitted_temporal_order(rows);
    }
    Sink sink(output, out);
    write_csv(sink.stream(), rows);
    print_fit(err, "temporal", rows);
    return 0;
}

int cmd_barrier(const ModelArgs& ma, double barrier, bool original, const std::vector<std::size_t>& m2s, int steps,
                const std::string& output, std::ostream& out, std::ostream& err) {
    if (ma.case_id == 0) throw RangeError("barrier needs --case");
    const BenchmarkCase model = barrier_case(ma.case_id, barrier, !original);
    err << "barrier self-convergence, reference m2=" << 2 * *std::max_element(m2s.begin(), m2s.end()) << "...\n";
    const auto rows = barrier_selfconvergence(model, ma.case_id, m2s, {steps});
    Sink sink(output, out);
    write_csv(sink.stream(), rows);
    print_fit(err, "spatial", rows);
    return 0;
}

int cmd_spectral(const ModelArgs& ma, const GridArgs& ga, std::ostream& out) {
    const BenchmarkCase model = resolve_model(ma);
    const TensorGrid grid = make_grid(model.option, model.domain, m1_for(ga), ga.m2);
    const auto est = estimate_spectral_radius(assemble(grid, model.params, model.option, model.domain));
    out << std::setprecision(6) << "spectral_radius " << est.radius << "\niterations " << est.iterations
        << "\nconverged " << (est.converged ? "yes" : "no") << '\n';
    return 0;
}

int cmd_dump(const ModelArgs& ma, const GridArgs& ga, const std::string& grid_csv, const std::string& coo,
             const std::string& part, std::ostream& out) {
    const BenchmarkCase model = resolve_model(ma);
    const TensorGrid grid = make_grid(model.option, model.domain, m1_for(ga), ga.m2);
    if (!grid_csv.empty()) {
        Sink sink(grid_csv, out);
        grid.write_csv(sink.stream());
    }
    if (!coo.empty()) {
        static const std::map<std::string, Part> parts{{"a0", Part::Mixed}, {"a1", Part::S}, {"a2", Part::V}, {"a", Part::Full}};
        const OperatorSplit split = assemble(grid, model.params, model.option, model.domain);
        Sink sink(coo, out);
        split.write_coo(parts.at(part), sink.stream());
    }
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Heston PDE: ADI time stepping on non-uniform grids"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");
    std::string isa;
    app.add_option("--isa", isa, "Force kernel variant: scalar or avx2")->check(CLI::IsMember({"scalar", "avx2"}));

    ModelArgs model;
    SchemeArgs scheme;
    GridArgs grid;
    std::string output;
    int jobs = 1;

    auto* price = app.add_subcommand("price", "FD price at (s, v) next to the semi-analytic price");
    int price_steps = 100;
    double s = 100.0, v = 0.04;
    add_model_options(*price, model);
    add_scheme_options(*price, scheme);
    add_grid_options(*price, grid);
    price->add_option("--steps", price_steps, "Time steps N");
    price->add_option("--s", s, "Asset price");
    price->add_option("--v", v, "Variance");

    auto* spatial = app.add_subcommand("spatial-error", "Global spatial errors against the semi-analytic price");
    std::vector<std::size_t> m2_list{10, 20, 30, 40, 50};
    add_model_options(*spatial, model);
    spatial->add_option("--m2", m2_list, "Comma-separated v-grid sizes (m1 = 2 m2)")->delimiter(',');
    spatial->add_option("--output", output, "CSV file (default: stdout)");

    std::vector<int> steps{10, 20, 50, 100, 200, 500};
    auto* temporal = app.add_subcommand("temporal-error", "Global temporal errors against a fine-step reference");
    add_model_options(*temporal, model);
    add_scheme_options(*temporal, scheme);
    add_grid_options(*temporal, grid);
    temporal->add_option("--steps", steps, "Comma-separated N list")->delimiter(',');
    temporal->add_option("--output", output, "CSV file (default: stdout)");
    temporal->add_option("--jobs", jobs, "Cells run concurrently")->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("stability-sweep", "Error vs N with a monotonicity verdict");
    add_model_options(*sweep, model);
    add_scheme_options(*sweep, scheme);
    add_grid_options(*sweep, grid);
    sweep->add_option("--steps", steps, "Comma-separated N list")->delimiter(',');
    sweep->add_option("--output", output, "CSV file (default: stdout)");
    sweep->add_option("--jobs", jobs, "Cells run concurrently")->check(CLI::PositiveNumber);

    auto* barrier = app.add_subcommand("barrier", "Down-and-out call grid self-convergence");
    double barrier_level = 95.0;
    bool original = false;
    int barrier_steps = BarrierOptions{}.steps;
    barrier->add_option("--case", model.case_id, "Built-in parameter set 1..4")->required();
    barrier->add_option("--barrier", barrier_level, "Barrier B < K");
    barrier->add_flag("--original", original, "Keep the case's rho, rd, rf (default: rho = 0, rd = rf = 0.03)");
    barrier->add_option("--m2", m2_list, "Comma-separated v-grid sizes (m1 = 2 m2)")->delimiter(',');
    barrier->add_option("--steps", barrier_steps, "Time steps on every grid");
    barrier->add_option("--output", output, "CSV file (default: stdout)");

    auto* spectral = app.add_subcommand("spectral-radius", "Power-iteration estimate of r[A]");
    add_model_options(*spectral, model);
    add_grid_options(*spectral, grid);

    auto* dump = app.add_subcommand("dump", "Write the grid and/or one operator matrix");
    std::string grid_csv, coo, part = "a";
    add_model_options(*dump, model);
    add_grid_options(*dump, grid);
    dump->add_option("--grid-csv", grid_csv, "Grid node CSV");
    dump->add_option("--coo", coo, "Matrix as 'row col value' lines");
    dump->add_option("--part", part, "a0, a1, a2 or a")->check(CLI::IsMember({"a0", "a1", "a2", "a"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (!isa.empty()) kernels::set_active_isa(isa == "avx2" ? kernels::Isa::Avx2 : kernels::Isa::Scalar);
        if (steps.empty() || m2_list.empty()) throw RangeError("empty list");
        if (*price) return cmd_price(model, scheme, grid, price_steps, s, v, out);
        if (*spatial) return cmd_spatial(model, m2_list, output, out, err);
        if (*temporal) return cmd_temporal(model, scheme, grid, steps, false, jobs, output, out, err);
        if (*sweep) return cmd_temporal(model, scheme, grid, steps, true, jobs, output, out, err);
        if (*barrier) return cmd_barrier(model, barrier_level, original, m2_list, barrier_steps, output, out, err);
        if (*spectral) return cmd_spectral(model, grid, out);
        if (*dump) return cmd_dump(model, grid, grid_csv, coo, part, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace heston::cli
