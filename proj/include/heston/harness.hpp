#pragma once

#include "heston/model.hpp"
#include "heston/operator_split.hpp"
#include "heston/reference.hpp"
#include "heston/timestep.hpp"

#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace heston {

/// Open box K/2 < s < 3K/2, 0 < v < 1 where errors are measured.
struct MeasurementRegion {
    double s_lo = 0.0, s_hi = 0.0;
    double v_lo = 0.0, v_hi = 1.0;

    static MeasurementRegion for_strike(double strike) { return {0.5 * strike, 1.5 * strike, 0.0, 1.0}; }
    bool contains(double s, double v) const { return s > s_lo && s < s_hi && v > v_lo && v < v_hi; }
};

/// Unknown indices of the grid nodes inside the region, s-fastest.
std::vector<std::size_t> region_unknowns(const TensorGrid& grid, const MeasurementRegion& region);

/// max |a_k - b_k| over the given unknowns.
double max_abs_difference(std::span<const double> a, std::span<const double> b, std::span<const std::size_t> where);

/// One row of the experiment CSV.
struct ErrorReport {
    int case_id = 0;
    std::string scheme;
    double theta = 0.0;
    bool damping = false;
    std::size_t m1 = 0, m2 = 0;
    int steps = 0;
    double error = 0.0;
    std::optional<double> order;
    std::optional<double> relative_error;
};

/// Least-squares slope of log(error) against log(h). Needs >= 3 samples.
/// Throws DegenerateFit on a zero or negative error, RangeError on too few samples.
double fit_order(std::span<const std::pair<double, double>> samples);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ErrorReport& r);
void write_csv(std::ostream& out, std::span<const ErrorReport> rows);

/// Scheme label used in reports: hv1 / hv2 for the two standard HV parameters.
std::string scheme_label(const SchemeConfig& cfg);

struct SpatialOptions {
    int initial_steps = 50;
    int max_steps = 12800;
    double step_tolerance = 0.01;  ///< accept N when halving dt moves the error by less than this fraction
};

/// Global spatial error at T: the semi-discrete solution (HV with theta = 1/2 + sqrt(3)/6,
/// damping, N doubled until converged) against the semi-analytic price over the region.
/// relative_error covers nodes whose exact value is at least 1.
ErrorReport spatial_error(const BenchmarkCase& model, int case_id, std::size_t m1, std::size_t m2,
                          const SpatialOptions& opts = {});
ErrorReport spatial_error(int case_id, std::size_t m1, std::size_t m2, const SpatialOptions& opts = {});

/// Fixed model and grid with a fine-step reference solution for global temporal errors.
/// Reference: HV (theta = 1/2 + sqrt(3)/6) with damping at N_ref = max(10 n_max, 5000)
/// and at 2 N_ref; the 2 N_ref solution is used and the gap between the two is kept as
/// the reference noise level.
class TemporalStudy {
public:
    TemporalStudy(BenchmarkCase model, int case_id, std::size_t m1, std::size_t m2, int n_max);

    const OperatorSplit& split() const { return split_; }
    const BenchmarkCase& model() const { return model_; }
    int reference_steps() const { return n_ref_; }
    /// max-norm gap between the N_ref and 2 N_ref reference solutions over the region.
    double reference_gap() const { return reference_gap_; }
    /// The Richardson check: reference gap below 1% of the smallest measured error.
    bool reference_valid_for(double smallest_error) const { return reference_gap_ < 0.01 * smallest_error; }
    /// Doubles N_ref until the Richardson check holds for `smallest_error` or 2 N_ref would
    /// exceed `max_steps`. Returns true if the reference changed (earlier errors are stale).
    bool refine_reference(double smallest_error, int max_steps);

    /// cfg.steps and cfg.horizon are taken from `steps` and the model maturity.
    ErrorReport error(SchemeConfig cfg, int steps);
    std::vector<ErrorReport> errors(const SchemeConfig& cfg, std::span<const int> steps, int jobs = 1);

    double spectral_radius();
    std::span<const double> reference() const { return reference_; }
    std::span<const std::size_t> region() const { return region_; }

private:
    std::vector<double> start_after_damping(double dt);

    BenchmarkCase model_;
    int case_id_;
    OperatorSplit split_;
    std::vector<std::size_t> region_;
    int n_ref_;
    std::vector<double> reference_;  // U at 2 N_ref
    double reference_gap_ = 0.0;

    std::mutex mutex_;
    std::map<double, std::vector<double>> damped_;
    std::optional<double> radius_;
};

ErrorReport temporal_error(int case_id, const SchemeConfig& cfg, int steps, std::size_t m1, std::size_t m2);

/// Error curves for several configurations over `steps`, with the reference refined until
/// the Richardson check holds for the smallest finite error (unstable runs are ignored).
/// Check study.reference_valid_for() afterwards: refinement stops at max_reference_steps.
std::vector<std::vector<ErrorReport>> validated_errors(TemporalStudy& study, std::span<const SchemeConfig> configs,
                                                       std::span<const int> steps, int max_reference_steps,
                                                       int jobs = 1);
/// Smallest finite positive error in the reports (infinity when there is none).
double smallest_error(std::span<const ErrorReport> errors);

struct StabilityVerdict {
    bool monotone = true;  ///< every error at most 5% above its predecessor
    double max_error = 0.0;
    std::size_t peak_index = 0;  ///< index of the largest error in `errors`
    std::vector<ErrorReport> errors;
};

StabilityVerdict stability_verdict(std::vector<ErrorReport> errors, double uptick_tolerance = 0.05);
StabilityVerdict stability_sweep(TemporalStudy& study, const SchemeConfig& cfg, std::span<const int> steps,
                                 int jobs = 1);
StabilityVerdict stability_sweep(int case_id, const SchemeConfig& cfg, std::span<const int> steps, std::size_t m1,
                                 std::size_t m2);

/// Order fitted to (1/N, error) pairs.
double fitted_temporal_order(std::span<const ErrorReport> errors);
/// Order fitted to (1/m2, error) pairs.
double fitted_spatial_order(std::span<const ErrorReport> errors);

struct BarrierOptions {
    int steps = 200;  ///< time steps (HV2 with damping) used on every grid
};

/// Grid self-convergence of the down-and-out call: each m2 (m1 = 2 m2) is compared with a
/// reference grid of 2 max(m2) by tensor cubic interpolation of the reference. The last
/// report carries the fitted order.
std::vector<ErrorReport> barrier_selfconvergence(const BenchmarkCase& model, int case_id,
                                                 std::span<const std::size_t> m2_list, const BarrierOptions& opts = {});
std::vector<ErrorReport> barrier_selfconvergence(int case_id, double barrier, std::span<const std::size_t> m2_list,
                                                 const BarrierOptions& opts = {});

/// Value of a grid function (unknowns plus Dirichlet edges at time t) at an arbitrary (s, v)
/// by 4-point Lagrange interpolation in each direction.
double interpolate_solution(const TensorGrid& grid, const OptionSpec& option, const HestonParams& params, double t,
                            std::span<const double> u, double s, double v);

}  // namespace heston
