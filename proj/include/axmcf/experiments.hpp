#pragma once

#include "axmcf/stepping.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace axmcf {

// ---------------------------------------------------------------------------
// Convergence tables for the manufactured solution
// ---------------------------------------------------------------------------

enum class ConvergenceAxis { spatial, temporal };

/// Which time level an error is read from: the last one (t = T) or the
/// worst over all m.
enum class ErrorSampling { final_time, max_over_steps };

const char* to_string(ConvergenceAxis a);
const char* to_string(ErrorSampling s);

struct ConvergenceConfig {
    SchemeKind scheme = SchemeKind::cn;
    ConvergenceAxis axis = ConvergenceAxis::spatial;
    std::vector<Index> levels;
    double final_time = 1.0;
    Index fixed_steps = 10000;  // M on the spatial axis
    Index fixed_nodes = 50000;  // J on the temporal axis
    NormQuadrature norm_quadrature = NormQuadrature::nodal;
    SourceQuadrature source_quadrature = SourceQuadrature::nodal;
    ErrorSampling sampling = ErrorSampling::final_time;
    bool verify_residual = true;
    EventThresholds thresholds;
};

struct ConvergenceRow {
    Index resolution = 0;
    double err_l2 = 0.0;
    std::optional<double> order_l2;
    double err_h1 = 0.0;
    std::optional<double> order_h1;
    double err_superconv = 0.0;  // always the max over m
    std::optional<double> order_superconv;
    double max_residual = 0.0;
};

/// Thrown when a run stops before its final time.
class RunAborted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// log2(prev / cur) / log2(n_cur / n_prev); plain log2(prev / cur) when the
/// resolution doubles.
double observed_order(double err_prev, double err_cur, Index n_prev, Index n_cur);

/// Least-squares slope of -log(err) against log(resolution).
double fitted_order(const std::vector<Index>& resolution, const std::vector<double>& err);

RunConfig<double> convergence_run_config(const ConvergenceConfig& cfg, Index level);

std::vector<ConvergenceRow> run_convergence(const ConvergenceConfig& cfg);

// ---------------------------------------------------------------------------
// Torus singularities and the critical radius
// ---------------------------------------------------------------------------

struct ClassifyConfig {
    SchemeKind scheme = SchemeKind::cn;
    Index J = 512;
    double dt = 1e-4;
    double max_time = 0.5;
    EventThresholds thresholds;
};

struct RadiusClassification {
    double r = 0.0;
    StopKind event = StopKind::reached_T;
    double t = 0.0;

    /// The run ended by shrinking to a circle or by closing the hole.
    bool conclusive() const
    {
        return event == StopKind::curve_collapse || event == StopKind::axis_touch;
    }
};

/// Evolve the torus with tube radius r until it closes the hole
/// (axis_touch) or shrinks onto a circle (curve_collapse).
RadiusClassification classify_radius(double r, const ClassifyConfig& cfg);

class BisectionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BisectionResult {
    double r_lo = 0.0;  // shrinks to a circle
    double r_hi = 0.0;  // closes the hole
    std::vector<RadiusClassification> log;
};

/// Bisect the collapse / hole-closing predicate until r_hi - r_lo <= tol.
BisectionResult bisect_critical_radius(double r_lo, double r_hi, double tol,
                                       const ClassifyConfig& cfg);

// ---------------------------------------------------------------------------
// Named scenarios
// ---------------------------------------------------------------------------

struct Scenario {
    std::string name;  // canonical form, e.g. "torus:0.7"
    CurveFunction<double> initial;
};

/// torus:<r> | ellipse | rose | spiral | spiral:<winds> |
/// spiral:<center>,<inner>,<growth>,<winds>
Scenario parse_scenario(const std::string& text);

struct Snapshot {
    double requested_t = 0.0;
    Index m = 0;
    double t = 0.0;
    PeriodicCurve<double> curve;
};

struct ScenarioResult {
    RunReport<double> report;
    std::vector<Snapshot> snapshots;
};

/// Run a scenario and keep the curves at the grid times nearest to the
/// requested snapshot times. Snapshots past a stopping event are dropped.
ScenarioResult run_scenario(const Scenario& scenario, const RunConfig<double>& cfg,
                            const std::vector<double>& snapshot_times);

}  // namespace axmcf
