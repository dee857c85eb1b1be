#pragma once

#include "axmcf/assembly.hpp"
#include "axmcf/diagnostics.hpp"
#include "axmcf/linsolve.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace axmcf {

enum class SchemeKind { bdf1, cn, bdf2 };

inline const char* to_string(SchemeKind s)
{
    switch (s) {
    case SchemeKind::bdf1: return "bdf1";
    case SchemeKind::cn: return "cn";
    case SchemeKind::bdf2: return "bdf2";
    }
    return "unknown";
}

enum class StopKind { reached_T, axis_touch, curve_collapse, element_degenerate, solver_failure };

inline const char* to_string(StopKind k)
{
    switch (k) {
    case StopKind::reached_T: return "reached_T";
    case StopKind::axis_touch: return "axis_touch";
    case StopKind::curve_collapse: return "curve_collapse";
    case StopKind::element_degenerate: return "element_degenerate";
    case StopKind::solver_failure: return "solver_failure";
    }
    return "unknown";
}

template <typename Scalar>
struct StopEvent {
    StopKind kind = StopKind::reached_T;
    Scalar t = Scalar(0);
    /// Metric that fired: min r, diameter, min chord, solver residual, or t.
    Scalar value = Scalar(0);
};

template <typename Scalar>
struct StepperState {
    PeriodicCurve<Scalar> current;
    std::optional<PeriodicCurve<Scalar>> previous;
    Scalar t = Scalar(0);
    Scalar dt = Scalar(0);
    Index m = 0;
};

// ---------------------------------------------------------------------------
// Manufactured solution
// ---------------------------------------------------------------------------

/// Exact solution x = (g(t) + cos 2 pi rho, sin 2 pi rho), g = 2 + sin(pi t).
template <typename Scalar>
CurveFunction<Scalar> manufactured_solution()
{
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    CurveFunction<Scalar> f;
    f.value = [](Scalar rho, Scalar t) {
        const Scalar th = Scalar(2) * pi * rho;
        return Point<Scalar>(Scalar(2) + std::sin(pi * t) + std::cos(th), std::sin(th));
    };
    f.derivative = [](Scalar rho, Scalar) {
        const Scalar th = Scalar(2) * pi * rho;
        return Point<Scalar>(-Scalar(2) * pi * std::sin(th), Scalar(2) * pi * std::cos(th));
    };
    return f;
}

/// Forcing that makes manufactured_solution() solve
/// r |x_rho|^2 x_t - (r x_rho)_rho + |x_rho|^2 e1 = f.
template <typename Scalar>
SourceField<Scalar> manufactured_source()
{
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    return [](Scalar rho, Scalar t) {
        const Scalar th = Scalar(2) * pi * rho;
        const Scalar c = std::cos(th);
        const Scalar s = std::sin(th);
        const Scalar g = Scalar(2) + std::sin(pi * t);
        const Scalar dg = pi * std::cos(pi * t);
        const Scalar k = Scalar(4) * pi * pi;
        return Point<Scalar>(k * ((g + c) * dg - s * s + (g + c) * c + Scalar(1)),
                             k * (s * c + (g + c) * s));
    };
}

// ---------------------------------------------------------------------------
// Single steps
// ---------------------------------------------------------------------------

template <typename Scalar>
struct StepResult {
    PeriodicCurve<Scalar> next;
    std::optional<StopKind> failure;
    /// Metric behind the failure: min r or min chord of the offending
    /// curve, or the solver residual.
    Scalar failure_value = Scalar(0);
    SolveStatus solve_status = SolveStatus::ok;
    /// Relative residual of the discrete weak form; NaN unless verified.
    Scalar residual = std::numeric_limits<Scalar>::quiet_NaN();

    bool ok() const { return !failure; }
};

/// Curve at which the scheme freezes its nonlinear coefficients:
/// X^m (BDF1), (3 X^m - X^{m-1}) / 2 (CN), 2 X^m - X^{m-1} (BDF2).
template <typename Scalar>
Points<Scalar> coefficient_curve(SchemeKind scheme, const StepperState<Scalar>& s)
{
    if (scheme == SchemeKind::bdf1) {
        return s.current.positions();
    }
    if (!s.previous || s.previous->size() != s.current.size()) {
        throw std::invalid_argument(std::string(to_string(scheme)) +
                                    " step needs a previous state with the same J");
    }
    const auto& xm = s.current.positions();
    const auto& xp = s.previous->positions();
    if (scheme == SchemeKind::cn) {
        return (Scalar(3) * xm - xp) / Scalar(2);
    }
    return Scalar(2) * xm - xp;
}

/// Time at which the source is tested: t_{m+1/2} for CN, t_{m+1} otherwise.
template <typename Scalar>
Scalar source_time(SchemeKind scheme, const StepperState<Scalar>& s)
{
    return scheme == SchemeKind::cn ? s.t + s.dt / Scalar(2) : s.t + s.dt;
}

/// Matrices and loads of one step, all built on the coefficient curve W.
template <typename Scalar>
struct SchemeTerms {
    CyclicTridiagonal<Scalar> mass;
    CyclicTridiagonal<Scalar> stiffness;
    LoadVector<Scalar> e1_load;
    LoadVector<Scalar> source;
};

template <typename Scalar>
SchemeTerms<Scalar> scheme_terms(const PeriodicCurve<Scalar>& w, const SourceField<Scalar>& f,
                                 Scalar t_source,
                                 SourceQuadrature quad = SourceQuadrature::gauss3)
{
    return {assemble_weighted_mass(w), assemble_weighted_stiffness(w), assemble_e1_load(w),
            assemble_source_load(f, t_source, w.size(), quad)};
}

/// Relative residual of the scheme's weak form tested with every nodal hat
/// function, given a candidate X^{m+1}:
///   BDF1: M (X+ - X)/dt + K X+ + L - F
///   CN:   M (X+ - X)/dt + K (X+ + X)/2 + L - F
///   BDF2: M (3 X+ - 4 X + X-)/(2 dt) + K X+ + L - F
/// The inf-norm of the residual is divided by the inf-norm of the same sum
/// taken in absolute values (|M| |X+| + ...), i.e. the rounding scale.
template <typename Scalar>
Scalar scheme_residual(SchemeKind scheme, const StepperState<Scalar>& s,
                       const SchemeTerms<Scalar>& terms, const PeriodicCurve<Scalar>& next)
{
    const auto& xn = next.positions();
    const auto& xm = s.current.positions();
    const auto& m = terms.mass;
    const auto& k = terms.stiffness;
    Points<Scalar> r;
    Points<Scalar> scale;
    switch (scheme) {
    case SchemeKind::bdf1:
        r = m.apply((xn - xm) / s.dt) + k.apply(xn);
        scale = (m.apply_abs(xn) + m.apply_abs(xm)) / s.dt + k.apply_abs(xn);
        break;
    case SchemeKind::cn:
        r = m.apply((xn - xm) / s.dt) + k.apply((xn + xm) / Scalar(2));
        scale = (m.apply_abs(xn) + m.apply_abs(xm)) / s.dt +
                (k.apply_abs(xn) + k.apply_abs(xm)) / Scalar(2);
        break;
    case SchemeKind::bdf2: {
        const auto& xp = s.previous->positions();
        r = m.apply((Scalar(3) * xn - Scalar(4) * xm + xp) / (Scalar(2) * s.dt)) + k.apply(xn);
        scale = (Scalar(3) * m.apply_abs(xn) + Scalar(4) * m.apply_abs(xm) + m.apply_abs(xp)) /
                    (Scalar(2) * s.dt) +
                k.apply_abs(xn);
        break;
    }
    }
    r += terms.e1_load - terms.source;
    scale += terms.e1_load.cwiseAbs() + terms.source.cwiseAbs();
    const Scalar denom = scale.maxCoeff();
    const Scalar res = r.cwiseAbs().maxCoeff();
    return denom > Scalar(0) ? res / denom : res;
}

/// Linear system A X^{m+1} = B of one step; A is shared by both components.
template <typename Scalar>
struct StepSystem {
    CyclicTridiagonal<Scalar> matrix;
    Points<Scalar> rhs;
};

template <typename Scalar>
StepSystem<Scalar> step_system(SchemeKind scheme, const StepperState<Scalar>& s,
                               const SchemeTerms<Scalar>& terms)
{
    const auto& xm = s.current.positions();
    const Scalar inv_dt = Scalar(1) / s.dt;
    StepSystem<Scalar> sys;
    switch (scheme) {
    case SchemeKind::bdf1:
        sys.matrix = inv_dt * terms.mass + terms.stiffness;
        sys.rhs = inv_dt * terms.mass.apply(xm);
        break;
    case SchemeKind::cn:
        sys.matrix = inv_dt * terms.mass + Scalar(0.5) * terms.stiffness;
        sys.rhs = inv_dt * terms.mass.apply(xm) - Scalar(0.5) * terms.stiffness.apply(xm);
        break;
    case SchemeKind::bdf2:
        sys.matrix = (Scalar(1.5) * inv_dt) * terms.mass + terms.stiffness;
        sys.rhs = (Scalar(0.5) * inv_dt) *
                  terms.mass.apply(Scalar(4) * xm - s.previous->positions());
        break;
    }
    sys.rhs += terms.source - terms.e1_load;
    return sys;
}

struct StepOptions {
    bool verify_residual = false;
    SourceQuadrature source_quadrature = SourceQuadrature::gauss3;
};

/// One step of the chosen scheme. Failures are reported, never thrown:
/// inadmissible coefficient curves map to axis_touch (some r <= 0) or
/// element_degenerate, a rejected solve to solver_failure.
template <typename Scalar>
StepResult<Scalar> step(SchemeKind scheme, const StepperState<Scalar>& s,
                        const SourceField<Scalar>& source = {}, StepOptions opt = {})
{
    if (!(s.dt > Scalar(0))) {
        throw std::invalid_argument("time step must be positive");
    }
    StepResult<Scalar> out;
    const PeriodicCurve<Scalar> w(coefficient_curve(scheme, s));
    if (!w.admissible()) {
        const Scalar r_min = min_radial(w);
        out.failure = r_min > Scalar(0) ? StopKind::element_degenerate : StopKind::axis_touch;
        out.failure_value = r_min > Scalar(0) ? min_edge_length(w) : r_min;
        return out;
    }
    const auto terms = scheme_terms(w, source, source_time(scheme, s), opt.source_quadrature);
    const auto sys = step_system(scheme, s, terms);
    const CyclicFactorization<Scalar> factor(sys.matrix);
    auto rep = solve_cyclic(factor, sys.matrix, sys.rhs);
    out.solve_status = rep.status;
    if (!rep.ok() || !rep.solution.allFinite()) {
        out.failure = StopKind::solver_failure;
        out.failure_value = rep.residual_norm;
        return out;
    }
    out.next = PeriodicCurve<Scalar>(std::move(rep.solution));
    if (!(min_edge_length(out.next) > Scalar(0))) {
        out.failure = StopKind::element_degenerate;
        out.failure_value = Scalar(0);
    }
    if (opt.verify_residual) {
        out.residual = scheme_residual(scheme, s, terms, out.next);
    }
    return out;
}

template <typename Scalar>
StepResult<Scalar> bdf1_step(const StepperState<Scalar>& s, const SourceField<Scalar>& f = {},
                             StepOptions opt = {})
{
    return step(SchemeKind::bdf1, s, f, opt);
}

template <typename Scalar>
StepResult<Scalar> cn_step(const StepperState<Scalar>& s, const SourceField<Scalar>& f = {},
                           StepOptions opt = {})
{
    return step(SchemeKind::cn, s, f, opt);
}

template <typename Scalar>
StepResult<Scalar> bdf2_step(const StepperState<Scalar>& s, const SourceField<Scalar>& f = {},
                             StepOptions opt = {})
{
    return step(SchemeKind::bdf2, s, f, opt);
}

// ---------------------------------------------------------------------------
// Run loop
// ---------------------------------------------------------------------------

/// Singular-event thresholds; edge is relative to h.
struct EventThresholds {
    double axis = 1e-3;
    double diameter = 1e-3;
    double edge = 1e-6;
};

template <typename Scalar>
struct RunConfig {
    SchemeKind scheme = SchemeKind::cn;
    Index J = 512;
    Scalar dt = Scalar(1e-4);
    Index steps = 0;  // M; the final time is steps * dt
    EventThresholds thresholds;
    SourceField<Scalar> source;
    /// When set, every record also carries the errors against it.
    std::optional<CurveFunction<Scalar>> exact;
    NormQuadrature norm_quadrature = NormQuadrature::gauss5;
    StepOptions step_options;

    Scalar final_time() const { return Scalar(steps) * dt; }

    /// M = T / dt, which has to be an integer.
    static Index steps_for(Scalar T, Scalar dt)
    {
        if (!(dt > Scalar(0)) || T < Scalar(0)) {
            throw std::invalid_argument("need dt > 0 and T >= 0");
        }
        const Scalar m = std::round(T / dt);
        if (std::abs(m * dt - T) > Scalar(1e-9) * std::max(T, dt)) {
            throw std::invalid_argument("T must be an integer multiple of dt");
        }
        return static_cast<Index>(m);
    }
};

template <typename Scalar>
using Observer = std::function<void(Index m, Scalar t, const PeriodicCurve<Scalar>&)>;

template <typename Scalar>
struct RunReport {
    std::vector<ErrorRecord<Scalar>> series;
    StopEvent<Scalar> event;
    PeriodicCurve<Scalar> final_curve;
    Index steps_taken = 0;
    /// Worst relative weak-form residual over all steps (verified runs only).
    Scalar max_residual = Scalar(0);

    bool reached_end() const { return event.kind == StopKind::reached_T; }

    Scalar max_l2() const { return max_of(&ErrorRecord<Scalar>::l2); }
    Scalar max_h1() const { return max_of(&ErrorRecord<Scalar>::h1_semi); }
    Scalar max_superconv() const { return max_of(&ErrorRecord<Scalar>::superconv_h1); }

private:
    Scalar max_of(Scalar ErrorRecord<Scalar>::*field) const
    {
        Scalar m = Scalar(0);
        for (const auto& r : series) {
            m = std::max(m, r.*field);
        }
        return m;
    }
};

namespace detail {

// Records diagnostics of X^m and returns the geometric event it triggers.
template <typename Scalar>
std::optional<StopEvent<Scalar>> inspect(const RunConfig<Scalar>& cfg, Index m, Scalar t,
                                         const PeriodicCurve<Scalar>& c, RunReport<Scalar>& rep)
{
    ErrorRecord<Scalar> rec;
    rec.m = m;
    rec.t = t;
    if (!c.positions().allFinite()) {
        rep.series.push_back(rec);
        return StopEvent<Scalar>{StopKind::solver_failure, t,
                                 std::numeric_limits<Scalar>::quiet_NaN()};
    }
    const Scalar min_edge = min_edge_length(c);
    Scalar max_edge = Scalar(0);
    for (Index j = 1; j <= c.size(); ++j) {
        max_edge = std::max(max_edge, c.edge_length(j));
    }
    rec.mesh_ratio = min_edge > Scalar(0) ? max_edge / min_edge
                                          : std::numeric_limits<Scalar>::infinity();
    rec.min_r = min_radial(c);
    rec.diameter = diameter(c);
    if (cfg.exact) {
        rec.l2 = l2_error(c, *cfg.exact, t, cfg.norm_quadrature);
        rec.h1_semi = h1_seminorm_error(c, *cfg.exact, t, cfg.norm_quadrature);
        rec.superconv_h1 = superconvergence_error(c, *cfg.exact, t);
    }
    rep.series.push_back(rec);

    const auto& th = cfg.thresholds;
    if (rec.min_r < Scalar(th.axis)) {
        return StopEvent<Scalar>{StopKind::axis_touch, t, rec.min_r};
    }
    if (rec.diameter < Scalar(th.diameter)) {
        return StopEvent<Scalar>{StopKind::curve_collapse, t, rec.diameter};
    }
    if (min_edge < Scalar(th.edge) * c.h()) {
        return StopEvent<Scalar>{StopKind::element_degenerate, t, min_edge};
    }
    return std::nullopt;
}

}  // namespace detail

/// X^0 is given; CN and BDF2 obtain X^1 from one BDF1 step, then take the
/// remaining M - 1 steps with their own scheme. Stops at T or at the first
/// event.
template <typename Scalar>
RunReport<Scalar> run(const PeriodicCurve<Scalar>& initial, const RunConfig<Scalar>& cfg,
                      const std::vector<Observer<Scalar>>& observers = {})
{
    if (!(cfg.dt > Scalar(0)) || cfg.steps < 0) {
        throw std::invalid_argument("run needs dt > 0 and M >= 0");
    }
    if (initial.size() != cfg.J) {
        throw std::invalid_argument("initial curve does not have J nodes");
    }
    RunReport<Scalar> rep;
    StepperState<Scalar> state{initial, std::nullopt, Scalar(0), cfg.dt, 0};

    auto notify = [&](const StepperState<Scalar>& s) {
        for (const auto& obs : observers) {
            obs(s.m, s.t, s.current);
        }
    };
    notify(state);
    auto finish = [&](StopEvent<Scalar> ev) {
        rep.event = ev;
        rep.final_curve = state.current;
        rep.steps_taken = state.m;
        return rep;
    };
    if (auto ev = detail::inspect(cfg, state.m, state.t, state.current, rep)) {
        return finish(*ev);
    }

    for (Index m = 0; m < cfg.steps; ++m) {
        const SchemeKind scheme = m == 0 ? SchemeKind::bdf1 : cfg.scheme;
        auto res = step(scheme, state, cfg.source, cfg.step_options);
        const Scalar t_next = Scalar(m + 1) * cfg.dt;
        if (!res.ok()) {
            // A degenerate output still counts as a time level; pre-flagged
            // coefficient curves and solver failures stop at t_m.
            if (res.next.size() == cfg.J) {
                state = {std::move(res.next), std::move(state.current), t_next, cfg.dt, m + 1};
                notify(state);
            }
            return finish({*res.failure, state.t, res.failure_value});
        }
        if (cfg.step_options.verify_residual) {
            rep.max_residual = std::max(rep.max_residual, res.residual);
        }
        state = {std::move(res.next), std::move(state.current), t_next, cfg.dt, m + 1};
        notify(state);
        if (auto ev = detail::inspect(cfg, state.m, state.t, state.current, rep)) {
            return finish(*ev);
        }
    }
    return finish({StopKind::reached_T, state.t, state.t});
}

template <typename Scalar>
RunReport<Scalar> run(const CurveFunction<Scalar>& initial, const RunConfig<Scalar>& cfg,
                      const std::vector<Observer<Scalar>>& observers = {})
{
    return run(interpolate(initial, cfg.J), cfg, observers);
}

}  // namespace axmcf
