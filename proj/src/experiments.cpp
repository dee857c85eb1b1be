#include "axmcf/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace axmcf {

const char* to_string(ConvergenceAxis a)
{
    return a == ConvergenceAxis::spatial ? "spatial" : "temporal";
}

const char* to_string(ErrorSampling s)
{
    return s == ErrorSampling::final_time ? "final_time" : "max_over_steps";
}

double observed_order(double err_prev, double err_cur, Index n_prev, Index n_cur)
{
    const double ratio = std::log2(double(n_cur) / double(n_prev));
    return std::log2(err_prev / err_cur) / ratio;
}

double fitted_order(const std::vector<Index>& resolution, const std::vector<double>& err)
{
    if (resolution.size() != err.size() || resolution.size() < 2) {
        throw std::invalid_argument("fitted_order needs at least two matching samples");
    }
    const double n = double(resolution.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double x = std::log(double(resolution[i]));
        const double y = -std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RunConfig<double> convergence_run_config(const ConvergenceConfig& cfg, Index level)
{
    RunConfig<double> rc;
    rc.scheme = cfg.scheme;
    const bool spatial = cfg.axis == ConvergenceAxis::spatial;
    rc.J = spatial ? level : cfg.fixed_nodes;
    rc.steps = spatial ? cfg.fixed_steps : level;
    rc.dt = cfg.final_time / double(rc.steps);
    rc.source = manufactured_source<double>();
    rc.exact = manufactured_solution<double>();
    rc.norm_quadrature = cfg.norm_quadrature;
    rc.thresholds = cfg.thresholds;
    rc.step_options.verify_residual = cfg.verify_residual;
    rc.step_options.source_quadrature = cfg.source_quadrature;
    return rc;
}

std::vector<ConvergenceRow> run_convergence(const ConvergenceConfig& cfg)
{
    if (cfg.levels.empty()) {
        throw std::invalid_argument("run_convergence needs at least one level");
    }
    if (cfg.scheme == SchemeKind::bdf1) {
        throw std::invalid_argument("convergence tables are built for cn and bdf2");
    }
    for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
        if (cfg.levels[i] < (cfg.axis == ConvergenceAxis::spatial ? 3 : 1) ||
            (i > 0 && cfg.levels[i] <= cfg.levels[i - 1])) {
            throw std::invalid_argument("levels must be increasing and valid");
        }
    }

    std::vector<ConvergenceRow> rows;
    for (const Index level : cfg.levels) {
        const auto rc = convergence_run_config(cfg, level);
        const auto rep = run(*rc.exact, rc);
        if (!rep.reached_end()) {
            std::ostringstream msg;
            msg << "manufactured run at level " << level << " stopped early ("
                << to_string(rep.event.kind) << " at t=" << rep.event.t << ")";
            throw RunAborted(msg.str());
        }
        ConvergenceRow row;
        row.resolution = level;
        if (cfg.sampling == ErrorSampling::final_time) {
            const auto& last = rep.series.back();
            row.err_l2 = last.l2;
            row.err_h1 = last.h1_semi;
        } else {
            row.err_l2 = rep.max_l2();
            row.err_h1 = rep.max_h1();
        }
        row.err_superconv = rep.max_superconv();
        row.max_residual = rep.max_residual;
        if (!rows.empty()) {
            const auto& prev = rows.back();
            row.order_l2 = observed_order(prev.err_l2, row.err_l2, prev.resolution, level);
            row.order_h1 = observed_order(prev.err_h1, row.err_h1, prev.resolution, level);
            row.order_superconv =
                observed_order(prev.err_superconv, row.err_superconv, prev.resolution, level);
        }
        rows.push_back(row);
    }
    return rows;
}

RadiusClassification classify_radius(double r, const ClassifyConfig& cfg)
{
    RunConfig<double> rc;
    rc.scheme = cfg.scheme;
    rc.J = cfg.J;
    rc.dt = cfg.dt;
    rc.steps = static_cast<Index>(std::ceil(cfg.max_time / cfg.dt - 1e-9));
    rc.thresholds = cfg.thresholds;
    const auto rep = run(init_torus_circle(r), rc);
    return {r, rep.event.kind, rep.event.t};
}

BisectionResult bisect_critical_radius(double r_lo, double r_hi, double tol,
                                       const ClassifyConfig& cfg)
{
    if (!(r_lo < r_hi)) {
        throw std::invalid_argument("bisection needs r_lo < r_hi");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("bisection tolerance must be positive");
    }
    BisectionResult res;
    auto classify = [&](double r) {
        auto c = classify_radius(r, cfg);
        res.log.push_back(c);
        if (!c.conclusive()) {
            std::ostringstream msg;
            msg << "classification of r=" << r << " is inconclusive (" << to_string(c.event)
                << " at t=" << c.t << ")";
            throw BisectionError(msg.str());
        }
        return c.event;
    };
    if (classify(r_lo) != StopKind::curve_collapse) {
        std::ostringstream msg;
        msg << "lower endpoint r=" << r_lo << " does not shrink to a circle";
        throw BisectionError(msg.str());
    }
    if (classify(r_hi) != StopKind::axis_touch) {
        std::ostringstream msg;
        msg << "upper endpoint r=" << r_hi << " does not close the hole";
        throw BisectionError(msg.str());
    }
    // Small slack so a bracket of exactly tol is not split by rounding.
    while (r_hi - r_lo > tol * (1.0 + 1e-12)) {
        const double mid = 0.5 * (r_lo + r_hi);
        (classify(mid) == StopKind::axis_touch ? r_hi : r_lo) = mid;
    }
    res.r_lo = r_lo;
    res.r_hi = r_hi;
    return res;
}

namespace {

std::vector<double> parse_numbers(const std::string& text)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string item = text.substr(pos, comma - pos);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
            throw std::invalid_argument("cannot parse number '" + item + "'");
        }
        out.push_back(v);
        pos = comma + 1;
    }
    return out;
}

std::string join(const std::vector<double>& v)
{
    std::ostringstream s;
    s.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) {
        s << (i ? "," : "") << v[i];
    }
    return s.str();
}

}  // namespace

Scenario parse_scenario(const std::string& text)
{
    const std::size_t colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);

    if (kind == "torus") {
        const auto v = parse_numbers(args);
        if (v.size() != 1) {
            throw std::invalid_argument("torus scenario takes one radius, e.g. torus:0.7");
        }
        return {"torus:" + join(v), init_torus_circle(v[0])};
    }
    if (kind == "ellipse" && args.empty()) {
        return {"ellipse", init_ellipse<double>()};
    }
    if (kind == "rose" && args.empty()) {
        return {"rose", init_rose<double>()};
    }
    if (kind == "spiral") {
        SpiralParams<double> p;
        if (!args.empty()) {
            const auto v = parse_numbers(args);
            if (v.size() == 1) {
                p.winds = static_cast<int>(v[0]);
            } else if (v.size() == 4) {
                p = {v[0], v[1], v[2], static_cast<int>(v[3])};
            } else {
                throw std::invalid_argument(
                    "spiral takes <winds> or <center>,<inner>,<growth>,<winds>");
            }
        }
        const std::vector<double> canon{p.center, p.inner, p.growth, double(p.winds)};
        return {"spiral:" + join(canon), init_spiral(p)};
    }
    throw std::invalid_argument("unknown scenario '" + text + "'");
}

ScenarioResult run_scenario(const Scenario& scenario, const RunConfig<double>& cfg,
                            const std::vector<double>& snapshot_times)
{
    // Grid index -> requested times that map onto it.
    std::multimap<Index, double> wanted;
    for (const double t : snapshot_times) {
        if (t < 0.0) {
            throw std::invalid_argument("snapshot times must be non-negative");
        }
        const Index m = static_cast<Index>(std::llround(t / cfg.dt));
        if (m <= cfg.steps) {
            wanted.emplace(m, t);
        }
    }
    ScenarioResult out;
    Observer<double> grab = [&](Index m, double t, const PeriodicCurve<double>& c) {
        const auto [lo, hi] = wanted.equal_range(m);
        for (auto it = lo; it != hi; ++it) {
            out.snapshots.push_back({it->second, m, t, c});
        }
    };
    out.report = run(scenario.initial, cfg, {grab});
    std::stable_sort(out.snapshots.begin(), out.snapshots.end(),
                     [](const Snapshot& a, const Snapshot& b) { return a.m < b.m; });
    return out;
}

}  // namespace axmcf
