// Command-line front end: convergence tables, scenario evolutions and the
// critical-radius bisection.
#include "axmcf/io.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace axmcf;

namespace {

constexpr int exit_usage = 2;
constexpr int exit_failure = 1;

const std::map<std::string, SchemeKind> scheme_names{
    {"cn", SchemeKind::cn}, {"bdf2", SchemeKind::bdf2}, {"bdf1", SchemeKind::bdf1}};

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::ofstream open_file(const fs::path& p)
{
    std::ofstream os(p);
    if (!os) {
        throw std::runtime_error("cannot open " + p.string() + " for writing");
    }
    return os;
}

void add_thresholds(CLI::App* cmd, EventThresholds& th)
{
    cmd->add_option("--axis-eps", th.axis, "axis_touch when min r falls below this")
        ->capture_default_str();
    cmd->add_option("--diameter-eps", th.diameter, "curve_collapse below this diameter")
        ->capture_default_str();
    cmd->add_option("--edge-eps", th.edge, "element_degenerate below this chord / h")
        ->capture_default_str();
}

struct ConvergeArgs {
    std::string scheme;
    std::string axis;
    std::vector<Index> levels;
    std::string out;
    std::string norm = "nodal";
    std::string source = "nodal";
    std::string sampling = "final";
    ConvergenceConfig cfg;
};

int cmd_converge(ConvergeArgs& a)
{
    auto& cfg = a.cfg;
    if (a.levels.empty()) {
        throw UsageError("--levels needs at least one value");
    }
    cfg.scheme = scheme_names.at(a.scheme);
    cfg.axis = a.axis == "spatial" ? ConvergenceAxis::spatial : ConvergenceAxis::temporal;
    cfg.levels = a.levels;
    cfg.norm_quadrature = a.norm == "gauss5" ? NormQuadrature::gauss5 : NormQuadrature::nodal;
    cfg.source_quadrature =
        a.source == "gauss3" ? SourceQuadrature::gauss3 : SourceQuadrature::nodal;
    cfg.sampling = a.sampling == "max" ? ErrorSampling::max_over_steps : ErrorSampling::final_time;
    try {
        const auto rows = run_convergence(cfg);
        if (a.out.empty()) {
            io::write_convergence_csv(std::cout, rows);
        } else {
            auto os = open_file(a.out);
            io::write_convergence_csv(os, rows);
            nlohmann::json meta = io::run_metadata(convergence_run_config(cfg, cfg.levels.front()));
            meta.erase(cfg.axis == ConvergenceAxis::spatial ? "J" : "steps");
            meta.erase("dt");
            meta["axis"] = to_string(cfg.axis);
            meta["levels"] = cfg.levels;
            meta["T"] = cfg.final_time;
            meta["sampling"] = to_string(cfg.sampling);
            meta["manufactured_solution"] = "x = (2 + sin(pi t) + cos(2 pi rho), sin(2 pi rho))";
            auto ms = open_file(a.out + ".json");
            ms << meta.dump(2) << '\n';
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return 0;
}

struct EvolveArgs {
    std::string scenario;
    std::string scheme = "cn";
    Index J = 512;
    double dt = 1e-4;
    double T = 1.0;
    std::vector<double> snapshots;
    std::string out = ".";
    bool export_obj = false;
    int n_phi = 64;
    bool verify = false;
    EventThresholds thresholds;
};

std::string snapshot_stem(std::size_t k)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%03zu", k);
    return buf;
}

int cmd_evolve(EvolveArgs& a)
{
    Scenario sc;
    RunConfig<double> cfg;
    try {
        sc = parse_scenario(a.scenario);
        cfg.scheme = scheme_names.at(a.scheme);
        cfg.J = a.J;
        cfg.dt = a.dt;
        cfg.steps = RunConfig<double>::steps_for(a.T, a.dt);
        cfg.thresholds = a.thresholds;
        cfg.step_options.verify_residual = a.verify;
        if (a.J < 3) {
            throw std::invalid_argument("--J must be at least 3");
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const fs::path dir(a.out);
    fs::create_directories(dir);

    const auto res = run_scenario(sc, cfg, a.snapshots);
    {
        auto os = open_file(dir / "diagnostics.csv");
        io::write_diagnostics_csv(os, res.report.series);
    }
    nlohmann::json snaps = nlohmann::json::array();
    for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
        const auto& s = res.snapshots[k];
        const std::string stem = snapshot_stem(k);
        auto os = open_file(dir / (stem + ".csv"));
        io::write_snapshot_csv(os, s.curve);
        nlohmann::json entry{{"file", stem + ".csv"}, {"requested_t", s.requested_t},
                             {"m", s.m}, {"t", s.t}};
        if (a.export_obj) {
            auto obj = open_file(dir / (stem + ".obj"));
            io::write_obj(obj, s.curve, a.n_phi);
            entry["obj"] = stem + ".obj";
        }
        snaps.push_back(entry);
    }
    nlohmann::json meta = io::run_metadata(cfg);
    meta["scenario"] = sc.name;
    meta["event"] = io::event_json(res.report.event);
    meta["snapshots"] = snaps;
    meta["requested_snapshots"] = a.snapshots;
    meta["obj_azimuthal_samples"] = a.n_phi;
    if (a.verify) {
        meta["max_weak_form_residual"] = res.report.max_residual;
    }
    {
        auto os = open_file(dir / "metadata.json");
        os << meta.dump(2) << '\n';
    }
    std::cout << "event " << to_string(res.report.event.kind) << " t="
              << io::format_double(res.report.event.t) << " value="
              << io::format_double(res.report.event.value) << '\n';
    return res.report.event.kind == StopKind::solver_failure ? exit_failure : 0;
}

struct BisectArgs {
    double lo = 0.5;
    double hi = 0.7;
    double tol = 0.01;
    std::string scheme = "cn";
    std::string out;
    ClassifyConfig cfg;
};

int cmd_bisect(BisectArgs& a)
{
    if (!(a.lo < a.hi)) {
        throw UsageError("--lo must be smaller than --hi");
    }
    if (!(a.lo > 0.0 && a.hi < 1.0) || !(a.tol > 0.0)) {
        throw UsageError("need 0 < lo < hi < 1 and tol > 0");
    }
    a.cfg.scheme = scheme_names.at(a.scheme);
    const auto res = bisect_critical_radius(a.lo, a.hi, a.tol, a.cfg);
    if (a.out.empty()) {
        io::write_bisection_csv(std::cout, res);
    } else {
        auto os = open_file(a.out);
        io::write_bisection_csv(os, res);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Axisymmetric mean curvature flow of genus-1 surfaces"};
    app.require_subcommand(1);
    const auto schemes = CLI::IsMember({"cn", "bdf2"});
    const auto all_schemes = CLI::IsMember({"cn", "bdf2", "bdf1"});

    ConvergeArgs ca;
    auto* conv = app.add_subcommand("converge", "manufactured-solution convergence table");
    conv->add_option("--scheme", ca.scheme)->required()->check(schemes);
    conv->add_option("--axis", ca.axis)->required()->check(CLI::IsMember({"spatial", "temporal"}));
    conv->add_option("--levels", ca.levels, "J (spatial) or M (temporal) values")
        ->required()
        ->delimiter(',');
    conv->add_option("--out", ca.out, "CSV path; stdout when omitted");
    conv->add_option("--T", ca.cfg.final_time)->capture_default_str();
    conv->add_option("--fixed-steps", ca.cfg.fixed_steps, "M on the spatial axis")
        ->capture_default_str();
    conv->add_option("--fixed-nodes", ca.cfg.fixed_nodes, "J on the temporal axis")
        ->capture_default_str();
    conv->add_option("--norm-quadrature", ca.norm)
        ->check(CLI::IsMember({"nodal", "gauss5"}))
        ->capture_default_str();
    conv->add_option("--source-quadrature", ca.source)
        ->check(CLI::IsMember({"nodal", "gauss3"}))
        ->capture_default_str();
    conv->add_option("--sampling", ca.sampling, "error at t=T (final) or max over m (max)")
        ->check(CLI::IsMember({"final", "max"}))
        ->capture_default_str();

    EvolveArgs ea;
    auto* evo = app.add_subcommand("evolve", "evolve a named initial curve");
    evo->add_option("--scenario", ea.scenario,
                    "torus:<r> | ellipse | rose | spiral[:<winds> | :<c>,<a>,<b>,<winds>]")
        ->required();
    evo->add_option("--scheme", ea.scheme)->check(all_schemes)->capture_default_str();
    evo->add_option("--J", ea.J)->capture_default_str();
    evo->add_option("--dt", ea.dt)->capture_default_str();
    evo->add_option("--T", ea.T)->capture_default_str();
    evo->add_option("--snapshots", ea.snapshots)->delimiter(',');
    evo->add_option("--out", ea.out, "output directory")->capture_default_str();
    evo->add_flag("--export-obj", ea.export_obj, "write each snapshot as a Wavefront OBJ");
    evo->add_option("--n-phi", ea.n_phi, "azimuthal samples for OBJ export")
        ->capture_default_str();
    evo->add_flag("--verify-residual", ea.verify, "check every step's weak-form residual");
    add_thresholds(evo, ea.thresholds);

    BisectArgs ba;
    auto* bis = app.add_subcommand("bisect", "bracket the critical torus radius");
    bis->add_option("--lo", ba.lo)->capture_default_str();
    bis->add_option("--hi", ba.hi)->capture_default_str();
    bis->add_option("--tol", ba.tol)->capture_default_str();
    bis->add_option("--scheme", ba.scheme)->check(schemes)->capture_default_str();
    bis->add_option("--J", ba.cfg.J)->capture_default_str();
    bis->add_option("--dt", ba.cfg.dt)->capture_default_str();
    bis->add_option("--max-time", ba.cfg.max_time)->capture_default_str();
    bis->add_option("--out", ba.out, "CSV path; stdout when omitted");
    add_thresholds(bis, ba.cfg.thresholds);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : exit_usage;
    }

    try {
        if (*conv) return cmd_converge(ca);
        if (*evo) return cmd_evolve(ea);
        return cmd_bisect(ba);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failure;
    }
}
