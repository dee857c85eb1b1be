#include "axmcf/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace axmcf::io {

std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) {
        throw std::runtime_error("format_double failed");
    }
    return {buf, ptr};
}

double parse_double(const std::string& text)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    return v;
}

namespace {

std::string optional_cell(const std::optional<double>& v)
{
    return v ? format_double(*v) : std::string();
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream s(line);
    while (std::getline(s, item, ',')) {
        out.push_back(item);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

}  // namespace

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows)
{
    os << "resolution,err_l2,order_l2,err_h1,order_h1\n";
    for (const auto& r : rows) {
        os << r.resolution << ',' << format_double(r.err_l2) << ',' << optional_cell(r.order_l2)
           << ',' << format_double(r.err_h1) << ',' << optional_cell(r.order_h1) << '\n';
    }
}

void write_diagnostics_csv(std::ostream& os, const std::vector<ErrorRecord<double>>& series)
{
    os << "m,t,mesh_ratio,min_r,diameter\n";
    for (const auto& r : series) {
        os << r.m << ',' << format_double(r.t) << ',' << format_double(r.mesh_ratio) << ','
           << format_double(r.min_r) << ',' << format_double(r.diameter) << '\n';
    }
}

void write_snapshot_csv(std::ostream& os, const PeriodicCurve<double>& curve)
{
    os << "j,r,z\n";
    for (Index j = 0; j < curve.size(); ++j) {
        os << j << ',' << format_double(curve.r(j)) << ',' << format_double(curve.z(j)) << '\n';
    }
}

PeriodicCurve<double> read_snapshot_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != "j,r,z") {
        throw std::invalid_argument("snapshot CSV must start with the header j,r,z");
    }
    std::vector<Point<double>> nodes;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != 3 || std::stoll(cells[0]) != Index(nodes.size())) {
            throw std::invalid_argument("malformed snapshot row: '" + line + "'");
        }
        nodes.emplace_back(parse_double(cells[1]), parse_double(cells[2]));
    }
    Points<double> p(Index(nodes.size()), 2);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        p.row(Index(j)) = nodes[j];
    }
    return PeriodicCurve<double>(std::move(p));
}

void write_bisection_csv(std::ostream& os, const BisectionResult& result)
{
    os << "r,event,t_event\n";
    for (const auto& c : result.log) {
        os << format_double(c.r) << ',' << to_string(c.event) << ',' << format_double(c.t)
           << '\n';
    }
    os << "bracket," << format_double(result.r_lo) << ',' << format_double(result.r_hi) << '\n';
}

void write_obj(std::ostream& os, const PeriodicCurve<double>& curve, int n_phi)
{
    if (n_phi < 3) {
        throw std::invalid_argument("OBJ export needs at least 3 azimuthal samples");
    }
    const Index n = curve.size();
    os << "# surface of revolution, " << n << " nodes x " << n_phi << " azimuthal samples\n";
    for (Index j = 0; j < n; ++j) {
        for (int k = 0; k < n_phi; ++k) {
            const double phi = 2.0 * std::numbers::pi * double(k) / double(n_phi);
            os << "v " << format_double(curve.r(j) * std::cos(phi)) << ' '
               << format_double(curve.z(j)) << ' ' << format_double(curve.r(j) * std::sin(phi))
               << '\n';
        }
    }
    auto vid = [&](Index j, int k) { return (j % n) * n_phi + (k % n_phi) + 1; };
    for (Index j = 0; j < n; ++j) {
        for (int k = 0; k < n_phi; ++k) {
            const Index a = vid(j, k), b = vid(j + 1, k), c = vid(j + 1, k + 1),
                        d = vid(j, k + 1);
            os << "f " << a << ' ' << b << ' ' << c << '\n';
            os << "f " << a << ' ' << c << ' ' << d << '\n';
        }
    }
}

nlohmann::json run_metadata(const RunConfig<double>& cfg)
{
    return {
        {"scheme", to_string(cfg.scheme)},
        {"bootstrap", "bdf1"},
        {"J", cfg.J},
        {"dt", cfg.dt},
        {"steps", cfg.steps},
        {"T", cfg.final_time()},
        {"thresholds",
         {{"axis", cfg.thresholds.axis},
          {"diameter", cfg.thresholds.diameter},
          {"edge_relative_to_h", cfg.thresholds.edge}}},
        {"quadrature",
         {{"mass", "exact"},
          {"stiffness", "exact"},
          {"e1_load", "exact"},
          {"source", to_string(cfg.step_options.source_quadrature)},
          {"error_norms", to_string(cfg.norm_quadrature)}}},
        {"linear_solver", "cyclic Thomas + Sherman-Morrison, dense LU fallback"},
        {"determinism", "no randomness; fixed summation order, bit-reproducible"},
    };
}

nlohmann::json event_json(const StopEvent<double>& ev)
{
    return {{"kind", to_string(ev.kind)}, {"t", ev.t}, {"value", ev.value}};
}

}  // namespace axmcf::io
