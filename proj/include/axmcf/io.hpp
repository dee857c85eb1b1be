#pragma once

#include "axmcf/experiments.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace axmcf::io {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& text);

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);

/// Header m,t,mesh_ratio,min_r,diameter.
void write_diagnostics_csv(std::ostream& os, const std::vector<ErrorRecord<double>>& series);

/// Header j,r,z.
void write_snapshot_csv(std::ostream& os, const PeriodicCurve<double>& curve);
PeriodicCurve<double> read_snapshot_csv(std::istream& is);

/// Header r,event,t_event, one row per classification, then a closing
/// bracket,<r_lo>,<r_hi> row.
void write_bisection_csv(std::ostream& os, const BisectionResult& result);

/// Surface of revolution about the z-axis: node j at azimuth
/// phi_k = 2 pi k / n_phi becomes vertex 1 + j n_phi + k at
/// (r cos phi, z, r sin phi); each quad is split into two triangles.
void write_obj(std::ostream& os, const PeriodicCurve<double>& curve, int n_phi = 64);

nlohmann::json run_metadata(const RunConfig<double>& cfg);
nlohmann::json event_json(const StopEvent<double>& ev);

}  // namespace axmcf::io
