// SPDX-License-Identifier: Apache-2.0
//
// Declarative parameter sweeps. A sweep document looks like
//
//   {
//     "axis": "diffusion",
//     "range": {"start": 10, "stop": 500, "count": 50, "scale": "linear"},
//     "geometry": {"layout": "uca", "w": 10, "d": 20, "a": 5, "D": 100},
//     "models": ["auto"],
//     "t": 1.0,
//     "series": {"parameter": "radius_a", "values": [2, 4, 6]},
//     "sim": {"dt": 1e-4, "trials": 20000, "seed": 7}
//   }
//
// "geometry" is an inline geometry object, a path to a geometry file
// (relative to the sweep file), or a layout: "uca" {w, d, a, D}, "angle"
// {r, a, D} or "grid-yz" {x, fixed, a, D}.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcfar/channel.hpp"
#include "mcfar/cli/commands.hpp"
#include "mcfar/cli/io.hpp"
#include "mcfar/simulator.hpp"

namespace mcfar::cli {

enum class SweepAxis { time, diffusion, radius, angle, grid_yz, malicious_count };

std::string to_string(SweepAxis axis);
SweepAxis parse_axis(const std::string& name);

struct SweepSpec {
    SweepAxis axis = SweepAxis::time;
    GridSpec range;
    json geometry;  ///< resolved geometry object or layout object
    std::vector<std::string> models{"auto"};
    double t = 1.0;  ///< evaluation time for non-time axes
    std::optional<std::string> series_parameter;  ///< radius_a or diffusion_d
    std::vector<double> series_values;
    std::optional<SimConfig> sim;
    ChannelOptions channel;
    unsigned workers = 0;
    double tol = 0.02;
};

/// Validates axis/layout compatibility. Throws Error{parse} or Error{invariant}.
SweepSpec sweep_from_json(const json& doc, const std::filesystem::path& base_dir, const NumericOptions& flags);

struct SweepRow {
    double axis_value = 0.0;
    std::string series;
    int receiver = 0;
    std::string model;
    std::string metric;
    double value = 0.0;
};

/// Long-format result rows in deterministic order. Cells whose geometry is
/// invalid are skipped and reported on `log`. Not for the grid-yz axis.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::ostream& log);

/// CSV columns axis_value,series,receiver,model,metric,value.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Grid-yz axis: the absolute-error map (requires a "sim" block).
ErrorMap run_error_map(const SweepSpec& spec);

/// CSV columns y,z,status,receiver,analytical,simulated,ci_halfwidth,abs_error.
void write_error_map_csv(std::ostream& out, const ErrorMap& map);

}  // namespace mcfar::cli
