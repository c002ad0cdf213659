// SPDX-License-Identifier: Apache-2.0
//
// File formats for the command-line front end: geometry and sweep JSON
// documents, time-grid specifications and CSV number formatting.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcfar/geometry.hpp"

namespace mcfar::cli {

using nlohmann::json;

/// Reads and parses a JSON file. Throws Error{parse}.
json load_json_file(const std::filesystem::path& path);

/// {"receivers": [[x,y,z],...], "radius_a": a, "diffusion_d": D}.
/// Missing or mistyped fields throw Error{parse}; invariant violations throw
/// Error{invariant}.
SystemGeometry geometry_from_json(const json& doc);
json geometry_to_json(const SystemGeometry& geom);

enum class GridScale { linear, log };

struct GridSpec {
    double start = 0.0;
    double stop = 1.0;
    int count = 2;
    GridScale scale = GridScale::linear;

    std::vector<double> values() const;
};

GridSpec grid_from_json(const json& doc);

/// Either a comma list ("0.1,0.5,1") or a range "start:stop:count[:linear|log]".
std::vector<double> parse_time_list(const std::string& text);

/// JSON array of numbers or a {start, stop, count, scale} object.
std::vector<double> time_list_from_json(const json& doc);

/// Decimal rendering with 12 significant digits.
std::string fmt(double value);

/// Typed lookups for optional settings stored alongside the geometry.
std::optional<double> optional_number(const json& doc, const std::string& key);
std::optional<std::string> optional_string(const json& doc, const std::string& key);

}  // namespace mcfar::cli
