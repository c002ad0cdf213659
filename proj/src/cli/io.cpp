// SPDX-License-Identifier: Apache-2.0
#include "mcfar/cli/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mcfar/error.hpp"

namespace mcfar::cli {

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw parse_error("malformed JSON in '" + path.string() + "': " + e.what());
    }
}

namespace {

double number_field(const json& doc, const std::string& key) {
    if (!doc.contains(key)) throw parse_error("missing field '" + key + "'");
    if (!doc[key].is_number()) throw parse_error("field '" + key + "' must be a number");
    return doc[key].get<double>();
}

Vec3 vec3_from_json(const json& v) {
    if (!v.is_array() || v.size() != 3) throw parse_error("receiver centre must be an array of three numbers");
    for (const auto& c : v)
        if (!c.is_number()) throw parse_error("receiver centre must be an array of three numbers");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

}  // namespace

SystemGeometry geometry_from_json(const json& doc) {
    if (!doc.is_object()) throw parse_error("geometry document must be a JSON object");
    if (!doc.contains("receivers") || !doc["receivers"].is_array())
        throw parse_error("geometry needs a 'receivers' array");
    std::vector<Vec3> centers;
    for (const auto& v : doc["receivers"]) centers.push_back(vec3_from_json(v));
    return make_geometry(centers, number_field(doc, "radius_a"), number_field(doc, "diffusion_d"));
}

json geometry_to_json(const SystemGeometry& geom) {
    json receivers = json::array();
    for (const auto& r : geom.receivers) receivers.push_back({r.center.x, r.center.y, r.center.z});
    return {{"receivers", receivers}, {"radius_a", geom.radius_a}, {"diffusion_d", geom.diffusion_d}};
}

std::vector<double> GridSpec::values() const {
    if (count < 2) throw invariant_error("grid count must be at least 2");
    if (!(start < stop)) throw invariant_error("grid start must be below stop");
    if (scale == GridScale::log && !(start > 0.0)) throw invariant_error("log grid needs a positive start");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double f = static_cast<double>(k) / (count - 1);
        out[k] = scale == GridScale::linear ? start + f * (stop - start)
                                            : std::exp(std::log(start) + f * (std::log(stop) - std::log(start)));
    }
    out.front() = start;
    out.back() = stop;
    return out;
}

namespace {

GridScale parse_scale(const std::string& s) {
    if (s == "linear") return GridScale::linear;
    if (s == "log") return GridScale::log;
    throw parse_error("grid scale must be 'linear' or 'log', got '" + s + "'");
}

double parse_number(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw parse_error("not a number: '" + text + "'");
    }
    if (used != text.size()) throw parse_error("not a number: '" + text + "'");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

}  // namespace

GridSpec grid_from_json(const json& doc) {
    if (!doc.is_object()) throw parse_error("range must be an object {start, stop, count, scale}");
    GridSpec g;
    g.start = number_field(doc, "start");
    g.stop = number_field(doc, "stop");
    if (!doc.contains("count") || !doc["count"].is_number_integer())
        throw parse_error("range.count must be an integer");
    g.count = doc["count"].get<int>();
    if (doc.contains("scale")) {
        if (!doc["scale"].is_string()) throw parse_error("range.scale must be a string");
        g.scale = parse_scale(doc["scale"].get<std::string>());
    }
    return g;
}

std::vector<double> parse_time_list(const std::string& text) {
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() < 3 || parts.size() > 4)
            throw parse_error("time range must be start:stop:count[:linear|log], got '" + text + "'");
        GridSpec g;
        g.start = parse_number(parts[0]);
        g.stop = parse_number(parts[1]);
        const double count = parse_number(parts[2]);
        if (count != std::floor(count)) throw parse_error("time range count must be an integer");
        g.count = static_cast<int>(count);
        if (parts.size() == 4) g.scale = parse_scale(parts[3]);
        return g.values();
    }
    std::vector<double> out;
    for (const auto& p : split(text, ',')) out.push_back(parse_number(p));
    if (out.empty()) throw parse_error("empty time list");
    return out;
}

std::vector<double> time_list_from_json(const json& doc) {
    if (doc.is_array()) {
        std::vector<double> out;
        for (const auto& v : doc) {
            if (!v.is_number()) throw parse_error("time list entries must be numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    if (doc.is_string()) return parse_time_list(doc.get<std::string>());
    return grid_from_json(doc).values();
}

std::string fmt(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::optional<double> optional_number(const json& doc, const std::string& key) {
    if (!doc.is_object() || !doc.contains(key)) return std::nullopt;
    if (!doc[key].is_number()) throw parse_error("setting '" + key + "' must be a number");
    return doc[key].get<double>();
}

std::optional<std::string> optional_string(const json& doc, const std::string& key) {
    if (!doc.is_object() || !doc.contains(key)) return std::nullopt;
    if (!doc[key].is_string()) throw parse_error("setting '" + key + "' must be a string");
    return doc[key].get<std::string>();
}

}  // namespace mcfar::cli
